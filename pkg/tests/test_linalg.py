import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fimlab.linalg import (
    RationalMatrix,
    Subspace,
    image_basis,
    inverse,
    kernel_basis,
    kron,
    quotient_map,
    rank,
    rref,
    solve,
)

F = Fraction


def naive_row_reduce(rows):
    """Independent oracle: textbook Gaussian elimination on Fraction lists."""
    rows = [list(map(Fraction, r)) for r in rows]
    if not rows:
        return rows
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                q = rows[i][c]
                rows[i] = [x - q * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return rows


def rand_matrix(rng, nr, nc, span=9):
    return RationalMatrix(
        [[F(rng.randint(-span, span), rng.randint(1, 4)) for _ in range(nc)] for _ in range(nr)]
    )


def test_rref_zero_fixed_point():
    m = RationalMatrix([[0]])
    assert rref(m) == m


def test_rref_rank_one_collapse():
    m = RationalMatrix([[2, 4], [1, 2]])
    assert rref(m) == RationalMatrix([[1, 2], [0, 0]])


def test_rref_invertible_to_identity_and_matches_naive():
    m = RationalMatrix([[1, 2], [3, 4]])
    assert rref(m) == RationalMatrix.identity(2)
    for rows in ([[1, 2], [3, 4]], [[0, 1, 2], [1, 1, 1], [2, 3, 4]], [[5]]):
        got = rref(RationalMatrix(rows))
        want = naive_row_reduce(rows)
        assert got == RationalMatrix(want)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.lists(st.integers(-6, 6), min_size=1, max_size=5),
        min_size=1,
        max_size=5,
    ).filter(lambda rows: len({len(r) for r in rows}) == 1)
)
def test_rref_idempotent_and_matches_naive(rows):
    m = RationalMatrix(rows)
    red = rref(m)
    assert rref(red) == red
    assert red == RationalMatrix(naive_row_reduce(rows))


def test_kernel_of_identity_is_zero():
    assert kernel_basis(RationalMatrix.identity(3)).dim == 0


def test_kernel_of_zero_map_is_full():
    assert kernel_basis(RationalMatrix.zeros(2, 3)) == Subspace.full(3)


def test_kernel_vectors_annihilated():
    m = RationalMatrix([[1, 1, 0]])
    ker = kernel_basis(m)
    assert ker.dim == 2
    for b in ker.basis.rows:
        assert all(x == 0 for x in m.apply(b))


def test_rank_nullity_random():
    rng = random.Random(4)
    for _ in range(25):
        nr = rng.randint(1, 12)
        nc = rng.randint(1, 12)
        m = rand_matrix(rng, nr, nc)
        assert kernel_basis(m).dim + image_basis(m).dim == nc


def test_solve_and_substitute_back():
    m = RationalMatrix([[1, 2], [3, 4]])
    x = solve(m, (1, 1))
    assert x == (F(-1), F(1))
    assert m.apply(x) == (F(1), F(1))


def test_solve_inconsistent_returns_none():
    m = RationalMatrix([[1, 1], [1, 1]])
    assert solve(m, (0, 1)) is None


def test_quotient_map_kills_subspace():
    sub = Subspace.from_spanning(2, [(1, 0)])
    q = quotient_map(2, sub)
    assert q.shape == (1, 2)
    assert q.apply((1, 0)) == (F(0),)
    assert rank(q) == 1


def test_quotient_map_random_properties():
    rng = random.Random(11)
    for _ in range(15):
        d = rng.randint(1, 6)
        k = rng.randint(0, d)
        sub = Subspace.from_spanning(
            d, [[rng.randint(-3, 3) for _ in range(d)] for _ in range(k)]
        )
        q = quotient_map(d, sub)
        assert rank(q) == d - sub.dim
        for b in sub.basis.rows:
            assert all(x == 0 for x in q.apply(b))


def test_kron_identities():
    assert kron(RationalMatrix.identity(2), RationalMatrix.identity(3)) == RationalMatrix.identity(6)


def test_kron_mixed_product():
    rng = random.Random(7)
    a = rand_matrix(rng, 2, 3)
    b = rand_matrix(rng, 3, 2)
    c = rand_matrix(rng, 3, 2)
    d = rand_matrix(rng, 2, 4)
    assert kron(a, b) * kron(c, d) == kron(a * c, b * d)


def test_subspace_algebra():
    u = Subspace.from_spanning(3, [(1, 0, 0), (0, 1, 0)])
    v = Subspace.from_spanning(3, [(0, 1, 0), (0, 0, 1)])
    assert u.add(v) == Subspace.full(3)
    assert u.intersect(v) == Subspace.from_spanning(3, [(0, 1, 0)])
    assert u.contains((2, 5, 0)) and not u.contains((0, 0, 1))


def test_inverse_round_trip():
    m = RationalMatrix([[1, 2], [3, 5]])
    mi = inverse(m)
    assert mi is not None and m * mi == RationalMatrix.identity(2)
    assert inverse(RationalMatrix([[1, 2], [2, 4]])) is None


def test_entries_reduced_fractions():
    m = rref(RationalMatrix([[2, 3], [4, 7]]))
    for row in m.rows:
        for x in row:
            assert isinstance(x, Fraction)


def test_shape_mismatch_raises():
    with pytest.raises(ValueError):
        RationalMatrix([[1, 2], [3]])
