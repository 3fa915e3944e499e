from fractions import Fraction
from math import factorial

import pytest

from fimlab.category import GroupTable
from fimlab.linalg import RationalMatrix
from fimlab.symrep import (
    CharacterVector,
    IrrationalCharacterError,
    ProductRep,
    character,
    character_inner,
    class_representative,
    cycle_type_class_size,
    decompose,
    hook_length_dim,
    mn_character,
    partitions_of,
    rational_character_table,
    regular_rep_matrices,
    specht,
    standard_tableaux,
)

F = Fraction


def test_partitions_of():
    assert partitions_of(3) == ((3,), (2, 1), (1, 1, 1))
    assert partitions_of(0) == ((),)
    assert len(partitions_of(6)) == 11


def test_hook_lengths():
    assert hook_length_dim((3,)) == 1
    assert hook_length_dim((2, 1)) == 2  # 3!/(3*1*1)
    assert hook_length_dim((2, 2)) == 2
    assert hook_length_dim((3, 2)) == 5
    for n in range(1, 7):
        assert all(
            hook_length_dim(lam) == len(standard_tableaux(lam))
            for lam in partitions_of(n)
        )


def test_specht_trivial_and_sign():
    triv = specht((3,))
    assert triv.dim == 1
    assert all(g == RationalMatrix.identity(1) for g in triv.gens)
    sign = specht((1, 1))
    assert sign.dim == 1
    assert sign.gens[0] == RationalMatrix([[-1]])


def test_specht_standard_rep_s3():
    rep = specht((2, 1))
    assert rep.dim == 2
    a, b = rep.gens
    ident = RationalMatrix.identity(2)
    assert a * a == ident and b * b == ident
    assert a * b * a == b * a * b


def test_specht_dim_squares_sum_to_group_order():
    for n in range(1, 7):
        assert sum(specht(lam).dim ** 2 for lam in partitions_of(n)) == factorial(n)


def test_class_representative_and_sizes():
    for n in range(1, 6):
        total = 0
        for mu in partitions_of(n):
            rep = class_representative(mu, n)
            assert sorted(rep) == list(range(1, n + 1))
            total += cycle_type_class_size(mu, n)
        assert total == factorial(n)


def test_mn_character_basics():
    for n in range(1, 7):
        for mu in partitions_of(n):
            assert mn_character((n,), mu) == 1
            nparts = len(mu)
            assert mn_character((1,) * n, mu) == (-1) ** (n - nparts)
        for lam in partitions_of(n):
            assert mn_character(lam, (1,) * n) == hook_length_dim(lam)


def test_character_orthonormality():
    for n in (2, 3, 4):
        chars = [character(lam) for lam in partitions_of(n)]
        for i, a in enumerate(chars):
            for j, b in enumerate(chars):
                assert character_inner(a, b) == (1 if i == j else 0)


def test_character_vector_dim():
    chi = character((2, 1))
    assert isinstance(chi, CharacterVector)
    assert chi.dim == 2


def test_specht_matrices_match_mn_traces():
    """Matrix traces of class representatives equal the MN character."""
    for lam in ((2, 1), (2, 2), (3, 1), (2, 1, 1)):
        rep = specht(lam)
        n = rep.n
        for mu in partitions_of(n):
            mat = rep.matrix_of_perm(class_representative(mu, n))
            assert mat.trace() == mn_character(lam, mu)


def test_rational_character_table_s3():
    table = rational_character_table(GroupTable.symmetric(3))
    dims = sorted(int(row[0]) for row in table.table)
    assert dims == [1, 1, 2]
    # orthogonality of rows
    sizes = [len(c) for c in table.classes]
    order = 6
    for i, a in enumerate(table.table):
        for j, b in enumerate(table.table):
            val = sum(s * x * y for s, x, y in zip(sizes, a, b))
            assert val == (order if i == j else 0)


def test_rational_character_table_klein():
    v4 = GroupTable.product(GroupTable.cyclic(2), GroupTable.cyclic(2))
    table = rational_character_table(v4)
    assert [int(r[0]) for r in table.table] == [1, 1, 1, 1]


def test_c3_character_table_is_irrational():
    with pytest.raises(IrrationalCharacterError):
        rational_character_table(GroupTable.cyclic(3))


def _perm_rep_s3():
    """Permutation representation of S_3 on Q^3 as a ProductRep."""
    def swap_mat(k):
        rows = [[F(0)] * 3 for _ in range(3)]
        img = list(range(3))
        img[k - 1], img[k] = img[k], img[k - 1]
        for a in range(3):
            rows[img[a]][a] = F(1)
        return RationalMatrix(rows)

    return ProductRep(
        ns=(3,),
        group=GroupTable.trivial(),
        dim=3,
        swap_mats={(1, 1): swap_mat(1), (1, 2): swap_mat(2)},
        group_mats=[],
    )


def test_decompose_permutation_rep():
    rep = _perm_rep_s3()
    assert decompose(rep) == {(((3,),), 0): 1, (((2, 1),), 0): 1}


def test_decompose_regular_rep_s3():
    group = GroupTable.symmetric(3)
    mats = regular_rep_matrices(group)
    # the regular rep of S3 as a rep of the *group factor* with no S_n part
    rep = ProductRep(ns=(), group=group, dim=6, swap_mats={}, group_mats=mats)
    got = decompose(rep)
    dims = {0: None}
    table = rational_character_table(group)
    expected = {((), i): int(table.table[i][0]) for i in range(3)}
    assert got == expected


def test_decompose_trivial_rep_of_product():
    rep = ProductRep(
        ns=(2, 2),
        group=GroupTable.trivial(),
        dim=1,
        swap_mats={(1, 1): RationalMatrix([[1]]), (2, 1): RationalMatrix([[1]])},
        group_mats=[],
    )
    assert decompose(rep) == {(((2,), (2,)), 0): 1}


def test_decompose_round_trip_specht():
    for lam in ((2, 1), (3, 1), (2, 2)):
        rep = specht(lam)
        prep = ProductRep(
            ns=(rep.n,),
            group=GroupTable.trivial(),
            dim=rep.dim,
            swap_mats={(1, k): rep.gens[k - 1] for k in range(1, rep.n)},
            group_mats=[],
        )
        assert decompose(prep) == {((lam,), 0): 1}


def test_decompose_rejects_invalid_rep():
    bad = ProductRep(
        ns=(2,),
        group=GroupTable.trivial(),
        dim=1,
        swap_mats={(1, 1): RationalMatrix([[2]])},  # not an involution
        group_mats=[],
    )
    with pytest.raises(ValueError):
        decompose(bad)
