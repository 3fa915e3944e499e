import random

import pytest

from fimlab.category import (
    GroupTable,
    Morphism,
    Window,
    compose,
    count_injections,
    deg_S,
    degree,
    enumerate_injections,
    factor_injection,
    factor_morphism,
    generator_keys,
    generators,
    identity_morphism,
    leq,
    morphism_of_key,
    perm_to_adjacent,
    std_incl,
    swap_morphism,
)


def apply_perm_word(word, n):
    """Compose adjacent transpositions s_k (leftmost applied last)."""
    img = list(range(1, n + 1))
    for k in reversed(word):
        img[k - 1], img[k] = img[k], img[k - 1]
        # applying s_k after the permutation built so far means relabelling
        # values, not positions; rebuild by composing functions instead.
    # safer: fold as functions
    def s(k):
        def f(x):
            if x == k:
                return k + 1
            if x == k + 1:
                return k
            return x

        return f

    funcs = [s(k) for k in word]

    def sigma(x):
        for f in reversed(funcs):
            x = f(x)
        return x

    return tuple(sigma(x) for x in range(1, n + 1))


def test_degrees():
    assert degree((0, 0)) == 0
    assert degree((2, 3)) == 5
    assert deg_S((2, 3), {1}) == 2
    assert deg_S((2, 3), {2}) == 3


def test_leq_examples():
    assert leq((1, 2), (1, 3))
    assert not leq((2, 1), (1, 3))
    rng = random.Random(0)
    for _ in range(20):
        n = tuple(rng.randint(0, 4) for _ in range(2))
        assert leq(n, n)


def test_leq_partial_order_on_window():
    objs = Window((2, 2)).objects()
    for a in objs:
        for b in objs:
            if leq(a, b) and leq(b, a):
                assert a == b
            for c in objs:
                if leq(a, b) and leq(b, c):
                    assert leq(a, c)


def test_enumerate_injections_counts():
    assert len(enumerate_injections((1,), (1,))) == 1
    assert enumerate_injections((1,), (1,))[0].is_identity()
    assert len(enumerate_injections((1,), (2,))) == 2
    assert len(enumerate_injections((1, 2), (2, 3))) == 12  # 2 * 6 by brute force
    for a in Window((3, 3)).objects():
        for b in Window((3, 3)).objects():
            if leq(a, b):
                assert len(enumerate_injections(a, b)) == count_injections(a, b)


def test_enumerate_injections_requires_leq():
    with pytest.raises(ValueError):
        enumerate_injections((2,), (1,))


def test_compose_identity_and_associativity():
    rng = random.Random(5)
    objs = [(a, b) for a in range(3) for b in range(3)]
    for _ in range(50):
        a = objs[rng.randrange(len(objs))]
        b = tuple(x + rng.randint(0, 2) for x in a)
        c = tuple(x + rng.randint(0, 2) for x in b)
        d = tuple(x + rng.randint(0, 2) for x in c)
        f = rng.choice(enumerate_injections(c, d))
        g = rng.choice(enumerate_injections(b, c))
        h = rng.choice(enumerate_injections(a, b))
        assert compose(f, compose(g, h)) == compose(compose(f, g), h)
        assert compose(f, identity_morphism(c)) == f
        assert compose(identity_morphism(d), f) == f


def test_group_table_s3():
    s3 = GroupTable.symmetric(3)
    assert s3.order == 6
    assert len(s3.generators) == 2
    assert sorted(len(c) for c in s3.conjugacy_classes()) == [1, 2, 3]
    for g in range(6):
        w = s3.word(g)
        acc = 0
        for j in reversed(w):
            acc = s3.mult[s3.generators[j]][acc]
        assert acc == g


def test_group_table_rejects_bad_tables():
    with pytest.raises(ValueError):
        GroupTable([[0, 1], [1, 1]])  # not a group law
    with pytest.raises(ValueError):
        GroupTable([[1, 0], [0, 1]])  # identity not at 0


def test_group_product_order():
    g = GroupTable.product(GroupTable.symmetric(2), GroupTable.cyclic(3))
    assert g.order == 6
    assert g.conjugacy_classes()[0] == (0,)


def test_group_round_trip():
    g = GroupTable.cyclic(4)
    assert GroupTable.from_dict(g.to_dict()) == g


def test_generators_window_m1():
    w = Window((2,))
    keys = generator_keys(w, GroupTable.trivial())
    incls = [k for k in keys if k[0] == "incl"]
    swaps = [k for k in keys if k[0] == "swap"]
    assert {(k[2]) for k in incls} == {(0,), (1,)}
    assert swaps == [("swap", 1, 1, (2,))]


def test_generators_window_degenerate():
    assert generator_keys(Window((0,)), GroupTable.trivial()) == []
    keys = generator_keys(Window((1, 1)), GroupTable.trivial())
    assert len([k for k in keys if k[0] == "incl"]) == 4
    assert not [k for k in keys if k[0] == "swap"]


def test_perm_to_adjacent_reconstructs():
    rng = random.Random(9)
    for n in range(1, 7):
        for _ in range(10):
            sigma = list(range(1, n + 1))
            rng.shuffle(sigma)
            sigma = tuple(sigma)
            assert apply_perm_word(perm_to_adjacent(sigma), n) == sigma


def test_factor_injection():
    sigma, k = factor_injection((3, 1), 3)
    assert k == 1
    # sigma o std: std(1)=2, std(2)=3 then sigma gives (3, 1)
    assert (sigma[1], sigma[2]) == (3, 1)
    assert sorted(sigma) == [1, 2, 3]


def test_factor_morphism_recomposes():
    """Composing the generator keys must reproduce the morphism exactly."""
    group = GroupTable.symmetric(2)
    w = Window((3, 2))
    rng = random.Random(31)
    objs = w.objects()
    for _ in range(40):
        a = objs[rng.randrange(len(objs))]
        b = objs[rng.randrange(len(objs))]
        if not leq(a, b):
            continue
        f = rng.choice(enumerate_injections(a, b))
        f = Morphism(f.source, f.target, f.maps, rng.randrange(group.order))
        keys = factor_morphism(f, group)
        acc = identity_morphism(a)
        for key in reversed(keys):
            acc = compose(morphism_of_key(key, group), acc, group)
        assert acc == f


def test_std_incl_and_swap_shapes():
    f = std_incl((2, 1), 1)
    assert f.target == (3, 1)
    assert f.maps == ((2, 3), (1,))
    s = swap_morphism((3,), 1, 2)
    assert s.maps == ((1, 3, 2),)
    assert len(generators(Window((1,)), GroupTable.trivial())) == 1


def test_every_window_morphism_factors_through_generators():
    """Exhaustive check on the (3,3) window for m=2 and (3,) for m=1."""
    group = GroupTable.trivial()
    for bound in ((3,), (3, 3)):
        w = Window(bound)
        objs = w.objects()
        for a in objs:
            for b in objs:
                if not leq(a, b):
                    continue
                for f in enumerate_injections(a, b):
                    keys = factor_morphism(f, group)
                    acc = identity_morphism(a)
                    for key in reversed(keys):
                        acc = compose(morphism_of_key(key, group), acc, group)
                    assert acc == f
