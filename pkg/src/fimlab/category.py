"""The truncated product category of finite sets and injections, with an
optional finite group factor.

Objects are plain tuples ``n = (n_1, ..., n_m)`` of naturals.  Morphisms pair
a componentwise injection (stored as image tuples, 1-based) with a group
element index.  A :class:`Window` is the componentwise degree box on which
all module data lives.

The generator set used throughout the package:

* ``("incl", i, n)`` -- the standard inclusion ``n -> n + o_i`` sending
  ``x`` to ``x + 1`` in coordinate ``i`` (the new point is 1, matching the
  self-embedding that defines the shift functor),
* ``("swap", i, k, n)`` -- the automorphism of ``n`` exchanging ``k`` and
  ``k + 1`` in coordinate ``i``,
* ``("grp", j, n)`` -- the automorphism ``(id, g_j)`` for the j-th group
  generator.

Every window morphism factors through these (tested exhaustively at small
windows), which is what lets a truncated module store only generator
actions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import factorial


Obj = tuple  # tuple of m ints


def degree(n: Obj) -> int:
    return sum(n)


def deg_S(n: Obj, S) -> int:
    """Degree along the coordinate subset S (1-based coordinates)."""
    return sum(n[i - 1] for i in S)


def leq(a: Obj, b: Obj) -> bool:
    """The hom-set partial order: injections exist componentwise."""
    if len(a) != len(b):
        raise ValueError("objects live over different numbers of coordinates")
    return all(x <= y for x, y in zip(a, b))


def add(a: Obj, b: Obj) -> Obj:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Obj, b: Obj) -> Obj:
    out = tuple(x - y for x, y in zip(a, b))
    if any(x < 0 for x in out):
        raise ValueError(f"{a} - {b} leaves the object grid")
    return out


def unit(m: int, i: int) -> Obj:
    """o_i: the object with a single point in coordinate i (1-based)."""
    return tuple(1 if j == i - 1 else 0 for j in range(m))


class GroupTable:
    """A finite group given by its multiplication table.

    Index 0 is the identity.  The table is verified to be a group law on
    construction; inverses are derived.
    """

    def __init__(self, mult, generators=None, name: str = ""):
        mult = tuple(tuple(row) for row in mult)
        order = len(mult)
        if any(len(row) != order for row in mult):
            raise ValueError("multiplication table is not square")
        if order == 0:
            raise ValueError("empty group")
        for row in mult:
            for x in row:
                if not (0 <= x < order):
                    raise ValueError("table entry out of range")
        for a in range(order):
            if mult[a][0] != a or mult[0][a] != a:
                raise ValueError("index 0 is not an identity")
        inverse = [None] * order
        for a in range(order):
            for b in range(order):
                if mult[a][b] == 0:
                    inverse[a] = b
            if inverse[a] is None:
                raise ValueError(f"element {a} has no inverse")
        for a in range(order):
            for b in range(order):
                for c in range(order):
                    if mult[mult[a][b]][c] != mult[a][mult[b][c]]:
                        raise ValueError("multiplication is not associative")
        self.order = order
        self.mult = mult
        self.inverse = tuple(inverse)
        self.identity = 0
        if generators is None:
            generators = tuple(range(1, order)) if order > 1 else ()
        self.generators = tuple(generators)
        self.name = name
        if self._generated() != set(range(order)):
            raise ValueError("declared generators do not generate the group")

    def _generated(self):
        seen = {0}
        frontier = [0]
        while frontier:
            a = frontier.pop()
            for g in self.generators:
                b = self.mult[g][a]
                if b not in seen:
                    seen.add(b)
                    frontier.append(b)
        return seen

    def __eq__(self, other):
        return (
            isinstance(other, GroupTable)
            and self.mult == other.mult
            and self.generators == other.generators
        )

    def __hash__(self):
        return hash((self.mult, self.generators))

    def __repr__(self):
        label = self.name or f"order {self.order}"
        return f"GroupTable({label})"

    def is_trivial(self) -> bool:
        return self.order == 1

    def word(self, g: int):
        """g as a product of generators, as indices; matrices multiply in
        the returned order (leftmost factor applied last)."""
        if g == 0:
            return []
        prev = {0: None}
        frontier = [0]
        while frontier:
            nxt = []
            for a in frontier:
                for j, gen in enumerate(self.generators):
                    b = self.mult[gen][a]
                    if b not in prev:
                        prev[b] = (j, a)
                        nxt.append(b)
            if g in prev:
                break
            frontier = nxt
        if g not in prev:
            raise ValueError("generators do not reach element")
        word = []
        cur = g
        while prev[cur] is not None:
            j, parent = prev[cur]
            word.append(j)
            cur = parent
        return word

    def conjugacy_classes(self):
        """Sorted classes (each a sorted tuple), identity class first."""
        remaining = set(range(self.order))
        classes = []
        while remaining:
            a = min(remaining)
            orbit = set()
            for h in range(self.order):
                orbit.add(self.mult[self.mult[h][a]][self.inverse[h]])
            classes.append(tuple(sorted(orbit)))
            remaining -= orbit
        return classes

    # -- constructors ----------------------------------------------------

    @staticmethod
    def trivial() -> "GroupTable":
        return GroupTable(((0,),), (), name="1")

    @staticmethod
    def cyclic(k: int) -> "GroupTable":
        mult = [[(a + b) % k for b in range(k)] for a in range(k)]
        gens = (1,) if k > 1 else ()
        return GroupTable(mult, gens, name=f"C{k}")

    @staticmethod
    def symmetric(k: int) -> "GroupTable":
        """S_k on the element list itertools.permutations (identity first)."""
        perms = list(itertools.permutations(range(1, k + 1)))
        index = {p: i for i, p in enumerate(perms)}
        mult = [
            [index[tuple(p[q[x] - 1] for x in range(k))] for q in perms]
            for p in perms
        ]
        gens = []
        for t in range(1, k):
            img = list(range(1, k + 1))
            img[t - 1], img[t] = img[t], img[t - 1]
            gens.append(index[tuple(img)])
        return GroupTable(mult, tuple(gens), name=f"S{k}")

    @staticmethod
    def product(a: "GroupTable", b: "GroupTable") -> "GroupTable":
        """Direct product; element (x, y) has index x * b.order + y."""
        ob = b.order
        mult = []
        for xa in range(a.order):
            for xb in range(ob):
                row = []
                for ya in range(a.order):
                    for yb in range(ob):
                        row.append(a.mult[xa][ya] * ob + b.mult[xb][yb])
                mult.append(row)
        gens = tuple(g * ob for g in a.generators) + tuple(b.generators)
        name = f"{a.name}x{b.name}" if a.name and b.name else ""
        return GroupTable(mult, gens, name=name)

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "mult": [list(row) for row in self.mult],
            "generators": list(self.generators),
            "name": self.name,
        }

    @staticmethod
    def from_dict(d: dict) -> "GroupTable":
        g = GroupTable(d["mult"], tuple(d.get("generators", ())), d.get("name", ""))
        if g.order != d["order"]:
            raise ValueError("declared order does not match table size")
        return g


@dataclass(frozen=True)
class Window:
    """Componentwise truncation box: objects n with n_i <= bound_i."""

    bound: Obj

    @property
    def m(self) -> int:
        return len(self.bound)

    def contains(self, n: Obj) -> bool:
        return len(n) == self.m and all(0 <= x <= b for x, b in zip(n, self.bound))

    def objects(self):
        """All window objects, lexicographic (last coordinate fastest)."""
        return list(itertools.product(*[range(b + 1) for b in self.bound]))

    def objects_by_degree(self):
        return sorted(self.objects(), key=lambda n: (degree(n), n))

    def shrink(self, delta: Obj) -> "Window":
        return Window(sub(self.bound, delta))


@dataclass(frozen=True)
class Morphism:
    """A morphism of the product injection category with group factor:
    componentwise injections plus a group element.

    ``maps[i]`` is the image tuple (f(1), ..., f(a_i)) of an injection
    [a_i] -> [b_i].
    """

    source: Obj
    target: Obj
    maps: tuple
    group_elt: int = 0

    def __post_init__(self):
        if not (len(self.source) == len(self.target) == len(self.maps)):
            raise ValueError("coordinate count mismatch")
        for a, b, img in zip(self.source, self.target, self.maps):
            if len(img) != a:
                raise ValueError("image tuple has wrong length")
            if len(set(img)) != len(img):
                raise ValueError("map is not injective")
            if any(not (1 <= x <= b) for x in img):
                raise ValueError("image out of range")

    def is_identity(self) -> bool:
        return (
            self.source == self.target
            and self.group_elt == 0
            and all(img == tuple(range(1, a + 1)) for a, img in zip(self.source, self.maps))
        )


def identity_morphism(n: Obj) -> Morphism:
    return Morphism(n, n, tuple(tuple(range(1, a + 1)) for a in n), 0)


def compose(f: Morphism, g: Morphism, group: GroupTable | None = None) -> Morphism:
    """f after g; group parts multiply via the group table."""
    if g.target != f.source:
        raise ValueError(f"cannot compose: {g.target} != {f.source}")
    maps = tuple(
        tuple(fimg[x - 1] for x in gimg) for fimg, gimg in zip(f.maps, g.maps)
    )
    if f.group_elt == 0:
        ge = g.group_elt
    elif g.group_elt == 0:
        ge = f.group_elt
    else:
        if group is None:
            raise ValueError("need a group table to compose nontrivial group parts")
        ge = group.mult[f.group_elt][g.group_elt]
    return Morphism(g.source, f.target, maps, ge)


@lru_cache(maxsize=None)
def _injections_one(a: int, b: int):
    """All injections [a] -> [b] as image tuples, lexicographic."""
    if a > b:
        return ()
    return tuple(itertools.permutations(range(1, b + 1), a))


def count_injections(a: Obj, b: Obj) -> int:
    total = 1
    for x, y in zip(a, b):
        if x > y:
            return 0
        total *= factorial(y) // factorial(y - x)
    return total


def enumerate_injections(a: Obj, b: Obj):
    """All injections a -> b (group part trivial), lexicographic on the
    concatenated image tuples; this order indexes free-module bases and is
    part of the file-format contract."""
    if not leq(a, b):
        raise ValueError(f"empty hom-set: {a} does not embed in {b}")
    out = []
    for combo in itertools.product(*[_injections_one(x, y) for x, y in zip(a, b)]):
        out.append(Morphism(a, b, combo, 0))
    return out


@lru_cache(maxsize=None)
def injection_index_table(a: Obj, b: Obj):
    return {f.maps: i for i, f in enumerate(enumerate_injections(a, b))}


# -- generators --------------------------------------------------------


def std_incl(n: Obj, i: int) -> Morphism:
    """The standard inclusion n -> n + o_i, x -> x + 1 in coordinate i."""
    maps = []
    for j, a in enumerate(n):
        if j == i - 1:
            maps.append(tuple(range(2, a + 2)))
        else:
            maps.append(tuple(range(1, a + 1)))
    return Morphism(n, add(n, unit(len(n), i)), tuple(maps), 0)


def swap_morphism(n: Obj, i: int, k: int) -> Morphism:
    """The automorphism of n swapping k and k+1 in coordinate i."""
    if not (1 <= k < n[i - 1]):
        raise ValueError("transposition out of range")
    maps = []
    for j, a in enumerate(n):
        img = list(range(1, a + 1))
        if j == i - 1:
            img[k - 1], img[k] = img[k], img[k - 1]
        maps.append(tuple(img))
    return Morphism(n, n, tuple(maps), 0)


def group_morphism(n: Obj, g: int) -> Morphism:
    mor = identity_morphism(n)
    return Morphism(mor.source, mor.target, mor.maps, g)


def generator_keys(window: Window, group: GroupTable):
    """Descriptor keys of all generators on the window, deterministic order."""
    keys = []
    m = window.m
    for n in window.objects():
        for i in range(1, m + 1):
            if n[i - 1] + 1 <= window.bound[i - 1]:
                keys.append(("incl", i, n))
        for i in range(1, m + 1):
            for k in range(1, n[i - 1]):
                keys.append(("swap", i, k, n))
        for j in range(len(group.generators)):
            keys.append(("grp", j, n))
    return keys


def morphism_of_key(key, group: GroupTable) -> Morphism:
    kind = key[0]
    if kind == "incl":
        _, i, n = key
        return std_incl(n, i)
    if kind == "swap":
        _, i, k, n = key
        return swap_morphism(n, i, k)
    if kind == "grp":
        _, j, n = key
        return group_morphism(n, group.generators[j])
    raise ValueError(f"unknown generator key {key!r}")


def generators(window: Window, group: GroupTable):
    return [morphism_of_key(k, group) for k in generator_keys(window, group)]


# -- factorization into generators --------------------------------------


def factor_injection(img: tuple, b: int):
    """Write an injection [a] -> [b] (image tuple img) as sigma o std^k.

    Returns (sigma, k) with k = b - a and sigma a permutation of [b] as an
    image tuple; std^k is x -> x + k.
    """
    a = len(img)
    k = b - a
    sigma = [0] * b
    for x, y in enumerate(img, start=1):
        sigma[x + k - 1] = y
    missing = sorted(set(range(1, b + 1)) - set(img))
    for slot, y in zip(range(k), missing):
        sigma[slot] = y
    return tuple(sigma), k


def perm_to_adjacent(sigma: tuple):
    """sigma as a composition s_{k_1} o ... o s_{k_t} of adjacent swaps.

    Swapping list positions k, k+1 of the image tuple precomposes with s_k,
    so bubble-sorting records a word with sigma o s_{w_1} o ... o s_{w_t} =
    id, i.e. sigma = s_{w_t} o ... o s_{w_1}.  The reversed word is returned,
    so action matrices multiply left to right over it.
    """
    n = len(sigma)
    word = []
    current = list(sigma)
    changed = True
    while changed:
        changed = False
        for k in range(1, n):
            if current[k - 1] > current[k]:
                current[k - 1], current[k] = current[k], current[k - 1]
                word.append(k)
                changed = True
    word.reverse()
    return word


def factor_morphism(mor: Morphism, group: GroupTable):
    """Factor a morphism into generator keys.

    Returns keys in matrix-composition order: the action matrix of ``mor``
    is the product of the generator action matrices taken left to right over
    the returned list.  Coordinates are raised in ascending order after the
    group part acts first.
    """
    m = len(mor.source)
    keys = []
    current = list(mor.source)
    stages = []  # collect per coordinate, then reverse for matrix order
    for i in range(1, m + 1):
        a, b = mor.source[i - 1], mor.target[i - 1]
        img = mor.maps[i - 1]
        sigma, k = factor_injection(img, b)
        incl_keys = []
        for step in range(k):
            at = tuple(current)
            incl_keys.append(("incl", i, at))
            current[i - 1] += 1
        at_top = tuple(current)
        swap_keys = [("swap", i, kk, at_top) for kk in perm_to_adjacent(sigma)]
        # matrix order: swaps (applied last) first, then inclusions from the
        # top object down to the source
        stages.append(swap_keys + incl_keys[::-1])
    # coordinate m raised last -> its matrices are leftmost
    for stage in reversed(stages):
        keys.extend(stage)
    if mor.group_elt != 0:
        at = mor.source
        for j in group.word(mor.group_elt):
            keys.append(("grp", j, at))
    return keys


def invert_perm(img: tuple) -> tuple:
    """Inverse of a permutation given as an image tuple."""
    inv = [0] * len(img)
    for x, y in enumerate(img, start=1):
        inv[y - 1] = x
    return tuple(inv)
