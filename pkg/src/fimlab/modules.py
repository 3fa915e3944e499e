"""Truncated modules over the product injection category (times a finite
group): the central value type of the package.

A :class:`TruncatedModule` stores a dimension per window object and one
exact rational matrix per category generator; arbitrary morphisms act
through :func:`fimlab.category.factor_morphism`.  Constructors cover free,
induced (Specht-isotypic image), co-free, coinduced, external tensor,
direct sums, submodules and quotients.  Hom spaces are computed by a
degreewise propagation solver that parametrizes a natural transformation by
its values on generator slots; with a certified presentation inside the
window this computes the honest Hom space of the untruncated modules.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import prod

from .category import (
    GroupTable,
    Morphism,
    Window,
    add,
    compose,
    degree,
    enumerate_injections,
    factor_morphism,
    generator_keys,
    injection_index_table,
    invert_perm,
    leq,
    morphism_of_key,
    sub,
    unit,
)
from .linalg import (
    RationalMatrix,
    Subspace,
    block_diag,
    image_basis,
    inverse,
    kernel_basis,
    kron,
    quotient_map,
    rank,
    rref,
    solve,
    solve_matrix,
)
from .symrep import GroupRep, ProductRep, specht, _rep_elements

_ONE = Fraction(1)
_ZERO = Fraction(0)


# -- wire-format helpers -------------------------------------------------


def fraction_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_fraction(s: str) -> Fraction:
    return Fraction(s)


def obj_str(n) -> str:
    return "(" + ",".join(str(x) for x in n) + ")"


def parse_obj(s: str) -> tuple:
    body = s.strip()
    if not (body.startswith("(") and body.endswith(")")):
        raise ValueError(f"bad object string {s!r}")
    body = body[1:-1].strip()
    if not body:
        return ()
    return tuple(int(x) for x in body.split(","))


def matrix_to_lists(mat: RationalMatrix):
    return [[fraction_str(x) for x in row] for row in mat.rows]


def matrix_from_lists(rows, nrows, ncols) -> RationalMatrix:
    grid = [[parse_fraction(x) for x in row] for row in rows]
    if len(grid) != nrows or any(len(r) != ncols for r in grid):
        raise ValueError("matrix shape does not match declared dims")
    return RationalMatrix(grid, nrows, ncols)


# -- presentations -------------------------------------------------------


@dataclass(frozen=True)
class Presentation:
    """Certificate that a module is determined by window data.

    ``generator_slots`` lists objects (with an optional partition-tuple
    label) in whose degrees the module is generated; ``relation_bound`` is a
    componentwise bound on the generation degrees of the kernel of the
    corresponding free cover, or None when unknown.  Operations that need
    exactness check ``fits`` and refuse otherwise.

    ``observed_only`` marks bounds merely read off from window data rather
    than certified by a construction; they drive searches but never upgrade
    a status to EXACT.
    """

    generator_slots: tuple
    relation_bound: tuple | None
    observed_only: bool = False

    @staticmethod
    def make(slots, relation_bound, observed_only=False):
        norm = []
        for item in slots:
            if isinstance(item, tuple) and len(item) == 2 and (
                item[1] is None or isinstance(item[1], tuple)
            ) and not isinstance(item[0], int):
                norm.append((tuple(item[0]), item[1]))
            else:
                norm.append((tuple(item), None))
        rb = None if relation_bound is None else tuple(relation_bound)
        return Presentation(tuple(norm), rb, observed_only)

    def gen_bound(self, m: int) -> tuple:
        bound = [0] * m
        for obj, _ in self.generator_slots:
            for i, x in enumerate(obj):
                bound[i] = max(bound[i], x)
        return tuple(bound)

    def total_bound(self, m: int) -> tuple | None:
        g = self.gen_bound(m)
        if self.relation_bound is None:
            return None
        return tuple(max(a, b) for a, b in zip(g, self.relation_bound))

    def fits_generators(self, window: Window) -> bool:
        return leq(self.gen_bound(window.m), window.bound)

    def fits(self, window: Window) -> bool:
        total = self.total_bound(window.m)
        return total is not None and leq(total, window.bound)

    def margin(self, window: Window) -> int | None:
        total = self.total_bound(window.m)
        if total is None:
            return None
        if not leq(total, window.bound):
            return -1
        diffs = [b - t for b, t in zip(window.bound, total)]
        return min(diffs) if diffs else 0

    def to_dict(self) -> dict:
        return {
            "generators": [
                {
                    "at": obj_str(obj),
                    "label": None if lab is None else [list(p) for p in lab],
                }
                for obj, lab in self.generator_slots
            ],
            "relation_bound": None
            if self.relation_bound is None
            else obj_str(self.relation_bound),
            "observed_only": self.observed_only,
        }

    @staticmethod
    def from_dict(d: dict) -> "Presentation":
        slots = []
        for g in d["generators"]:
            lab = g.get("label")
            lab = None if lab is None else tuple(tuple(p) for p in lab)
            slots.append((parse_obj(g["at"]), lab))
        rb = d.get("relation_bound")
        return Presentation(
            tuple(slots),
            None if rb is None else parse_obj(rb),
            bool(d.get("observed_only", False)),
        )


class MarginError(RuntimeError):
    """Raised when an operation would need data beyond the window."""


# -- the module type ------------------------------------------------------


@dataclass
class ValidationReport:
    ok: bool
    failures: list

    def first_failure(self):
        return self.failures[0] if self.failures else None


class TruncatedModule:
    """A representation of the truncated category: dims plus generator
    actions, immutable after construction."""

    def __init__(self, window: Window, group: GroupTable, dims, actions,
                 presentation: Presentation | None = None, name: str = ""):
        self.window = window
        self.group = group
        self.dims = {tuple(k): int(v) for k, v in dims.items()}
        self.actions = dict(actions)
        self.presentation = presentation
        self.name = name
        for n in window.objects():
            if n not in self.dims:
                raise ValueError(f"missing dimension at {n}")
        for key in generator_keys(window, group):
            mat = self.actions.get(key)
            if mat is None:
                raise ValueError(f"missing action for generator {key}")
            src = key[2] if key[0] != "swap" else key[3]
            tgt = self._gen_target(key)
            if mat.shape != (self.dims[tgt], self.dims[src]):
                raise ValueError(
                    f"action {key} has shape {mat.shape}, expected "
                    f"({self.dims[tgt]}, {self.dims[src]})"
                )

    @property
    def m(self) -> int:
        return self.window.m

    def _gen_target(self, key):
        if key[0] == "incl":
            _, i, n = key
            return add(n, unit(self.m, i))
        if key[0] == "swap":
            return key[3]
        return key[2]

    def dim(self, n) -> int:
        return self.dims[tuple(n)]

    def total_dim(self) -> int:
        return sum(self.dims.values())

    def is_zero(self) -> bool:
        return all(d == 0 for d in self.dims.values())

    def action(self, key) -> RationalMatrix:
        return self.actions[key]

    def __eq__(self, other):
        return (
            isinstance(other, TruncatedModule)
            and self.window == other.window
            and self.group == other.group
            and self.dims == other.dims
            and self.actions == other.actions
        )

    def __repr__(self):
        total = self.total_dim()
        label = self.name or "module"
        return f"TruncatedModule({label}, window {self.window.bound}, total dim {total})"

    # -- morphism evaluation ------------------------------------------

    def evaluate(self, mor: Morphism) -> RationalMatrix:
        """The action matrix of an arbitrary window morphism."""
        if not (self.window.contains(mor.source) and self.window.contains(mor.target)):
            raise MarginError(f"morphism {mor} leaves the window")
        keys = factor_morphism(mor, self.group)
        mat = RationalMatrix.identity(self.dims[mor.target])
        for key in keys:
            mat = mat * self.actions[key]
        if mat.shape != (self.dims[mor.target], self.dims[mor.source]):
            raise AssertionError("evaluation produced a wrong shape")
        return mat

    def group_elements_at(self, n):
        """rho(g) for every group element at object n."""
        gen_mats = [self.actions[("grp", j, tuple(n))] for j in range(len(self.group.generators))]
        return _rep_elements(self.group, gen_mats, self.dims[tuple(n)])

    # -- validation -----------------------------------------------------

    def validate(self, deep: bool = False) -> ValidationReport:
        failures = []

        def check(cond, msg):
            if not cond:
                failures.append(msg)

        m = self.m
        ident = {n: RationalMatrix.identity(d) for n, d in self.dims.items()}
        for n in self.window.objects():
            swaps = {}
            for i in range(1, m + 1):
                for k in range(1, n[i - 1]):
                    swaps[(i, k)] = self.actions[("swap", i, k, n)]
            for (i, k), s in swaps.items():
                check(s * s == ident[n], f"swap ({i},{k}) at {n} is not an involution")
            for (i, k), s in swaps.items():
                for (j, l), t in swaps.items():
                    if (i, k) >= (j, l):
                        continue
                    if i == j and abs(k - l) == 1:
                        check(
                            s * t * s == t * s * t,
                            f"braid relation fails at {n} coord {i} ({k},{l})",
                        )
                    else:
                        check(s * t == t * s, f"swaps ({i},{k}),({j},{l}) at {n} do not commute")
            grp_mats = [
                self.actions[("grp", j, n)] for j in range(len(self.group.generators))
            ]
            for gm in grp_mats:
                for s in swaps.values():
                    check(gm * s == s * gm, f"group action does not commute with swaps at {n}")
            if grp_mats:
                rho = self.group_elements_at(n)
                for a in range(self.group.order):
                    for b in range(self.group.order):
                        check(
                            rho[a] * rho[b] == rho[self.group.mult[a][b]],
                            f"group relations fail at {n}",
                        )
        # inclusion relations
        for n in self.window.objects():
            for i in range(1, m + 1):
                if n[i - 1] + 1 > self.window.bound[i - 1]:
                    continue
                ni = add(n, unit(m, i))
                inc = self.actions[("incl", i, n)]
                # swaps shift up past the new point
                for k in range(1, n[i - 1]):
                    lhs = inc * self.actions[("swap", i, k, n)]
                    rhs = self.actions[("swap", i, k + 1, ni)] * inc
                    check(lhs == rhs, f"incl/swap relation fails at {n} coord {i} k={k}")
                # swaps in other coordinates commute with the inclusion
                for j in range(1, m + 1):
                    if j == i:
                        continue
                    for k in range(1, n[j - 1]):
                        lhs = inc * self.actions[("swap", j, k, n)]
                        rhs = self.actions[("swap", j, k, ni)] * inc
                        check(lhs == rhs, f"incl {i} vs swap coord {j} fails at {n}")
                # group generators commute with inclusions
                for jg in range(len(self.group.generators)):
                    lhs = inc * self.actions[("grp", jg, n)]
                    rhs = self.actions[("grp", jg, ni)] * inc
                    check(lhs == rhs, f"incl {i} vs group gen {jg} fails at {n}")
                # double inclusion fixed by the swap of the two new points
                if n[i - 1] + 2 <= self.window.bound[i - 1]:
                    nii = add(ni, unit(m, i))
                    inc2 = self.actions[("incl", i, ni)]
                    s1 = self.actions[("swap", i, 1, nii)]
                    check(
                        s1 * inc2 * inc == inc2 * inc,
                        f"new-point swap relation fails at {n} coord {i}",
                    )
                # inclusions in different coordinates commute
                for j in range(i + 1, m + 1):
                    if n[j - 1] + 1 > self.window.bound[j - 1]:
                        continue
                    nj = add(n, unit(m, j))
                    lhs = self.actions[("incl", j, ni)] * inc
                    rhs = self.actions[("incl", i, nj)] * self.actions[("incl", j, n)]
                    check(lhs == rhs, f"inclusions {i},{j} fail to commute at {n}")
        if deep and not failures:
            # functoriality spot check: evaluate agrees on composites
            objs = self.window.objects_by_degree()
            for a in objs:
                for b in objs:
                    if not leq(a, b) or degree(b) - degree(a) > 2:
                        continue
                    for f in enumerate_injections(a, b)[:4]:
                        for c in objs:
                            if not leq(b, c) or degree(c) - degree(b) > 1:
                                continue
                            for g in enumerate_injections(b, c)[:2]:
                                lhs = self.evaluate(compose(g, f, self.group))
                                rhs = self.evaluate(g) * self.evaluate(f)
                                check(lhs == rhs, f"functoriality fails on {a}->{b}->{c}")
        return ValidationReport(not failures, failures)

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        acts = []
        for key in sorted(self.actions.keys()):
            mat = self.actions[key]
            if key[0] == "incl":
                gen = {"incl": key[1], "at": obj_str(key[2])}
            elif key[0] == "swap":
                gen = {"swap": [key[1], key[2]], "at": obj_str(key[3])}
            else:
                gen = {"grp": key[1], "at": obj_str(key[2])}
            acts.append({"gen": gen, "matrix": matrix_to_lists(mat)})
        return {
            "m": self.m,
            "group_ref": self.group.to_dict(),
            "window": obj_str(self.window.bound),
            "dims": {obj_str(n): d for n, d in sorted(self.dims.items())},
            "actions": acts,
            "presentation": None
            if self.presentation is None
            else self.presentation.to_dict(),
            "name": self.name,
        }

    @staticmethod
    def from_dict(d: dict) -> "TruncatedModule":
        group = GroupTable.from_dict(d["group_ref"])
        window = Window(parse_obj(d["window"]))
        if window.m != d["m"]:
            raise ValueError("window does not match declared m")
        dims = {parse_obj(k): v for k, v in d["dims"].items()}
        m = window.m
        actions = {}
        for item in d["actions"]:
            gen = item["gen"]
            if "incl" in gen:
                key = ("incl", gen["incl"], parse_obj(gen["at"]))
                src = key[2]
                tgt = add(src, unit(m, gen["incl"]))
            elif "swap" in gen:
                i, k = gen["swap"]
                key = ("swap", i, k, parse_obj(gen["at"]))
                src = tgt = key[3]
            else:
                key = ("grp", gen["grp"], parse_obj(gen["at"]))
                src = tgt = key[2]
            actions[key] = matrix_from_lists(item["matrix"], dims[tgt], dims[src])
        pres = d.get("presentation")
        return TruncatedModule(
            window,
            group,
            dims,
            actions,
            None if pres is None else Presentation.from_dict(pres),
            d.get("name", ""),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)

    @staticmethod
    def from_json(text: str) -> "TruncatedModule":
        return TruncatedModule.from_dict(json.loads(text))

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_json())

    @staticmethod
    def load(path) -> "TruncatedModule":
        with open(path) as fh:
            return TruncatedModule.from_json(fh.read())


# -- module maps ----------------------------------------------------------


class ModuleMap:
    """A natural transformation between truncated modules (same window)."""

    def __init__(self, source: TruncatedModule, target: TruncatedModule, blocks):
        if source.window != target.window:
            raise ValueError("source and target windows differ")
        self.source = source
        self.target = target
        self.blocks = {tuple(k): v for k, v in blocks.items()}
        for n in source.window.objects():
            blk = self.blocks.get(n)
            if blk is None:
                raise ValueError(f"missing block at {n}")
            if blk.shape != (target.dims[n], source.dims[n]):
                raise ValueError(
                    f"block at {n} has shape {blk.shape}, expected "
                    f"({target.dims[n]}, {source.dims[n]})"
                )

    @staticmethod
    def identity(v: TruncatedModule) -> "ModuleMap":
        return ModuleMap(
            v, v, {n: RationalMatrix.identity(d) for n, d in v.dims.items()}
        )

    @staticmethod
    def zero(source: TruncatedModule, target: TruncatedModule) -> "ModuleMap":
        return ModuleMap(
            source,
            target,
            {
                n: RationalMatrix.zeros(target.dims[n], source.dims[n])
                for n in source.dims
            },
        )

    def block(self, n) -> RationalMatrix:
        return self.blocks[tuple(n)]

    def is_natural(self) -> bool:
        for key in generator_keys(self.source.window, self.source.group):
            src = key[2] if key[0] != "swap" else key[3]
            tgt = self.source._gen_target(key)
            lhs = self.blocks[tgt] * self.source.actions[key]
            rhs = self.target.actions[key] * self.blocks[src]
            if lhs != rhs:
                return False
        return True

    def compose(self, other: "ModuleMap") -> "ModuleMap":
        """self after other."""
        if other.target != self.source:
            raise ValueError("maps do not compose")
        return ModuleMap(
            other.source,
            self.target,
            {n: self.blocks[n] * other.blocks[n] for n in self.blocks},
        )

    def add(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(
            self.source,
            self.target,
            {n: self.blocks[n] + other.blocks[n] for n in self.blocks},
        )

    def scale(self, c) -> "ModuleMap":
        return ModuleMap(
            self.source, self.target, {n: b.scale(c) for n, b in self.blocks.items()}
        )

    def is_injective_objectwise(self) -> bool:
        return all(
            kernel_basis(b).dim == 0 for b in self.blocks.values()
        )

    def is_surjective_objectwise(self) -> bool:
        return all(
            rank(b) == self.target.dims[n] for n, b in self.blocks.items()
        )

    def is_iso(self) -> bool:
        for n, b in self.blocks.items():
            if b.nrows != b.ncols or (b.nrows and inverse(b) is None):
                return False
        return True

    def inverse_map(self) -> "ModuleMap":
        blocks = {}
        for n, b in self.blocks.items():
            if b.nrows == 0:
                blocks[n] = RationalMatrix.zeros(0, 0)
                continue
            inv = inverse(b)
            if inv is None:
                raise ValueError(f"block at {n} is not invertible")
            blocks[n] = inv
        return ModuleMap(self.target, self.source, blocks)

    def __eq__(self, other):
        return isinstance(other, ModuleMap) and self.blocks == other.blocks

    def __repr__(self):
        return f"ModuleMap(window {self.source.window.bound})"


# -- constructors ----------------------------------------------------------


def zero_module(window: Window, group: GroupTable) -> TruncatedModule:
    dims = {n: 0 for n in window.objects()}
    actions = {
        key: RationalMatrix.zeros(0, 0) for key in generator_keys(window, group)
    }
    return TruncatedModule(
        window, group, dims, actions, Presentation.make([], tuple([0] * window.m))
    )


def make_free(n, window: Window, group: GroupTable | None = None,
              name: str = "") -> TruncatedModule:
    """The representable projective at n (tensored with the group algebra).

    Basis of the value at t: injections n -> t in enumeration order, each
    paired with the group elements, group index varying fastest.
    """
    n = tuple(n)
    group = group or GroupTable.trivial()
    if not window.contains(n):
        raise MarginError(f"generator object {n} lies outside the window")
    og = group.order
    dims = {}
    bases = {}
    for t in window.objects():
        if leq(n, t):
            injs = enumerate_injections(n, t)
            bases[t] = injs
            dims[t] = len(injs) * og
        else:
            bases[t] = []
            dims[t] = 0
    actions = {}
    for key in generator_keys(window, group):
        src = key[2] if key[0] != "swap" else key[3]
        tgt = add(src, unit(window.m, key[1])) if key[0] == "incl" else src
        mat = [[_ZERO] * dims[src] for _ in range(dims[tgt])]
        if dims[src]:
            index = injection_index_table(n, tgt)
            gen_mor = morphism_of_key(key, group)
            for bi, beta in enumerate(bases[src]):
                comp = compose(gen_mor, beta, group)
                new_idx = index[comp.maps]
                if key[0] == "grp":
                    g = group.generators[key[1]]
                    for h in range(og):
                        mat[new_idx * og + group.mult[g][h]][bi * og + h] = _ONE
                else:
                    for h in range(og):
                        mat[new_idx * og + h][bi * og + h] = _ONE
        actions[key] = RationalMatrix(mat, dims[tgt], dims[src])
    pres = Presentation.make([(n, None)], n)
    return TruncatedModule(window, group, dims, actions, pres, name or f"M{obj_str(n)}")


def make_cofree(l, window: Window, group: GroupTable | None = None,
                name: str = "") -> TruncatedModule:
    """Functions on injections into l: the finite-dimensional co-free
    module.  The group factor acts trivially; tensor with the group algebra
    via functors.ind when the regular group action is wanted."""
    l = tuple(l)
    group = group or GroupTable.trivial()
    if not window.contains(l):
        raise MarginError(f"cogenerator object {l} lies outside the window")
    dims = {}
    bases = {}
    for t in window.objects():
        if leq(t, l):
            injs = enumerate_injections(t, l)
            bases[t] = injs
            dims[t] = len(injs)
        else:
            bases[t] = []
            dims[t] = 0
    actions = {}
    for key in generator_keys(window, group):
        src = key[2] if key[0] != "swap" else key[3]
        tgt = add(src, unit(window.m, key[1])) if key[0] == "incl" else src
        mat = [[_ZERO] * dims[src] for _ in range(dims[tgt])]
        if dims[src] and dims[tgt]:
            if key[0] == "grp":
                for bi in range(dims[src]):
                    mat[bi][bi] = _ONE
            else:
                gen_mor = morphism_of_key(key, group)
                src_index = injection_index_table(src, l)
                for bi, beta in enumerate(bases[tgt]):
                    gamma = compose(beta, gen_mor, group)
                    mat[bi][src_index[gamma.maps]] = _ONE
        elif key[0] == "grp" and dims[src]:
            for bi in range(dims[src]):
                mat[bi][bi] = _ONE
        actions[key] = RationalMatrix(mat, dims[tgt], dims[src])
    slots = [(t, None) for t in window.objects_by_degree() if dims[t] > 0]
    rel = tuple(x + 1 for x in l)
    pres = Presentation.make(slots, rel)
    return TruncatedModule(window, group, dims, actions, pres, name or f"E{obj_str(l)}")


def _aut_elements(n):
    """Elements of Aut(n) as tuples of image tuples, with their index."""
    per_coord = [list(itertools.permutations(range(1, x + 1))) for x in n]
    return list(itertools.product(*per_coord))


def _aut_right_action_matrix(n, t, sigma, group: GroupTable, g: int):
    """Right action of (sigma, g) on the basis of the free module at t:
    (beta, h) -> (beta o sigma, h * g)."""
    injs = enumerate_injections(n, t)
    index = injection_index_table(n, t)
    og = group.order
    d = len(injs) * og
    mat = [[_ZERO] * d for _ in range(d)]
    sig_mor = Morphism(n, n, sigma, 0)
    for bi, beta in enumerate(injs):
        comp = compose(beta, sig_mor)
        ni = index[comp.maps]
        for h in range(og):
            mat[ni * og + group.mult[h][g]][bi * og + h] = _ONE
    return RationalMatrix(mat, d, d)


def submodule_from_stable_subspaces(v: TruncatedModule, spaces,
                                    presentation=None, name=""):
    """Wrap action-stable subspaces as a module plus its inclusion map.

    The caller guarantees stability; restriction failures raise.
    """
    spaces = {tuple(k): s for k, s in spaces.items()}
    dims = {n: spaces[n].dim for n in v.window.objects()}
    actions = {}
    for key in generator_keys(v.window, v.group):
        src = key[2] if key[0] != "swap" else key[3]
        tgt = v._gen_target(key)
        big = v.actions[key]
        src_basis = spaces[src].basis  # dim x ambient
        tgt_basis = spaces[tgt].basis
        rhs = big * src_basis.transpose()
        restricted = solve_matrix(tgt_basis.transpose(), rhs)
        if restricted is None:
            raise ValueError(f"subspaces are not action-stable at {key}")
        actions[key] = restricted
    mod = TruncatedModule(v.window, v.group, dims, actions, presentation, name)
    incl = ModuleMap(mod, v, {n: spaces[n].basis.transpose() for n in spaces})
    return mod, incl


def close_under_actions(v: TruncatedModule, seeds) -> dict:
    """Smallest action-stable family of subspaces containing the seeds."""
    spaces = {n: Subspace.zero(v.dims[n]) for n in v.window.objects()}
    for n, s in seeds.items():
        n = tuple(n)
        if isinstance(s, Subspace):
            spaces[n] = spaces[n].add(s)
        else:
            spaces[n] = spaces[n].add(Subspace.from_spanning(v.dims[n], s))
    changed = True
    while changed:
        changed = False
        for key in generator_keys(v.window, v.group):
            src = key[2] if key[0] != "swap" else key[3]
            tgt = v._gen_target(key)
            if spaces[src].dim == 0:
                continue
            img_vecs = (v.actions[key] * spaces[src].basis.transpose()).transpose()
            new = spaces[tgt].add(Subspace.from_spanning(v.dims[tgt], img_vecs.rows))
            if new.dim != spaces[tgt].dim:
                spaces[tgt] = new
                changed = True
    return spaces


def submodule_generated(v: TruncatedModule, seeds, name=""):
    """The submodule generated by the seed vectors, with its inclusion."""
    spaces = close_under_actions(v, seeds)
    slots = [
        (tuple(n), None)
        for n, s in seeds.items()
        if (s.dim if isinstance(s, Subspace) else len(list(s))) > 0
    ]
    pres = Presentation.make(slots, None)
    return submodule_from_stable_subspaces(v, spaces, pres, name)


def quotient(v: TruncatedModule, spaces, name="", rel_objects=None):
    """Quotient by an action-stable family of subspaces, with projection.

    ``rel_objects`` names the objects whose vectors generate the family (for
    the transported relation bound); default: every object with a nonzero
    subspace, which is correct but may be needlessly coarse.
    """
    spaces = {tuple(k): s for k, s in spaces.items()}
    projs = {}
    dims = {}
    for n in v.window.objects():
        q = quotient_map(v.dims[n], spaces[n])
        projs[n] = q
        dims[n] = q.nrows
    actions = {}
    for key in generator_keys(v.window, v.group):
        src = key[2] if key[0] != "swap" else key[3]
        tgt = v._gen_target(key)
        # induced action B with B . proj_src = proj_tgt . action
        big = projs[tgt] * v.actions[key]
        sol = solve_matrix(projs[src].transpose(), big.transpose())
        if sol is None:
            raise ValueError(f"subspaces are not action-stable at {key}")
        b = sol.transpose()
        if b * projs[src] != big:
            raise ValueError(f"quotient action ill-defined at {key}")
        actions[key] = b
    pres = None
    if v.presentation is not None:
        if rel_objects is None:
            extra = [n for n, s in spaces.items() if s.dim > 0]
        else:
            extra = [tuple(n) for n in rel_objects]
        rb = v.presentation.relation_bound
        if rb is not None:
            bound = list(rb)
            for n in extra:
                bound = [max(a, b) for a, b in zip(bound, n)]
            pres = Presentation(
                v.presentation.generator_slots,
                tuple(bound),
                v.presentation.observed_only,
            )
    mod = TruncatedModule(v.window, v.group, dims, actions, pres, name)
    proj = ModuleMap(v, mod, projs)
    return mod, proj


def direct_sum(*mods, name="") -> tuple:
    """Direct sum with the canonical inclusion maps."""
    mods = list(mods)
    if not mods:
        raise ValueError("empty direct sum needs an explicit window")
    w = mods[0].window
    g = mods[0].group
    if any(v.window != w or v.group != g for v in mods):
        raise ValueError("summands live on different windows or groups")
    dims = {n: sum(v.dims[n] for v in mods) for n in w.objects()}
    actions = {}
    for key in generator_keys(w, g):
        actions[key] = block_diag([v.actions[key] for v in mods])
    slots = []
    rel = [0] * w.m
    rel_known = True
    for v in mods:
        if v.presentation is None:
            rel_known = False
            continue
        slots.extend(v.presentation.generator_slots)
        if v.presentation.relation_bound is None:
            rel_known = False
        else:
            rel = [max(a, b) for a, b in zip(rel, v.presentation.relation_bound)]
    pres = None
    if all(v.presentation is not None for v in mods):
        observed = any(v.presentation.observed_only for v in mods)
        pres = Presentation(tuple(slots), tuple(rel) if rel_known else None, observed)
    total = TruncatedModule(w, g, dims, actions, pres, name)
    incls = []
    offset = {n: 0 for n in w.objects()}
    for v in mods:
        blocks = {}
        for n in w.objects():
            rowsel = []
            for r in range(dims[n]):
                row = [_ZERO] * v.dims[n]
                if offset[n] <= r < offset[n] + v.dims[n]:
                    row[r - offset[n]] = _ONE
                rowsel.append(row)
            blocks[n] = RationalMatrix(rowsel, dims[n], v.dims[n])
        incls.append(ModuleMap(v, total, blocks))
        for n in w.objects():
            offset[n] += v.dims[n]
    return total, incls


def external_tensor(v: TruncatedModule, w: TruncatedModule, name="") -> TruncatedModule:
    """Objectwise tensor over a product of coordinate sets (v first).

    At most one factor may carry a nontrivial group; the result carries it.
    """
    if not v.group.is_trivial() and not w.group.is_trivial():
        raise ValueError("both factors carry a nontrivial group")
    group = v.group if not v.group.is_trivial() else w.group
    g_on_v = not v.group.is_trivial()
    mv, mw = v.m, w.m
    window = Window(v.window.bound + w.window.bound)
    dims = {}
    for a in v.window.objects():
        for b in w.window.objects():
            dims[a + b] = v.dims[a] * w.dims[b]
    actions = {}
    for key in generator_keys(window, group):
        if key[0] == "incl":
            _, i, nab = key
            a, b = nab[:mv], nab[mv:]
            if i <= mv:
                mat = kron(v.actions[("incl", i, a)], RationalMatrix.identity(w.dims[b]))
            else:
                mat = kron(RationalMatrix.identity(v.dims[a]), w.actions[("incl", i - mv, b)])
        elif key[0] == "swap":
            _, i, k, nab = key
            a, b = nab[:mv], nab[mv:]
            if i <= mv:
                mat = kron(v.actions[("swap", i, k, a)], RationalMatrix.identity(w.dims[b]))
            else:
                mat = kron(RationalMatrix.identity(v.dims[a]), w.actions[("swap", i - mv, k, b)])
        else:
            _, j, nab = key
            a, b = nab[:mv], nab[mv:]
            if g_on_v:
                mat = kron(v.actions[("grp", j, a)], RationalMatrix.identity(w.dims[b]))
            else:
                mat = kron(RationalMatrix.identity(v.dims[a]), w.actions[("grp", j, b)])
        actions[key] = mat
    pres = None
    if v.presentation is not None and w.presentation is not None:
        slots = []
        for (oa, la) in v.presentation.generator_slots:
            for (ob, lb) in w.presentation.generator_slots:
                lab = None
                if la is not None and lb is not None:
                    lab = la + lb
                slots.append((oa + ob, lab))
        rv = v.presentation.total_bound(mv)
        rw = w.presentation.total_bound(mw)
        rel = (rv + rw) if (rv is not None and rw is not None) else None
        observed = v.presentation.observed_only or w.presentation.observed_only
        pres = Presentation(tuple(slots), rel, observed)
    return TruncatedModule(window, group, dims, actions, pres, name)


def restrict_window(v: TruncatedModule, new_window: Window) -> TruncatedModule:
    if not leq(new_window.bound, v.window.bound):
        raise MarginError("can only restrict to a smaller window")
    dims = {n: v.dims[n] for n in new_window.objects()}
    actions = {
        key: v.actions[key] for key in generator_keys(new_window, v.group)
    }
    return TruncatedModule(new_window, v.group, dims, actions, v.presentation, v.name)


def permute_coords(v: TruncatedModule, perm) -> TruncatedModule:
    """Relabel coordinates: new coordinate j carries old coordinate perm[j]
    (1-based).  Pure bookkeeping; dims and matrices are reused."""
    perm = tuple(perm)
    m = v.m
    if sorted(perm) != list(range(1, m + 1)):
        raise ValueError("not a permutation of the coordinates")

    def to_old(n_new):
        return tuple(n_new[perm.index(i + 1)] for i in range(m))

    def to_new(n_old):
        return tuple(n_old[perm[j] - 1] for j in range(m))

    window = Window(to_new(v.window.bound))
    dims = {to_new(n): v.dims[n] for n in v.window.objects()}
    actions = {}
    for key in generator_keys(window, v.group):
        if key[0] == "incl":
            _, i, n = key
            actions[key] = v.actions[("incl", perm[i - 1], to_old(n))]
        elif key[0] == "swap":
            _, i, k, n = key
            actions[key] = v.actions[("swap", perm[i - 1], k, to_old(n))]
        else:
            _, j, n = key
            actions[key] = v.actions[("grp", j, to_old(n))]
    pres = None
    if v.presentation is not None:
        slots = tuple(
            (to_new(obj), None if lab is None else tuple(lab[perm[j] - 1] for j in range(m)))
            for obj, lab in v.presentation.generator_slots
        )
        rb = v.presentation.relation_bound
        pres = Presentation(slots, None if rb is None else to_new(rb),
                            v.presentation.observed_only)
    return TruncatedModule(window, v.group, dims, actions, pres, v.name)


def _tensor_with_const(v: TruncatedModule, dim_x: int) -> TruncatedModule:
    """Objectwise tensor with a fixed vector space (actions on v only)."""
    dims = {n: d * dim_x for n, d in v.dims.items()}
    ident = RationalMatrix.identity(dim_x)
    actions = {k: kron(mat, ident) for k, mat in v.actions.items()}
    return TruncatedModule(v.window, v.group, dims, actions)


def make_induced(lambdas, window: Window, group: GroupTable | None = None,
                 g_rep=None, name: str = "") -> TruncatedModule:
    """The induced module at the Specht data: image of the symmetrizing
    idempotent on (free module) x (outer Specht product) x (group rep).

    ``g_rep`` is a symrep.GroupRep for the group factor (default trivial).
    """
    group = group or GroupTable.trivial()
    lambdas = tuple(tuple(l) for l in lambdas)
    if window.m != len(lambdas):
        raise ValueError("need one partition per coordinate")
    n = tuple(sum(l) for l in lambdas)
    if not window.contains(n):
        raise MarginError(f"generator object {n} lies outside the window")
    if g_rep is None:
        g_rep = GroupRep.trivial(group)
    spechts = [specht(l) for l in lambdas]
    dim_x = prod(r.dim for r in spechts) * g_rep.dim
    base = make_free(n, window, group)
    big = _tensor_with_const(base, dim_x)
    rho_g = g_rep.elements()
    auts = _aut_elements(n)
    norm = Fraction(1, len(auts) * group.order)
    spaces = {}
    for t in window.objects():
        d = big.dims[t]
        if d == 0:
            spaces[t] = Subspace.zero(0)
            continue
        acc = RationalMatrix.zeros(d, d)
        for sigma in auts:
            # pair the right action of (sigma, g) with rho of the inverse,
            # so the diagonal assignment is a homomorphism
            sigma_inv = tuple(invert_perm(si) for si in sigma)
            x_mat = RationalMatrix.identity(1)
            for s, si in zip(spechts, sigma_inv):
                x_mat = kron(x_mat, s.matrix_of_perm(si))
            for g in range(group.order):
                r_mat = _aut_right_action_matrix(n, t, sigma, group, g)
                acc = acc + kron(r_mat, kron(x_mat, rho_g[group.inverse[g]]))
        e = acc.scale(norm)
        assert e * e == e, "symmetrizer failed to be idempotent"
        spaces[t] = image_basis(e)
    pres = Presentation.make([(n, lambdas)], n)
    mod, _ = submodule_from_stable_subspaces(
        big, spaces, pres, name or f"M{lambdas}"
    )
    return mod


def make_coinduced(lambdas, window: Window, group: GroupTable | None = None,
                   name: str = "") -> TruncatedModule:
    """The finite-dimensional injective at the Specht data: invariants of
    the diagonal automorphism action on (co-free) x (outer Specht product).
    The group factor acts trivially, as in make_cofree."""
    group = group or GroupTable.trivial()
    lambdas = tuple(tuple(l) for l in lambdas)
    if window.m != len(lambdas):
        raise ValueError("need one partition per coordinate")
    l = tuple(sum(p) for p in lambdas)
    if not window.contains(l):
        raise MarginError(f"cogenerator object {l} lies outside the window")
    spechts = [specht(p) for p in lambdas]
    dim_x = prod(r.dim for r in spechts)
    base = make_cofree(l, window, group)
    big = _tensor_with_const(base, dim_x)
    auts = _aut_elements(l)
    norm = Fraction(1, len(auts))
    spaces = {}
    for t in window.objects():
        d = big.dims[t]
        if d == 0:
            spaces[t] = Subspace.zero(0)
            continue
        injs = enumerate_injections(t, l) if leq(t, l) else []
        index = injection_index_table(t, l) if leq(t, l) else {}
        nb = base.dims[t]
        acc = RationalMatrix.zeros(d, d)
        for tau in auts:
            tau_mor = Morphism(l, l, tau, 0)
            p_rows = [[_ZERO] * nb for _ in range(nb)]
            for gi, gamma in enumerate(injs):
                moved = compose(tau_mor, gamma)
                p_rows[index[moved.maps]][gi] = _ONE
            p_mat = RationalMatrix(p_rows, nb, nb)
            x_mat = RationalMatrix.identity(1)
            for s, ti in zip(spechts, tau):
                x_mat = kron(x_mat, s.matrix_of_perm(ti))
            acc = acc + kron(p_mat, x_mat)
        e = acc.scale(norm)
        assert e * e == e, "averaging failed to be idempotent"
        spaces[t] = image_basis(e)
    mod, _ = submodule_from_stable_subspaces(big, spaces, None,
                                             name or f"E{lambdas}")
    slots = [
        (t, None) for t in window.objects_by_degree() if mod.dims[t] > 0
    ]
    rel = tuple(x + 1 for x in l)
    mod.presentation = Presentation.make(slots, rel)
    return mod


def aut_rep_at(v: TruncatedModule, n) -> ProductRep:
    """The Aut(n) x G representation carried by the value at n."""
    n = tuple(n)
    swap_mats = {}
    for i in range(1, v.m + 1):
        for k in range(1, n[i - 1]):
            swap_mats[(i, k)] = v.actions[("swap", i, k, n)]
    group_mats = [
        v.actions[("grp", j, n)] for j in range(len(v.group.generators))
    ]
    return ProductRep(
        ns=n, group=v.group, dim=v.dims[n], swap_mats=swap_mats,
        group_mats=group_mats,
    )


# -- the naturality solver -------------------------------------------------


class NaturalitySolver:
    """Parametrizes natural transformations V -> W degree by degree.

    Blocks at an object are determined, through the inclusion generators,
    by blocks below plus new free parameters on a complement of the incoming
    images; automorphism and group generators contribute linear constraints.
    The result is exactly the space of natural transformations between the
    truncated modules.
    """

    def __init__(self, v: TruncatedModule, w: TruncatedModule):
        if v.window != w.window or v.group != w.group:
            raise ValueError("hom requires matching window and group")
        self.v = v
        self.w = w
        self.nparams = 0
        self.coeff = {}
        self.rows = []
        self._build()

    def _add_constraint_matrix(self, combo):
        """combo: dict param -> matrix; one scalar row per entry."""
        shapes = {mat.shape for mat in combo.values()}
        if not shapes:
            return
        (nr, nc) = shapes.pop()
        for r in range(nr):
            for c in range(nc):
                row = {}
                for k, mat in combo.items():
                    val = mat.rows[r][c]
                    if val:
                        row[k] = val
                if row:
                    self.rows.append(row)

    def _same_object_constraints(self, n):
        v, w = self.v, self.w
        keys = []
        for i in range(1, v.m + 1):
            for k in range(1, n[i - 1]):
                keys.append(("swap", i, k, n))
        for j in range(len(v.group.generators)):
            keys.append(("grp", j, n))
        for key in keys:
            va = v.actions[key]
            wa = w.actions[key]
            combo = {}
            for k, mat in self.coeff.get(n, {}).items():
                diff = wa * mat - mat * va
                if not diff.is_zero():
                    combo[k] = diff
            self._add_constraint_matrix(combo)

    def _build(self):
        v, w = self.v, self.w
        for n in v.window.objects_by_degree():
            dv, dw = v.dims[n], w.dims[n]
            incoming = [
                ("incl", i, sub(n, unit(v.m, i)))
                for i in range(1, v.m + 1)
                if n[i - 1] >= 1
            ]
            if not incoming:
                block = {}
                for r in range(dw):
                    for c in range(dv):
                        rows = [[_ZERO] * dv for _ in range(dw)]
                        rows[r][c] = _ONE
                        block[self.nparams] = RationalMatrix(rows, dw, dv)
                        self.nparams += 1
                self.coeff[n] = block
                self._same_object_constraints(n)
                continue
            amats = [v.actions[key] for key in incoming]
            a = amats[0]
            for extra in amats[1:]:
                a = a.hstack(extra)
            q = a.ncols
            # RHS per parameter: W-action times the source block
            cmats = {}
            for key in incoming:
                src = key[2]
                wa = w.actions[key]
                src_coeff = self.coeff.get(src, {})
                width = v.dims[src]
                for k in range(self.nparams):
                    mat = src_coeff.get(k)
                    piece = (
                        RationalMatrix.zeros(dw, width) if mat is None else wa * mat
                    )
                    cmats[k] = piece if k not in cmats else cmats[k].hstack(piece)
            # consistency along column dependencies of a
            ker = kernel_basis(a)
            for kv in ker.basis.rows:
                kv_col = RationalMatrix.column(kv)
                combo = {}
                for k, cm in cmats.items():
                    prod_mat = cm * kv_col
                    if not prod_mat.is_zero():
                        combo[k] = prod_mat
                self._add_constraint_matrix(combo)
            # pivot columns of a give an honest basis of the incoming image
            if dv == 0:
                self.coeff[n] = {}
                self._same_object_constraints(n)
                continue
            red = rref(a)
            pivots = []
            for row in red.rows:
                for j, x in enumerate(row):
                    if x != 0:
                        pivots.append(j)
                        break
            b = RationalMatrix(
                [[a.rows[r][j] for j in pivots] for r in range(dv)], dv, len(pivots)
            )
            ib = image_basis(b) if pivots else Subspace.zero(dv)
            lead_coords = []
            for row in ib.basis.rows:
                for j, x in enumerate(row):
                    if x != 0:
                        lead_coords.append(j)
                        break
            comp_coords = [j for j in range(dv) if j not in lead_coords]
            comp_cols = RationalMatrix(
                [
                    [_ONE if r == j else _ZERO for j in comp_coords]
                    for r in range(dv)
                ],
                dv,
                len(comp_coords),
            )
            mfull = b.hstack(comp_cols) if pivots else comp_cols
            minv = inverse(mfull)
            assert minv is not None, "incoming image plus complement not a basis"
            block = {}
            r_im = len(pivots)
            for k, cm in cmats.items():
                cj = RationalMatrix(
                    [[cm.rows[r][j] for j in pivots] for r in range(dw)],
                    dw,
                    r_im,
                )
                padded = cj.hstack(RationalMatrix.zeros(dw, dv - r_im))
                mat = padded * minv
                if not mat.is_zero():
                    block[k] = mat
            for cidx in range(len(comp_coords)):
                for r in range(dw):
                    sel = [[_ZERO] * dv for _ in range(dw)]
                    sel[r][r_im + cidx] = _ONE
                    block[self.nparams] = RationalMatrix(sel, dw, dv) * minv
                    self.nparams += 1
            self.coeff[n] = block
            self._same_object_constraints(n)

    def _solution_to_map(self, tvec) -> ModuleMap:
        blocks = {}
        for n in self.v.window.objects():
            dv, dw = self.v.dims[n], self.w.dims[n]
            acc = RationalMatrix.zeros(dw, dv)
            for k, mat in self.coeff.get(n, {}).items():
                tk = tvec[k]
                if tk:
                    acc = acc + mat.scale(tk)
            blocks[n] = acc
        return ModuleMap(self.v, self.w, blocks)

    def _constraint_matrix(self) -> RationalMatrix:
        rows = []
        for row in self.rows:
            dense = [_ZERO] * self.nparams
            for k, val in row.items():
                dense[k] = val
            rows.append(dense)
        if not rows:
            return RationalMatrix.zeros(0, self.nparams)
        return RationalMatrix(rows, len(rows), self.nparams)

    def basis(self):
        if self.nparams == 0:
            return []
        ker = kernel_basis(self._constraint_matrix())
        return [self._solution_to_map(t) for t in ker.basis.rows]

    def solve_with_conditions(self, conditions):
        """One natural map satisfying block(n) * r = c for each (n, r, c),
        or None.  Used for extension problems along inclusions."""
        hom_rows = self._constraint_matrix()
        extra_rows = []
        rhs = [_ZERO] * hom_rows.nrows
        for n, rmat, cmat in conditions:
            n = tuple(n)
            combo = self.coeff.get(n, {})
            for r in range(cmat.nrows):
                for c in range(cmat.ncols):
                    dense = [_ZERO] * self.nparams
                    for k, mat in combo.items():
                        val = (mat * rmat).rows[r][c]
                        if val:
                            dense[k] = val
                    extra_rows.append(dense)
                    rhs.append(cmat.rows[r][c])
        full = RationalMatrix(
            list(hom_rows.rows) + extra_rows,
            hom_rows.nrows + len(extra_rows),
            self.nparams,
        )
        sol = solve(full, rhs)
        if sol is None:
            return None
        return self._solution_to_map(sol)


def hom_space(v: TruncatedModule, w: TruncatedModule):
    """A basis of Hom(V, W).

    Requires V to carry a presentation that fits inside the window; then the
    window solution space equals the Hom space of the untruncated modules,
    so the answer is exact rather than an upper bound.
    """
    if v.presentation is None:
        raise MarginError("hom_space requires a presentation on the source")
    if not v.presentation.fits(v.window):
        raise MarginError(
            "presentation degrees exceed the window; the hom space would "
            "only be an upper bound"
        )
    return NaturalitySolver(v, w).basis()


def with_trivial_group_action(v: TruncatedModule, group: GroupTable) -> TruncatedModule:
    """Attach a group factor acting trivially (the group is a direct factor
    of the category, so identity actions are always functorial)."""
    if not v.group.is_trivial():
        raise ValueError("module already carries a group")
    actions = dict(v.actions)
    for key in generator_keys(v.window, group):
        if key[0] == "grp":
            _, _, n = key
            actions[key] = RationalMatrix.identity(v.dims[n])
    return TruncatedModule(v.window, group, dict(v.dims), actions,
                           v.presentation, v.name)
