"""Shift, kernel and derivative functors, their composites over coordinate
subsets, the induced-module functor, and the group induction/restriction
pair with its averaging splitting.

Window accounting: one application of the shift in coordinate i consumes one
unit of window in that coordinate; operations raise MarginError instead of
returning boundary data of unknown validity.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .category import (
    GroupTable,
    Morphism,
    Window,
    add,
    compose,
    enumerate_injections,
    generator_keys,
    injection_index_table,
    invert_perm,
    leq,
    sub,
    unit,
)
from .linalg import (
    RationalMatrix,
    Subspace,
    image_basis,
    kernel_basis,
    kron,
)
from .modules import (
    MarginError,
    ModuleMap,
    Presentation,
    TruncatedModule,
    direct_sum,
    make_free,
    quotient,
    restrict_window,
    submodule_from_stable_subspaces,
    zero_module,
)

_ONE = Fraction(1)
_ZERO = Fraction(0)


def normalize_subset(S, m: int) -> tuple:
    S = tuple(sorted(set(int(i) for i in S)))
    if not S:
        raise ValueError("coordinate subset must be nonempty")
    if any(not (1 <= i <= m) for i in S):
        raise ValueError(f"subset {S} out of range for m={m}")
    return S


def complement_subset(S, m: int) -> tuple:
    return tuple(i for i in range(1, m + 1) if i not in set(S))


# -- the shift functor -----------------------------------------------------


def shift(v: TruncatedModule, i: int) -> TruncatedModule:
    """Precompose with the self-embedding adding one point in coordinate i.

    The only generator whose transport needs a non-generator morphism is the
    coordinate-i inclusion, where the added point forces one extra adjacent
    swap: V(iota(incl_i)) = V(swap_(i,1)) V(incl_i) one level up.
    """
    m = v.m
    if v.window.bound[i - 1] < 1:
        raise MarginError(f"window margin exhausted in coordinate {i}")
    oi = unit(m, i)
    new_window = Window(sub(v.window.bound, oi))
    dims = {n: v.dims[add(n, oi)] for n in new_window.objects()}
    actions = {}
    for key in generator_keys(new_window, v.group):
        if key[0] == "incl":
            _, j, n = key
            up = add(n, oi)
            if j != i:
                actions[key] = v.actions[("incl", j, up)]
            else:
                upi = add(up, oi)
                actions[key] = (
                    v.actions[("swap", i, 1, upi)] * v.actions[("incl", i, up)]
                )
        elif key[0] == "swap":
            _, j, k, n = key
            up = add(n, oi)
            if j != i:
                actions[key] = v.actions[("swap", j, k, up)]
            else:
                actions[key] = v.actions[("swap", i, k + 1, up)]
        else:
            _, j, n = key
            actions[key] = v.actions[("grp", j, add(n, oi))]
    pres = v.presentation
    if pres is not None:
        # shifting preserves generation and relation degree bounds
        pres = Presentation(pres.generator_slots, pres.relation_bound,
                            pres.observed_only)
    return TruncatedModule(new_window, v.group, dims, actions, pres,
                           f"Shift{i}({v.name})" if v.name else "")


def canonical_map(v: TruncatedModule, i: int) -> ModuleMap:
    """The natural transformation V -> Shift_i V (blocks: inclusion action)."""
    shifted = shift(v, i)
    restricted = restrict_window(v, shifted.window)
    blocks = {
        n: v.actions[("incl", i, n)] for n in shifted.window.objects()
    }
    return ModuleMap(restricted, shifted, blocks)


def kernel_functor(v: TruncatedModule, i: int) -> TruncatedModule:
    """K_i V: objectwise kernel of the canonical map, with its actions."""
    can = canonical_map(v, i)
    spaces = {n: kernel_basis(b) for n, b in can.blocks.items()}
    mod, _ = submodule_from_stable_subspaces(can.source, spaces, None,
                                             f"K{i}({v.name})" if v.name else "")
    return mod


def derivative(v: TruncatedModule, i: int) -> TruncatedModule:
    """D_i V: objectwise cokernel of the canonical map."""
    can = canonical_map(v, i)
    spaces = {n: image_basis(b) for n, b in can.blocks.items()}
    mod, _ = quotient(can.target, spaces,
                      name=f"D{i}({v.name})" if v.name else "")
    mod.presentation = _derivative_presentation(v.presentation, i, v.m)
    return mod


def _derivative_presentation(pres, i: int, m: int):
    if pres is None:
        return None
    slots = []
    for obj, lab in pres.generator_slots:
        if obj[i - 1] >= 1:
            slots.append((sub(obj, unit(m, i)), None))
    rb = pres.relation_bound
    if rb is not None:
        rb = tuple(max(0, x - (1 if j == i - 1 else 0)) for j, x in enumerate(rb))
    return Presentation(tuple(slots), rb, pres.observed_only)


def exact_four_term_check(v: TruncatedModule, i: int) -> bool:
    """0 -> K_i V -> V -> Shift_i V -> D_i V -> 0 is objectwise exact."""
    can = canonical_map(v, i)
    k = kernel_functor(v, i)
    d = derivative(v, i)
    for n in can.source.window.objects():
        r = can.source.dims[n] - k.dims[n]
        if r != len(
            [1 for row in image_basis(can.blocks[n]).basis.rows]
        ):
            return False
        if can.target.dims[n] - r != d.dims[n]:
            return False
    return True


# -- composites over a subset ---------------------------------------------


def shift_prod(v: TruncatedModule, S, n: int) -> TruncatedModule:
    """(prod_{i in S} Shift_i)^n; ascending coordinate order (the two orders
    produce identical data, asserted in the test suite)."""
    S = normalize_subset(S, v.m)
    if n < 0:
        raise ValueError("negative shift power")
    for i in S:
        if v.window.bound[i - 1] < n:
            raise MarginError(
                f"window cannot absorb {n} shifts in coordinate {i}"
            )
    out = v
    for _ in range(n):
        for i in S:
            out = shift(out, i)
    return out


def _common_reduced_window(v: TruncatedModule, S) -> Window:
    bound = list(v.window.bound)
    for i in S:
        bound[i - 1] -= 1
        if bound[i - 1] < 0:
            raise MarginError(f"window margin exhausted in coordinate {i}")
    return Window(tuple(bound))


def shift_sum(v: TruncatedModule, S) -> TruncatedModule:
    """The direct sum of the coordinate shifts over S, on the common
    reduced window."""
    S = normalize_subset(S, v.m)
    w = _common_reduced_window(v, S)
    total, _ = direct_sum(*[restrict_window(shift(v, i), w) for i in S])
    return total


def derivative_sum(v: TruncatedModule, S) -> TruncatedModule:
    S = normalize_subset(S, v.m)
    w = _common_reduced_window(v, S)
    total, _ = direct_sum(*[restrict_window(derivative(v, i), w) for i in S])
    return total


def kernel_sum(v: TruncatedModule, S) -> TruncatedModule:
    S = normalize_subset(S, v.m)
    w = _common_reduced_window(v, S)
    total, _ = direct_sum(*[restrict_window(kernel_functor(v, i), w) for i in S])
    return total


# -- group factor: aut tables, Ind/Res, averaging --------------------------


def aut_table(s) -> GroupTable:
    """Aut(s) = S_{s_1} x ... x S_{s_k} as a table group, left-fold order."""
    table = GroupTable.trivial()
    for x in s:
        table = GroupTable.product(table, GroupTable.symmetric(x))
    return table


def aut_element_index(s, sigma) -> int:
    """Index of (sigma_1, ..., sigma_k) in aut_table(s)."""
    idx = 0
    for x, si in zip(s, sigma):
        perms = list(itertools.permutations(range(1, x + 1)))
        idx = idx * len(perms) + perms.index(tuple(si))
    return idx


def rs_group(s, group: GroupTable) -> GroupTable:
    """Aut(s) x G: the group carried by slice modules at s."""
    return GroupTable.product(aut_table(s), group)


def ind(v: TruncatedModule, group: GroupTable) -> TruncatedModule:
    """V (x) kG: multiply dims by |G| with the left regular action.

    The basis pairs each basis vector with the group elements, group index
    fastest, matching the free-module convention.
    """
    if not v.group.is_trivial():
        raise ValueError("ind expects a module with trivial group factor")
    if group.is_trivial():
        return v
    og = group.order
    ident_g = RationalMatrix.identity(og)
    dims = {n: d * og for n, d in v.dims.items()}
    actions = {}
    for key in generator_keys(v.window, group):
        if key[0] == "grp":
            _, j, n = key
            g = group.generators[j]
            lreg = [[_ZERO] * og for _ in range(og)]
            for h in range(og):
                lreg[group.mult[g][h]][h] = _ONE
            actions[key] = kron(
                RationalMatrix.identity(v.dims[n]), RationalMatrix(lreg, og, og)
            )
        else:
            actions[key] = kron(v.actions[key], ident_g)
    return TruncatedModule(v.window, group, dims, actions, v.presentation,
                           f"Ind({v.name})" if v.name else "")


def res(v: TruncatedModule) -> TruncatedModule:
    """Forget the group action (the categories share objects)."""
    triv = GroupTable.trivial()
    actions = {
        key: v.actions[key]
        for key in generator_keys(v.window, triv)
    }
    return TruncatedModule(v.window, triv, dict(v.dims), actions,
                           v.presentation, f"Res({v.name})" if v.name else "")


def averaging_splitting(v: TruncatedModule):
    """The pair phi: V -> Ind(Res V), eps: Ind(Res V) -> V with
    eps o phi = id; phi averages over the group orbit."""
    group = v.group
    w = ind(res(v), group)
    og = group.order
    inv_norm = Fraction(1, og)
    phi_blocks = {}
    eps_blocks = {}
    for n in v.window.objects():
        d = v.dims[n]
        rho = v.group_elements_at(n) if d else {0: RationalMatrix.identity(0)}
        phi = [[_ZERO] * d for _ in range(d * og)]
        eps = [[_ZERO] * (d * og) for _ in range(d)]
        for g in range(og):
            rg = rho.get(g, RationalMatrix.identity(d)) if d else None
            rginv = rho.get(group.inverse[g]) if d else None
            for b in range(d):
                for bp in range(d):
                    val = rginv.rows[bp][b]
                    if val:
                        phi[bp * og + g][b] = val * inv_norm
                    ev = rg.rows[bp][b]
                    if ev:
                        eps[bp][b * og + g] = ev
        phi_blocks[n] = RationalMatrix(phi, d * og, d)
        eps_blocks[n] = RationalMatrix(eps, d, d * og)
    phi_map = ModuleMap(v, w, phi_blocks)
    eps_map = ModuleMap(w, v, eps_blocks)
    return phi_map, eps_map


# -- the induced module functor F_s ----------------------------------------


def interleave(S, not_S, s_part, t_part) -> tuple:
    m = len(S) + len(not_S)
    out = [0] * m
    for pos, i in enumerate(S):
        out[i - 1] = s_part[pos]
    for pos, i in enumerate(not_S):
        out[i - 1] = t_part[pos]
    return tuple(out)


def split_obj(n, S, not_S):
    return (
        tuple(n[i - 1] for i in S),
        tuple(n[i - 1] for i in not_S),
    )


def induced_module(s, S, w_rs: TruncatedModule, group: GroupTable,
                   window: Window, name: str = "") -> TruncatedModule:
    """F_s(W): the induced module of an R_s-module along the coordinate
    subset S.

    ``w_rs`` lives over the complement coordinates and carries the product
    group Aut(s) x G (aut generators first); the value of the result at
    (s' x t) is the Aut(s)-balanced tensor of the free module at s with
    W(t), realized as the image of the averaging idempotent.
    """
    m = window.m
    S = normalize_subset(S, m)
    not_S = complement_subset(S, m)
    s = tuple(s)
    if len(s) != len(S):
        raise ValueError("inducing object must match the subset length")
    if w_rs.m != len(not_S):
        raise ValueError("R_s module has wrong number of coordinates")
    expected_group = rs_group(s, group)
    if w_rs.group != expected_group:
        raise ValueError("R_s module must carry the group Aut(s) x G")
    for pos, i in enumerate(not_S):
        if window.bound[i - 1] != w_rs.window.bound[pos]:
            raise ValueError("window mismatch on complement coordinates")
    for pos, i in enumerate(S):
        if window.bound[i - 1] < s[pos]:
            raise MarginError("window too small for the inducing object")

    auts = list(itertools.product(
        *[itertools.permutations(range(1, x + 1)) for x in s]
    ))
    og = group.order
    aut_order = len(auts)

    def w_rho(t):
        return w_rs.group_elements_at(t)

    # big space at (s' x t): Inj(s, s') x W(t); idempotent image subspaces
    spaces = {}
    big_dims = {}
    svals = {}
    for n in window.objects():
        s_part, t_part = split_obj(n, S, not_S)
        svals[n] = (s_part, t_part)
        if not leq(s, s_part):
            big_dims[n] = 0
            spaces[n] = Subspace.zero(0)
            continue
        ninj = len(enumerate_injections(s, s_part))
        dw = w_rs.dims[t_part]
        d = ninj * dw
        big_dims[n] = d
        if d == 0:
            spaces[n] = Subspace.zero(0)
            continue
        rho = w_rho(t_part)
        acc = RationalMatrix.zeros(d, d)
        injs = enumerate_injections(s, s_part)
        index = injection_index_table(s, s_part)
        for sigma in auts:
            sig_mor = Morphism(s, s, sigma, 0)
            perm = [[_ZERO] * ninj for _ in range(ninj)]
            for bi, beta in enumerate(injs):
                perm[index[compose(beta, sig_mor).maps]][bi] = _ONE
            # right action of sigma pairs with rho of (sigma^{-1}, 1_G)
            sigma_inv = tuple(invert_perm(si) for si in sigma)
            gp_idx = aut_element_index(s, sigma_inv) * og
            acc = acc + kron(RationalMatrix(perm, ninj, ninj), rho[gp_idx])
        e = acc.scale(Fraction(1, aut_order))
        assert e * e == e, "averaging idempotent failed"
        spaces[n] = image_basis(e)

    # generator actions on the big spaces, then restrict
    big_actions = {}
    for key in generator_keys(window, group):
        src = key[2] if key[0] != "swap" else key[3]
        if key[0] == "incl":
            tgt = add(src, unit(m, key[1]))
        else:
            tgt = src
        ds, dt = big_dims[src], big_dims[tgt]
        if ds == 0 or dt == 0:
            big_actions[key] = RationalMatrix.zeros(dt, ds)
            continue
        s_src, t_src = svals[src]
        s_tgt, t_tgt = svals[tgt]
        ninj_src = len(enumerate_injections(s, s_src))
        dw_src = w_rs.dims[t_src]
        if key[0] == "grp":
            j = key[1]
            # G sits after the aut generators in the product group
            wkey = ("grp", len(aut_table(s).generators) + j, t_src)
            big_actions[key] = kron(
                RationalMatrix.identity(ninj_src), w_rs.actions[wkey]
            )
            continue
        i = key[1]
        if i in S:
            pos = S.index(i)
            gen_one = _coordinate_gen_morphism(key, s_src, s_tgt, pos)
            index_tgt = injection_index_table(s, s_tgt)
            injs_src = enumerate_injections(s, s_src)
            ninj_tgt = len(enumerate_injections(s, s_tgt))
            perm = [[_ZERO] * ninj_src for _ in range(ninj_tgt)]
            for bi, beta in enumerate(injs_src):
                perm[index_tgt[compose(gen_one, beta).maps]][bi] = _ONE
            big_actions[key] = kron(
                RationalMatrix(perm, ninj_tgt, ninj_src),
                RationalMatrix.identity(dw_src),
            )
        else:
            pos = not_S.index(i)
            if key[0] == "incl":
                wkey = ("incl", pos + 1, t_src)
            else:
                wkey = ("swap", pos + 1, key[2], t_src)
            big_actions[key] = kron(
                RationalMatrix.identity(ninj_src), w_rs.actions[wkey]
            )

    big = TruncatedModule(window, group, big_dims, big_actions)
    pres = _induced_presentation(s, S, not_S, w_rs, m)
    mod, _ = submodule_from_stable_subspaces(big, spaces, pres,
                                             name or f"F_{s}({w_rs.name})")
    return mod


def _coordinate_gen_morphism(key, s_src, s_tgt, pos):
    """The S-part morphism of an S-coordinate generator, as a morphism of
    the S-split objects."""
    if key[0] == "incl":
        maps = []
        for p, a in enumerate(s_src):
            if p == pos:
                maps.append(tuple(range(2, a + 2)))
            else:
                maps.append(tuple(range(1, a + 1)))
        return Morphism(s_src, s_tgt, tuple(maps), 0)
    _, _, k, _ = key
    maps = []
    for p, a in enumerate(s_src):
        img = list(range(1, a + 1))
        if p == pos:
            img[k - 1], img[k] = img[k], img[k - 1]
        maps.append(tuple(img))
    return Morphism(s_src, s_tgt, tuple(maps), 0)


def _induced_presentation(s, S, not_S, w_rs, m):
    if w_rs.presentation is None:
        return None
    slots = []
    for obj, _ in w_rs.presentation.generator_slots:
        slots.append((interleave(S, not_S, s, obj), None))
    rb = w_rs.presentation.relation_bound
    rel = None if rb is None else interleave(S, not_S, s, rb)
    return Presentation(tuple(slots), rel, w_rs.presentation.observed_only)


# -- explicit free-module decompositions (shift and derivative) ------------


def _column_select(mat: RationalMatrix, cols) -> RationalMatrix:
    return RationalMatrix(
        [[row[c] for c in cols] for row in mat.rows], mat.nrows, len(cols)
    )


def shift_free_decomposition(n, i: int, window: Window,
                             group: GroupTable | None = None):
    """The explicit isomorphism M(n) + M(n - o_i)^(n_i) -> Shift_i M(n).

    A basis injection into t + o_i either misses the new point (the M(n)
    part, shift all targets down by one) or hits it at x0 (copy x0 of the
    M(n - o_i) part).  Returns (iso, big, shifted).
    """
    group = group or GroupTable.trivial()
    n = tuple(n)
    m = len(n)
    free = make_free(n, window, group)
    shifted = shift(free, i)
    w2 = shifted.window
    og = group.order
    parts = [restrict_window(free, w2)]
    lower = sub(n, unit(m, i)) if n[i - 1] >= 1 else None
    for _ in range(n[i - 1]):
        parts.append(make_free(lower, w2, group))
    big, _ = direct_sum(*parts)
    blocks = {}
    for t in w2.objects():
        up = add(t, unit(m, i))
        rows = shifted.dims[t]
        cols = big.dims[t]
        mat = [[_ZERO] * cols for _ in range(rows)]
        if rows:
            index_up = injection_index_table(n, up)
            # part 0: M(n)(t): compose with (x -> x+1) in coordinate i
            offset = 0
            if leq(n, t):
                for bi, beta in enumerate(enumerate_injections(n, t)):
                    maps = []
                    for j, img in enumerate(beta.maps):
                        if j == i - 1:
                            maps.append(tuple(x + 1 for x in img))
                        else:
                            maps.append(img)
                    ti = index_up[tuple(maps)]
                    for h in range(og):
                        mat[ti * og + h][offset + bi * og + h] = _ONE
                offset += free.dims[t]
            # parts x0 = 1..n_i: insert the new point as image of x0
            if lower is not None and leq(lower, t):
                low_injs = enumerate_injections(lower, t)
                for x0 in range(1, n[i - 1] + 1):
                    for bi, beta in enumerate(low_injs):
                        maps = []
                        for j, img in enumerate(beta.maps):
                            if j == i - 1:
                                full = []
                                for y in range(1, n[i - 1] + 1):
                                    if y == x0:
                                        full.append(1)
                                    elif y < x0:
                                        full.append(img[y - 1] + 1)
                                    else:
                                        full.append(img[y - 2] + 1)
                                maps.append(tuple(full))
                            else:
                                maps.append(img)
                        ti = index_up[tuple(maps)]
                        for h in range(og):
                            mat[ti * og + h][offset + bi * og + h] = _ONE
                    offset += len(low_injs) * og
        blocks[t] = RationalMatrix(mat, rows, cols)
    iso = ModuleMap(big, shifted, blocks)
    return iso, big, shifted


def derivative_free_decomposition(n, i: int, window: Window,
                                  group: GroupTable | None = None):
    """The explicit isomorphism M(n - o_i)^(n_i) -> D_i M(n) induced by the
    shift decomposition.  Returns (iso, big, derived)."""
    group = group or GroupTable.trivial()
    n = tuple(n)
    m = len(n)
    free = make_free(n, window, group)
    can = canonical_map(free, i)
    spaces = {t: image_basis(b) for t, b in can.blocks.items()}
    derived, proj = quotient(can.target, spaces)
    iso_all, big_all, shifted = shift_free_decomposition(n, i, window, group)
    w2 = shifted.window
    lower = sub(n, unit(m, i)) if n[i - 1] >= 1 else None
    parts = [make_free(lower, w2, group) for _ in range(n[i - 1])]
    if parts:
        big, _ = direct_sum(*parts)
    else:
        big = zero_module(w2, group)
    og = group.order
    blocks = {}
    for t in w2.objects():
        first_width = free.dims[t]  # restricted M(n) columns come first
        cols = list(range(first_width, big_all.dims[t]))
        mat = proj.blocks[t] * _column_select(iso_all.blocks[t], cols)
        blocks[t] = mat
    iso = ModuleMap(big, derived, blocks)
    return iso, big, derived
