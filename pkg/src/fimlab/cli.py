"""The fimlab command line interface.

Exit code 0 means every assertion of the invoked command passed; a nonzero
exit reports the first failure, with a JSON report on standard output.

Config files use a plain key=value format (# comments allowed):

    window = 4,4
    m = 2
    group = /path/to/group.json
    seed = 42

Command-line flags override config values.
"""

from __future__ import annotations

import argparse
import json
import sys

from .category import GroupTable, Window
from .modules import (
    TruncatedModule,
    external_tensor,
    make_cofree,
    make_coinduced,
    make_free,
    make_induced,
)
from .functors import (
    derivative,
    derivative_sum,
    kernel_functor,
    kernel_sum,
    shift,
    shift_sum,
)
from .homology import detect_torsion, h1
from .theorems import cogenerate, end_ring, shift_theorem_search
from .suites import ALIASES, SUITES, run_all, run_suite


def load_config(path) -> dict:
    out = {}
    if path is None:
        return out
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw.rstrip()}")
            key, val = (x.strip() for x in line.split("=", 1))
            out[key] = val
    return out


def parse_coords(text) -> tuple:
    return tuple(int(x) for x in str(text).split(",") if x != "")


def _emit(payload, code: int) -> int:
    print(json.dumps(payload, sort_keys=True, indent=1))
    return code


def _load_group(arg, config) -> GroupTable:
    path = arg or config.get("group")
    if path is None:
        return GroupTable.trivial()
    with open(path) as fh:
        return GroupTable.from_dict(json.load(fh))


def _window_from(args, config) -> Window:
    text = getattr(args, "window", None) or config.get("window")
    if text is None:
        raise SystemExit("a window is required (--window or config)")
    return Window(parse_coords(text))


def cmd_validate(args) -> int:
    mod = TruncatedModule.load(args.module)
    report = mod.validate(deep=args.deep)
    payload = {"ok": report.ok, "failures": report.failures[:10]}
    return _emit(payload, 0 if report.ok else 1)


def cmd_build(args) -> int:
    config = load_config(args.config)
    group = _load_group(args.group, config)
    if args.kind == "tensor":
        a = TruncatedModule.load(args.inputs[0])
        b = TruncatedModule.load(args.inputs[1])
        mod = external_tensor(a, b)
    else:
        window = _window_from(args, config)
        if args.kind == "free":
            mod = make_free(parse_coords(args.n), window, group)
        elif args.kind == "cofree":
            mod = make_cofree(parse_coords(args.l), window, group)
        elif args.kind == "induced":
            lambdas = tuple(tuple(p) for p in json.loads(args.lambdas))
            mod = make_induced(lambdas, window, group)
        elif args.kind == "coinduced":
            lambdas = tuple(tuple(p) for p in json.loads(args.lambdas))
            mod = make_coinduced(lambdas, window, group)
        else:
            raise SystemExit(f"unknown build kind {args.kind}")
    mod.save(args.output)
    dims = {str(k): v for k, v in sorted(mod.dims.items())}
    return _emit({"written": args.output, "dims": dims}, 0)


def cmd_functor(args) -> int:
    mod = TruncatedModule.load(args.module)
    coords = parse_coords(args.i)
    if args.op == "shift":
        out = shift(mod, coords[0]) if len(coords) == 1 else shift_sum(mod, coords)
    elif args.op == "derivative":
        out = (
            derivative(mod, coords[0])
            if len(coords) == 1
            else derivative_sum(mod, coords)
        )
    else:
        out = (
            kernel_functor(mod, coords[0])
            if len(coords) == 1
            else kernel_sum(mod, coords)
        )
    out.save(args.output)
    dims = {str(k): v for k, v in sorted(out.dims.items())}
    return _emit({"written": args.output, "dims": dims}, 0)


def cmd_homology(args) -> int:
    mod = TruncatedModule.load(args.module)
    rep = h1(mod, parse_coords(args.S))
    return _emit(rep.to_dict(), 0)


def cmd_torsion(args) -> int:
    mod = TruncatedModule.load(args.module)
    verdict = detect_torsion(mod, parse_coords(args.S))
    return _emit(verdict.to_dict(), 0)


def cmd_shift_theorem(args) -> int:
    mod = TruncatedModule.load(args.module)
    result = shift_theorem_search(mod, parse_coords(args.S), args.max_n)
    payload = {"n": result.n, "status": result.status, "log": result.log}
    return _emit(payload, 0 if result.conclusive else 1)


def cmd_cogenerate(args) -> int:
    mod = TruncatedModule.load(args.module)
    wit = cogenerate(mod, max_shift=args.max_shift)
    payload = {
        "status": wit.status,
        "members": [m.describe() for m in wit.members],
        "verified": wit.verify(),
        "window": list(wit.window.bound) if wit.window else None,
        "notes": wit.notes,
    }
    return _emit(payload, 0 if payload["verified"] else 1)


def cmd_endring(args) -> int:
    mod = TruncatedModule.load(args.module)
    er = end_ring(mod)
    payload = {
        "dim": er.dim,
        "radical_dim": er.radical_dim,
        "is_local": er.is_local,
        "idempotent_found": er.idempotent_coords is not None,
        "search_exhausted": er.search_exhausted,
    }
    return _emit(payload, 0)


def cmd_verify_paper(args) -> int:
    config = load_config(args.config)
    seed = args.seed if args.seed is not None else int(config.get("seed", 0))
    if args.suite == "all":
        reports = run_all(seed=seed)
    else:
        reports = [run_suite(args.suite, seed=seed)]
    payload = {
        "passed": all(r.passed for r in reports),
        "suites": [r.to_dict() for r in reports],
    }
    for r in reports:
        for c in r.checks:
            mark = "pass" if c.ok else "FAIL"
            print(f"[{mark}] {r.suite}: {c.name}", file=sys.stderr)
    return _emit(payload, 0 if payload["passed"] else 1)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fimlab")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a module file")
    v.add_argument("module")
    v.add_argument("--deep", action="store_true")
    v.set_defaults(func=cmd_validate)

    b = sub.add_parser("build", help="construct a module and write it")
    b.add_argument("kind", choices=["free", "induced", "cofree", "coinduced", "tensor"])
    b.add_argument("inputs", nargs="*", help="input modules for tensor")
    b.add_argument("--n", help="object for free, e.g. 1,0")
    b.add_argument("--l", help="object for cofree")
    b.add_argument("--lambdas", help='partitions as JSON, e.g. "[[2],[1,1]]"')
    b.add_argument("--window", help="window bound, e.g. 3,3")
    b.add_argument("--group", help="group table JSON file")
    b.add_argument("--config", help="key=value config file")
    b.add_argument("-o", "--output", required=True)
    b.set_defaults(func=cmd_build)

    for op in ("shift", "derivative", "kernel"):
        f = sub.add_parser(op, help=f"apply the {op} functor")
        f.add_argument("module")
        f.add_argument("-i", required=True, help="coordinate or comma subset")
        f.add_argument("-o", "--output", required=True)
        f.set_defaults(func=cmd_functor, op=op)

    h = sub.add_parser("homology", help="H0/H1 report along S")
    h.add_argument("module")
    h.add_argument("--S", required=True)
    h.set_defaults(func=cmd_homology)

    t = sub.add_parser("torsion", help="detect S-torsion")
    t.add_argument("module")
    t.add_argument("--S", required=True)
    t.set_defaults(func=cmd_torsion)

    st = sub.add_parser("shift-theorem", help="search for a semi-induced shift")
    st.add_argument("module")
    st.add_argument("--S", required=True)
    st.add_argument("--max-n", type=int, default=4)
    st.set_defaults(func=cmd_shift_theorem)

    cg = sub.add_parser("cogenerate", help="embed into injective members")
    cg.add_argument("module")
    cg.add_argument("--max-shift", type=int, default=3)
    cg.set_defaults(func=cmd_cogenerate)

    er = sub.add_parser("endring", help="endomorphism ring data")
    er.add_argument("module")
    er.set_defaults(func=cmd_endring)

    vp = sub.add_parser("verify-paper", help="run a verification suite")
    vp.add_argument(
        "--suite",
        required=True,
        help="one of %s, an alias (%s), or 'all'"
        % (sorted(SUITES), sorted(ALIASES)),
    )
    vp.add_argument("--window", help="accepted for compatibility; suites pin windows")
    vp.add_argument("--seed", type=int)
    vp.add_argument("--config", help="key=value config file")
    vp.set_defaults(func=cmd_verify_paper)

    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surface a JSON error report, nonzero exit
        print(json.dumps({"error": str(exc), "type": type(exc).__name__}))
        return 2


if __name__ == "__main__":
    sys.exit(main())
