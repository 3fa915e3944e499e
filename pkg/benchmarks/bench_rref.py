"""Benchmark: compiled elimination kernel vs the pure-Python twin.

Times the integer Gauss-Jordan kernel on seeded random matrices of the kinds
the package produces (dense small-entry and structured 0/1 action-like), and
a package-level workload (an endomorphism ring computation) under each
backend.  Outputs agree bit for bit; only the wall time differs.

Run:  python benchmarks/bench_rref.py
"""

import random
import statistics
import subprocess
import sys
import time


def random_rows(rng, nr, nc, span):
    return [[rng.randint(-span, span) for _ in range(nc)] for _ in range(nr)]


def time_kernel(kernel, cases, repeats=3):
    best = []
    for rows, nc in cases:
        times = []
        for _ in range(repeats):
            work = [r[:] for r in rows]
            t0 = time.perf_counter()
            kernel(work, nc)
            times.append(time.perf_counter() - t0)
        best.append(min(times))
    return sum(best)


def main():
    from fimlab import _rref_py

    try:
        from fimlab import _rref_c
    except ImportError:
        print("compiled kernel not built; run: python setup.py build_ext --inplace")
        return 1

    rng = random.Random(20240815)
    suites = {
        "dense 40x40": [(random_rows(rng, 40, 40, 9), 40) for _ in range(6)],
        "dense 80x80": [(random_rows(rng, 80, 80, 9), 80) for _ in range(3)],
        "tall 160x60": [(random_rows(rng, 160, 60, 4), 60) for _ in range(3)],
        "0/1 action 120x120": [
            (
                [
                    [1 if rng.random() < 0.05 else 0 for _ in range(120)]
                    for _ in range(120)
                ],
                120,
            )
            for _ in range(3)
        ],
    }
    print(f"{'case':>22} {'pure (s)':>10} {'compiled (s)':>13} {'speedup':>8}")
    for name, cases in suites.items():
        # verify agreement before timing
        for rows, nc in cases:
            assert _rref_c.rref_int([r[:] for r in rows], nc) == _rref_py.rref_int(
                [r[:] for r in rows], nc
            ), "backend outputs diverged"
        t_pure = time_kernel(_rref_py.rref_int, cases)
        t_comp = time_kernel(_rref_c.rref_int, cases)
        print(f"{name:>22} {t_pure:>10.4f} {t_comp:>13.4f} {t_pure / t_comp:>7.2f}x")

    # package-level workload under each backend (separate processes so the
    # import-time selection applies)
    snippet = (
        "import time; t0=time.perf_counter();"
        "from fimlab.suites import suite_thm4_10, suite_thm2;"
        "assert suite_thm4_10().passed and suite_thm2().passed;"
        "print(time.perf_counter()-t0)"
    )
    times = {}
    for label, env_val in (("compiled", "0"), ("pure", "1")):
        vals = []
        for _ in range(3):
            out = subprocess.run(
                [sys.executable, "-c", snippet],
                capture_output=True,
                text=True,
                env={"FIMLAB_PURE": env_val, "PATH": "/usr/bin:/bin"},
            )
            if out.returncode != 0:
                print(out.stderr)
                return 1
            vals.append(float(out.stdout.strip().splitlines()[-1]))
        times[label] = statistics.median(vals)
    print(
        f"{'thm4.10+thm2 suites':>22} {times['pure']:>10.4f} "
        f"{times['compiled']:>13.4f} {times['pure'] / times['compiled']:>7.2f}x"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
