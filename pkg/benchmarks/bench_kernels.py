"""Compare the numba and numpy shear-transport kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--rows 100 1000 10000]

Each relator of the bundled fixtures is compiled once; both kernels then
transport the same seeded batch.  The numba timing excludes the first call,
which pays for compilation.  Results must agree to rounding.
"""
import argparse
import time

import numpy as np

from qptolemy import _kernels
from qptolemy.catalog import load_fixture
from qptolemy.extension import relations_of
from qptolemy.shear import compile_word, random_points


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--rows", type=int, nargs="+", default=[100, 1000, 10000])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if _kernels._run_program_nb is None:
        raise SystemExit("numba is not installed; nothing to compare")

    print(f"{'relator':<10} {'length':>6} {'rows':>6} {'numpy ms':>9} {'numba ms':>9} {'speedup':>8} {'max diff':>9}")
    for name in ("torus", "sphere"):
        d = load_fixture(name)
        for spec in relations_of(d):
            if not spec.script:
                continue
            w = d.resolve(f"relator:{spec.kind}")
            program, table = compile_word(w)
            for rows in args.rows:
                pts = random_points(w.source.n_arcs, rows, args.seed)
                t0 = time.perf_counter()
                ref_nb = _kernels.run_program(pts, program, table, use_numba=True)
                first = time.perf_counter() - t0
                ref_np = _kernels.run_program(pts, program, table, use_numba=False)
                t_np = best_of(lambda: _kernels.run_program(pts, program, table, use_numba=False), args.repeat)
                t_nb = best_of(lambda: _kernels.run_program(pts, program, table, use_numba=True), args.repeat)
                diff = float(np.max(np.abs(ref_nb - ref_np)))
                print(f"{spec.kind:<10} {len(w):>6} {rows:>6} {1e3 * t_np:>9.2f} {1e3 * t_nb:>9.2f}"
                      f" {t_np / t_nb:>7.1f}x {diff:>9.1e}")
    print(f"(first numba call of the last row: {1e3 * first:.1f} ms)")


if __name__ == "__main__":
    main()
