"""Wall-clock comparison of the numba and numpy propagation kernels.

    python benchmarks/bench_backends.py [--sizes 10000,100000,1000000] [--repeat 5]

Prints one row per (n, backend): best-of-``repeat`` solve time, the
time per literal, and the numba speed-up.  Results are checked for equality
before timing.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hornfall._accel import NUMBA_AVAILABLE
from hornfall.formula import DensityVector, sample_ensemble
from hornfall.kernels import propagate


def best_time(f, backend: str, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        propagate(f.n, f.heads, f.body_ptr, f.body, backend=backend)
        best = min(best, time.perf_counter() - t)
    return best


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="10000,100000,1000000")
    ap.add_argument("--d", default="0.1,0,3.0", help="densities d1,...,dk")
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    if not NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed; nothing to compare")

    dv = DensityVector(tuple(float(x) for x in args.d.split(",")))
    print(f"{'n':>9} {'literals':>10} {'backend':>7} {'best_ms':>9} {'ns/lit':>7} {'speedup':>7}")
    for n in (int(x) for x in args.sizes.split(",")):
        f = sample_ensemble(n, dv, args.seed).formula
        a = propagate(f.n, f.heads, f.body_ptr, f.body, backend="numba")
        b = propagate(f.n, f.heads, f.body_ptr, f.body, backend="numpy")
        assert np.array_equal(a[0], b[0]) and a[1:] == b[1:], "backends disagree"
        t_nb = best_time(f, "numba", args.repeat)
        t_np = best_time(f, "numpy", args.repeat)
        lits = f.literal_count
        for name, t in (("numba", t_nb), ("numpy", t_np)):
            speed = f"{t_np / t_nb:7.1f}" if name == "numba" else f"{'':>7}"
            print(f"{n:>9} {lits:>10} {name:>7} {t * 1e3:9.2f} {t / lits * 1e9:7.1f} {speed}")


if __name__ == "__main__":
    main()
