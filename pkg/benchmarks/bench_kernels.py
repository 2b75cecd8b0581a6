"""Time the lattice kernels with the numba and numpy backends.

    python benchmarks/bench_kernels.py [--repeat 3]

The first numba call includes JIT compilation and is reported separately.
"""

import argparse
import time

import numpy as np

from eitmem import _accel
from eitmem.maxwell_bloch import run_linear, run_obe
from eitmem.units import GaussianPulse, MediumParams


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--nz", type=int, default=200)
    args = ap.parse_args()

    t = np.arange(-30, 80, 0.01)
    u = GaussianPulse(1e-4, 5.95).amplitude(t).astype(complex)
    med = MediumParams(D=100, gamma31=0.5, gamma21=0.001)
    cases = {
        "linear": lambda b: run_linear(t, u, med, 3.0, nz=args.nz, backend=b).output,
        "obe": lambda b: run_obe(t, u, med, 3.0, nz=args.nz // 2, backend=b).output,
    }
    print(f"{len(t)} time steps, nz={args.nz} (obe nz={args.nz // 2})")
    for name, fn in cases.items():
        _, ref = best_of(lambda: fn("numpy"), 1)
        t_np, _ = best_of(lambda: fn("numpy"), args.repeat)
        if not _accel.HAVE_NUMBA:
            print(f"{name:7s} numpy {t_np:8.3f} s   numba unavailable")
            continue
        t0 = time.perf_counter()
        fn("numba")
        first = time.perf_counter() - t0
        t_nb, out = best_of(lambda: fn("numba"), args.repeat)
        diff = np.max(np.abs(out - ref)) / np.max(np.abs(ref))
        print(f"{name:7s} numpy {t_np:8.3f} s   numba {t_nb:8.3f} s (first call {first:.2f} s)"
              f"   speedup {t_np / t_nb:6.1f}x   max rel diff {diff:.1e}")


if __name__ == "__main__":
    main()
