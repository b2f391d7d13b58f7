"""Compare the compiled sector kernels against the NumPy fallback.

Times the two raw kernels on boxes of increasing size, then two end-to-end
Fock workloads (building ``K S(u, -u)`` vacuum at cutoff 40 and the full vacuum
table of a Bell evaluation) with each implementation swapped in.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from cvbell import _kernels_py, bell, fock, kernels

try:
    from cvbell import _kernels as _kernels_c
except ImportError:  # extension not built
    _kernels_c = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def raw_kernels(repeat):
    rng = np.random.default_rng(1)
    print(f"{'kernel':<16}{'box (A,B,R)':<22}{'numpy [s]':>12}{'cython [s]':>12}{'speedup':>10}{'max diff':>12}")
    for a, r in ((7, 49), (21, 441), (41, 1681)):
        x = rng.normal(size=(a, a, r)) + 1j * rng.normal(size=(a, a, r))
        m = 2 * a - 1
        blocks = rng.normal(size=(m, m, m)) + 1j * rng.normal(size=(m, m, m))
        phi = rng.normal(size=(m, a))
        for name, args in (("pair_transform", (x, blocks)), ("pair_project", (x, phi))):
            py = getattr(_kernels_py, name)
            tp = best_of(lambda: py(*args), repeat)
            if _kernels_c is None:
                print(f"{name:<16}{str((a, a, r)):<22}{tp:>12.5f}{'n/a':>12}")
                continue
            cy = getattr(_kernels_c, name)
            tc = best_of(lambda: cy(*args), repeat)
            diff = float(np.max(np.abs(py(*args) - cy(*args))))
            print(f"{name:<16}{str((a, a, r)):<22}{tp:>12.5f}{tc:>12.5f}{tp / tc:>10.2f}{diff:>12.1e}")


def end_to_end(repeat):
    angles = bell.BellAngles(1.32, 0.93, 3.66, 3.32)
    state = fock.squeezed_four_mode(0.4, -0.4)
    workloads = {
        "squeezed_four_mode(0.4, -0.4, cutoff 40)": lambda: fock.squeezed_four_mode(0.4, -0.4),
        "bell_functional on cutoff-40 state": lambda: bell.bell_functional(state, angles),
        "optimize_angles(PCS zeta=1, cutoff 20)": lambda: bell.optimize_angles(fock.pcs_pair(fock.PcsParams(1.0))),
    }
    impls = [("numpy", _kernels_py)] + ([("cython", _kernels_c)] if _kernels_c is not None else [])
    saved = kernels._impl
    print(f"\n{'workload':<44}" + "".join(f"{n + ' [s]':>14}" for n, _ in impls))
    try:
        for label, fn in workloads.items():
            cols = []
            for _, impl in impls:
                kernels._impl = impl
                cols.append(best_of(fn, repeat))
            print(f"{label:<44}" + "".join(f"{t:>14.4f}" for t in cols))
    finally:
        kernels._impl = saved


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"active implementation: {kernels.IMPLEMENTATION}\n")
    raw_kernels(args.repeat)
    end_to_end(args.repeat)


if __name__ == "__main__":
    main()
