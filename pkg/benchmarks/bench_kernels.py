"""Benchmark the numba kernels against the pure-numpy fallbacks.

Runs the packed evaluation, Jacobian, fused eval+Jacobian, and LU-solve
kernels over representative workloads (adjacent-minors systems, a squared
cyclic system, and dense-ish random hypersurfaces) and prints the median
per-call time of each backend plus the speedup.  Both backends live in one
process, so this script works under any WITNESS_SAMPLER_KERNELS setting;
numba rows are skipped when numba is unavailable.

Usage: python3 benchmarks/bench_kernels.py [--repeats 200]
"""

import argparse
import time

import numpy as np

from witness_sampler import _kernels, polysys


def _workloads():
    out = []
    for cols in (3, 6, 10):
        f = polysys.adjacent_minors(cols)
        out.append(("minors(%d)" % cols, f))
    f = polysys.cyclic_roots(8)
    out.append(("cyclic(8)", polysys.square_system(f, 7, seed=0)))
    for d, t in ((10, 5), (40, 25)):
        out.append(("hyper(n=10,d=%d,t=%d)" % (d, t),
                    polysys.random_sparse_hypersurface(10, d, t, seed=1)))
    return out


def _median_time(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return float(np.median(times))


def bench_poly_kernels(repeats):
    rows = []
    for name, f in _workloads():
        coeffs, exps, eq_ptr, maxexp = f.packed()
        rng = np.random.default_rng(0)
        x = rng.standard_normal(f.n) + 1j * rng.standard_normal(f.n)
        for kernel in ("eval", "jac", "eval_jac"):
            np_fn = getattr(_kernels, "%s_packed_numpy" % kernel)
            nb_fn = getattr(_kernels, "%s_packed_numba" % kernel)
            args = (coeffs, exps, eq_ptr, maxexp, x)
            t_np = _median_time(lambda: np_fn(*args), repeats)
            if nb_fn is None:
                rows.append((name, kernel, t_np, None))
                continue
            nb_fn(*args)  # compile outside the timed region
            t_nb = _median_time(lambda: nb_fn(*args), repeats)
            rows.append((name, kernel, t_np, t_nb))
    return rows


def bench_lu(repeats):
    rows = []
    rng = np.random.default_rng(1)
    for n in (4, 16, 64):
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        b = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        t_np = _median_time(
            lambda: _kernels.lu_solve_packed_numpy(A.copy(), b.copy()),
            repeats)
        if _kernels.lu_solve_packed_numba is None:
            rows.append(("lu(%d)" % n, "solve", t_np, None))
            continue
        _kernels.lu_solve_packed_numba(A.copy(), b.copy())
        t_nb = _median_time(
            lambda: _kernels.lu_solve_packed_numba(A.copy(), b.copy()),
            repeats)
        rows.append(("lu(%d)" % n, "solve", t_np, t_nb))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()
    print("active backend: %s (numba available: %s)"
          % (_kernels.BACKEND, _kernels.HAS_NUMBA))
    print("%-22s %-9s %12s %12s %9s"
          % ("workload", "kernel", "numpy [us]", "numba [us]", "speedup"))
    for name, kernel, t_np, t_nb in (bench_poly_kernels(args.repeats)
                                     + bench_lu(args.repeats)):
        if t_nb is None:
            print("%-22s %-9s %12.2f %12s %9s"
                  % (name, kernel, t_np * 1e6, "-", "-"))
        else:
            print("%-22s %-9s %12.2f %12.2f %8.1fx"
                  % (name, kernel, t_np * 1e6, t_nb * 1e6, t_np / t_nb))


if __name__ == "__main__":
    main()
