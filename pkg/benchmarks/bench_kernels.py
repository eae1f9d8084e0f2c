"""Compare the compiled B-spline kernel against the numpy fallback.

Times the hot kernel (``basis_arrays``) directly for the reference
configuration and a denser one, plus the end-to-end construction of a basis
environment and a least-squares signal fit driven through each backend.

Usage: python benchmarks/bench_kernels.py [--points N]
"""

import argparse
import time

import numpy as np

from splinemd._kernels import _bspline_np

try:
    from splinemd._kernels import _bspline_cy
except ImportError:
    _bspline_cy = None


def timeit(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernel(order, nbasis, npoints):
    knots = np.linspace(0.0, 1.0, nbasis - order + 2)
    delta = np.concatenate(
        [np.full(order - 1, knots[0]), knots, np.full(order - 1, knots[-1])]
    )
    rng = np.random.default_rng(0)
    ts = np.sort(rng.uniform(0.0, 1.0, npoints))

    rows = []
    t_py = timeit(lambda: _bspline_np.basis_arrays(delta, order, ts))
    rows.append(("python", t_py))
    if _bspline_cy is not None:
        t_cy = timeit(lambda: _bspline_cy.basis_arrays(delta, order, ts))
        rows.append(("compiled", t_cy))
        out_py = _bspline_np.basis_arrays(delta, order, ts)
        out_cy = _bspline_cy.basis_arrays(delta, order, ts)
        assert all(
            np.allclose(a, b, rtol=1e-12, atol=1e-12) for a, b in zip(out_py, out_cy)
        ), "backends disagree"
    return rows


def bench_fit(npoints):
    import splinemd._kernels as kernels
    from splinemd.basis import BasisEnv
    from splinemd.fitting import FitConfig, SampleSeries, fit

    ts = np.linspace(0.0, 1.0, npoints)
    values = np.cos(40.0 * ts) + 0.3 * np.sin(7.0 * ts)

    rows = []
    backends = [("python", _bspline_np)]
    if _bspline_cy is not None:
        backends.append(("compiled", _bspline_cy))
    original = kernels.basis_arrays
    try:
        for name, impl in backends:
            kernels.basis_arrays = impl.basis_arrays
            # basis.py binds the selector at import; rebind for the benchmark
            import splinemd.basis as basis_mod

            saved = basis_mod.basis_arrays
            basis_mod.basis_arrays = impl.basis_arrays
            try:
                def run():
                    env = BasisEnv.uniform(0.0, 1.0, order=4, nbasis=180, infill=4)
                    fit(SampleSeries(ts, values), env, FitConfig())

                rows.append((name, timeit(run, repeats=3)))
            finally:
                basis_mod.basis_arrays = saved
    finally:
        kernels.basis_arrays = original
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=200_000)
    args = parser.parse_args()

    print(f"kernel: basis_arrays, order 4, 180 basis functions, {args.points} points")
    rows = bench_kernel(4, 180, args.points)
    base = dict(rows)["python"]
    for name, t in rows:
        print(f"  {name:>8}: {t * 1e3:8.2f} ms   speedup vs python: {base / t:5.2f}x")

    print("end to end: environment construction + 2000-sample fit (n=180)")
    rows = bench_fit(2000)
    base = dict(rows)["python"]
    for name, t in rows:
        print(f"  {name:>8}: {t * 1e3:8.2f} ms   speedup vs python: {base / t:5.2f}x")

    if _bspline_cy is None:
        print("note: compiled kernel unavailable; build it with "
              "`pip install -e . --no-build-isolation`")


if __name__ == "__main__":
    main()
