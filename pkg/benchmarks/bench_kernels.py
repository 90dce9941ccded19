"""Side-by-side timing of the numpy and numba kernel backends.

Imports both implementation modules directly, so the SUBSPACE_LENS_NUMBA
env var (which fixes the package-wide choice at import time) does not
constrain the comparison. JIT compilation happens during warmup and is
excluded from the timings.

Usage:
    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --sizes 300 1000 3000 --repeats 7
"""

import argparse
import time

import numpy as np

from subspace_lens.kernels import numpy_impl

try:
    from subspace_lens.kernels import numba_impl
except ImportError:
    numba_impl = None


def make_case(n, dim, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, dim))
    Y = rng.standard_normal((n, 2))
    DX = numpy_impl.dist_matrix(X)
    DY = numpy_impl.dist_matrix(Y)
    return X, Y, DX, DY


def kernel_calls(impl, X, Y, DX, DY):
    return {
        "dist_matrix": lambda: impl.dist_matrix(X),
        "stress_gradient": lambda: impl.stress_gradient(DX, Y, DY),
        "guttman_step": lambda: impl.guttman_step(DX, Y, DY),
        "pointwise_blocks": lambda: impl.pointwise_blocks(X, Y, DX, DY),
    }


def best_of(fn, repeats):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="compare numpy and numba kernel backends"
    )
    parser.add_argument(
        "--sizes", type=int, nargs="+", default=[200, 500, 1000],
        help="point counts to benchmark (default: 200 500 1000)",
    )
    parser.add_argument(
        "--dim", type=int, default=8, help="input dimensionality (default: 8)"
    )
    parser.add_argument(
        "--repeats", type=int, default=5,
        help="repetitions per kernel; best time is reported (default: 5)",
    )
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)

    if numba_impl is None:
        print("numba not importable; timing the numpy backend only")

    # compile every @njit kernel once so timings exclude JIT cost
    if numba_impl is not None:
        warm = make_case(16, args.dim, args.seed)
        for fn in kernel_calls(numba_impl, *warm).values():
            fn()

    header = f"{'kernel':<18}{'n':>6}{'numpy ms':>12}{'numba ms':>12}{'speedup':>9}"
    print(header)
    print("-" * len(header))
    for n in args.sizes:
        case = make_case(n, args.dim, args.seed)
        np_calls = kernel_calls(numpy_impl, *case)
        nb_calls = kernel_calls(numba_impl, *case) if numba_impl else {}
        for name, np_fn in np_calls.items():
            t_np = best_of(np_fn, args.repeats) * 1e3
            if numba_impl is None:
                print(f"{name:<18}{n:>6}{t_np:>12.3f}{'-':>12}{'-':>9}")
                continue
            t_nb = best_of(nb_calls[name], args.repeats) * 1e3
            ratio = t_np / t_nb if t_nb > 0 else np.inf
            print(f"{name:<18}{n:>6}{t_np:>12.3f}{t_nb:>12.3f}{ratio:>8.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
