"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints the best-of-N wall time per kernel and size, plus the speedup.  The
numba timings exclude the first (compiling) call.
"""

import argparse
import timeit

import numpy as np

from shrinklab import _kernels


def _cases(rng):
    for n, N in ((1, 4001), (2, 161**2), (3, 41**3)):
        p = rng.normal(size=(N, n))
        q = rng.normal(size=(N, n, n))
        q = 0.5 * (q + np.swapaxes(q, 1, 2))
        yield f"graph_pointwise n={n} N={N}", _kernels.graph_pointwise_numpy, _kernels.graph_pointwise_numba, (p, q)
    for shape in ((801,), (321, 321), (61, 61, 61)):
        w = rng.normal(size=shape)
        yield f"mcf_rhs {'x'.join(map(str, shape))}", _kernels.mcf_rhs_numpy, _kernels.mcf_rhs_numba, (w, 0.05)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(0)
    print(f"{'kernel':34s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s}")
    for name, slow, fast, inputs in _cases(rng):
        fast(*inputs)
        t_np = min(timeit.repeat(lambda: slow(*inputs), number=1, repeat=args.repeat))
        t_nb = min(timeit.repeat(lambda: fast(*inputs), number=1, repeat=args.repeat))
        print(f"{name:34s} {1e3 * t_np:10.2f} {1e3 * t_nb:10.2f} {t_np / t_nb:8.1f}")


if __name__ == "__main__":
    main()
