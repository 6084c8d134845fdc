"""Compare the compiled and NumPy kernels on s-sweeps of realistic size.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import math
import timeit

import numpy as np

from fracgcg import _kernels_py

try:
    from fracgcg import _kernels as _compiled
except ImportError:
    _compiled = None


def cases(rng):
    # 1D order family, n = 4096, coarse sweep of 64 parameters
    n = 4096
    m = np.abs(np.fft.fftfreq(n, 1 / n))[1:]
    yield "order n=4096 x 64 s", _kernels_py.order_sums, "order_sums", (
        rng.random(m.size), np.log(m), np.linspace(1e-3, 1, 64))
    # 2D anisotropic family, n = 128, kink-seeded sweep
    n = 128
    k = np.fft.fftfreq(n, 1 / n)
    m1, m2 = (a.ravel() for a in np.meshgrid(k, k, indexing="ij"))
    args = (rng.random(m1.size), m1[None].copy(), m2[None].copy(), np.hypot(m1, m2),
            np.linspace(0, math.pi, 256), 1e-3, 1e-3, 1.0)
    yield "aniso n=128 x 256 s", _kernels_py.aniso_sums, "aniso_sums", args
    # non-integer exponent (gamma = 0.35) takes the exp/log path
    yield "aniso gamma=.35", _kernels_py.aniso_sums, "aniso_sums", args[:-1] + (1.4,)


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'case':24s} {'numpy [ms]':>11s} {'cython [ms]':>12s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, py_fn, attr, a in cases(rng):
        t_py = min(timeit.repeat(lambda: py_fn(*a), number=1, repeat=args.repeat)) * 1e3
        if _compiled is None:
            print(f"{name:24s} {t_py:11.2f} {'n/a':>12s}")
            continue
        c_fn = getattr(_compiled, attr)
        t_c = min(timeit.repeat(lambda: c_fn(*a), number=1, repeat=args.repeat)) * 1e3
        diff = np.max(np.abs(c_fn(*a) - py_fn(*a)) / np.abs(py_fn(*a)))
        print(f"{name:24s} {t_py:11.2f} {t_c:12.2f} {t_py / t_c:8.1f} {diff:13.1e}")


if __name__ == "__main__":
    main()
