"""Compare the compiled and pure-numpy kernel backends.

Run with ``python3 benchmarks/bench_backends.py [--quick]``.  Each row reports
the best-of-``repeat`` wall time per backend and the speed-up; both backends
are first checked to agree to round-off on the same inputs.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from mlnoise import _kernels
from mlnoise.estimators import acf_empirical
from mlnoise.generator import generate
from mlnoise.model import MLParams
from mlnoise.spectral import fft, plan


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(quick):
    rng = np.random.default_rng(0)
    n_fft = 2**14 if quick else 2**18
    x = rng.standard_normal(n_fft) + 1j * rng.standard_normal(n_fft)
    yield f"fft n=2^{n_fft.bit_length() - 1}", lambda b: fft(x, backend=b)

    p = plan(MLParams(1.0, 1.2, 20.0), 500)
    N = 100 if quick else 1000
    yield f"generate N={N} T=500", lambda b: generate(p, N, 500, seed=1, backend=b).data

    xi = generate(p, N, 500, seed=2).data
    yield f"acf_empirical N={N} T=500 tmax=400", lambda b: acf_empirical(xi, 400, 1, backend=b).values


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--quick", action="store_true")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if "compiled" not in _kernels.BACKENDS:
        print("compiled backend not built; only the python backend is available")
        return 1
    print(f"{'case':<38} {'compiled [s]':>12} {'python [s]':>12} {'speed-up':>9}")
    for name, fn in cases(args.quick):
        a, b = fn("compiled"), fn("python")
        scale = max(1.0, float(np.max(np.abs(b))))
        assert np.max(np.abs(a - b)) <= 1e-9 * scale, name
        tc = best_of(lambda: fn("compiled"), args.repeat)
        tp = best_of(lambda: fn("python"), args.repeat)
        print(f"{name:<38} {tc:>12.4f} {tp:>12.4f} {tp / tc:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
