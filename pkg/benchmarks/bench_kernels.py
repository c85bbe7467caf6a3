"""Compare the compiled kernels against the numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from homothetic import _pykernels, kernels

try:
    from homothetic import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None


def cases(rng):
    k, m, n = 2000, 10_000, 2
    logp = rng.normal(size=(k, n))
    logv = rng.normal(size=(m, n))
    w = rng.dirichlet(np.ones(m))
    p = np.exp(rng.normal(size=(k, 3)))
    V = rng.uniform(0.1, 2, size=(500, 3))
    wl = rng.dirichlet(np.ones(500))
    x = np.linspace(0, 1, 200_001)
    y = np.sin(7 * x) + 0.1 * rng.normal(size=x.size)
    return {
        "linear_logexp 2000x10000": lambda impl: kernels.linear_logexp(logp, logv, w, impl=impl),
        "linear_logexp soft 2000x10000": lambda impl: kernels.linear_logexp(logp, logv, w, 1e-3, impl=impl),
        "linear_shares 2000x10000": lambda impl: kernels.linear_shares(logp, logv, w, impl=impl),
        "leontief_logexp 2000x500": lambda impl: kernels.leontief_logexp(p, V, wl, impl=impl),
        "leontief_shares 2000x500": lambda impl: kernels.leontief_shares(p, V, wl, impl=impl),
        "upper_hull 200001": lambda impl: kernels.upper_hull(x, y, impl=impl),
        "lower_hull 200001": lambda impl: kernels.lower_hull(x, y, impl=impl),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':34s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s} {'max |diff|':>11s}")
    for name, fn in cases(rng).items():
        t_py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=args.repeat))
        if _ckernels is None:
            print(f"{name:34s} {t_py:11.4f} {'-':>11s}")
            continue
        t_c = min(timeit.repeat(lambda: fn(_ckernels), number=1, repeat=args.repeat))
        a, b = fn(_pykernels), fn(_ckernels)
        a = a if isinstance(a, tuple) else (a,)
        b = b if isinstance(b, tuple) else (b,)
        diff = max(float(np.max(np.abs(np.asarray(u, float) - np.asarray(v, float)))) for u, v in zip(a, b))
        print(f"{name:34s} {t_py:11.4f} {t_c:11.4f} {t_py / t_c:8.2f} {diff:11.2e}")


if __name__ == "__main__":
    main()
