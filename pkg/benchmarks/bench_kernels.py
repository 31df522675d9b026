"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--n 2000] [--repeat 5]

Both backends are called on identical inputs; results are also compared so a
speedup never hides a disagreement.
"""

from __future__ import annotations

import argparse
import sys
import timeit

import numpy as np

from bgnsar import _pykernels

try:
    from bgnsar import _kernels
except ImportError:
    _kernels = None

PARAMS = (1.3, 0.7, 0.2, 1.5, 0.8)


def cases(n: int):
    rng = np.random.default_rng(1)
    x = rng.normal(0.0, 2.0, n)
    pos = rng.gamma(2.0, 1.0, n)

    def pdf(k):
        out = np.empty(n)
        k.bgn_log_pdf(x, *PARAMS, out)
        return out

    def cdf(k):
        f, sf = np.empty(n), np.empty(n)
        k.bgn_cdf_pair(x, *PARAMS, f, sf)
        return f

    def loglik_grad(k):
        g = np.empty(5)
        ll, _ = k.bgn_loglik_grad(x, *PARAMS, g, True)
        return np.r_[ll, g]

    def k_loglik(k):
        return np.array([k.k_loglik(pos, 3.0, 2.0, 2.0)])

    def scalars(k):
        return np.array([k.inc_beta(0.3, 2.5, 0.7), k.gamma_q(3.3, 2.0), k.dgamma_ds(0.7, 1.9),
                         k.log_bessel_k(1.5, 2.0)])

    return {"bgn_log_pdf": pdf, "bgn_cdf_pair": cdf, "bgn_loglik_grad": loglik_grad,
            "k_loglik": k_loglik, "scalar special functions": scalars}


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=5)
    a = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; only the Python backend is available")
        return 1
    print(f"{'kernel':26s} {'cython ms':>10s} {'python ms':>10s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, fn in cases(a.n).items():
        cy = min(timeit.repeat(lambda: fn(_kernels), number=1, repeat=a.repeat))
        py = min(timeit.repeat(lambda: fn(_pykernels), number=1, repeat=max(1, a.repeat // 2)))
        r1, r2 = fn(_kernels), fn(_pykernels)
        diff = float(np.max(np.abs(r1 - r2) / np.maximum(np.abs(r2), 1e-300)))
        print(f"{name:26s} {cy * 1e3:10.3f} {py * 1e3:10.3f} {py / cy:8.1f} {diff:13.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
