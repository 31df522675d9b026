"""Coefficient tables built once at import time."""

from __future__ import annotations

import math
from fractions import Fraction

# Bernoulli numbers B2..B12
_BERNOULLI = (
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
)


def _zeta_minus_one(k: int, n_direct: int = 20) -> float:
    # direct sum over 2..N-1, Euler-Maclaurin tail from N
    total = 0.0
    for n in range(n_direct - 1, 1, -1):
        total += float(n) ** -k
    big_n = float(n_direct)
    tail = big_n ** (1 - k) / (k - 1) + 0.5 * big_n ** -k
    rising = float(k)
    for j, b in enumerate(_BERNOULLI, start=1):
        if j > 1:
            rising *= (k + 2 * j - 3) * (k + 2 * j - 2)
        tail += float(b) / math.factorial(2 * j) * rising * big_n ** (-k - 2 * j + 1)
    return total + tail


ZETA_MAX = 60
# ZETA_M1[k] = zeta(k) - 1 for k >= 2; slots 0 and 1 unused
ZETA_M1 = [0.0, 0.0] + [_zeta_minus_one(k) for k in range(2, ZETA_MAX + 1)]


def _debye_polys(order: int) -> list[list[Fraction]]:
    """Coefficient lists (ascending powers of p) of the Debye polynomials u_k(p)."""
    polys = [[Fraction(1)]]
    for _ in range(order):
        u = polys[-1]
        deg = len(u) + 3
        new = [Fraction(0)] * deg
        # 1/2 p^2 (1 - p^2) u'(p)
        for i in range(1, len(u)):
            c = i * u[i] / 2
            new[i + 1] += c
            new[i + 3] -= c
        # 1/8 int_0^p (1 - 5 t^2) u(t) dt
        for i, c in enumerate(u):
            new[i + 1] += c / (8 * (i + 1))
            new[i + 3] -= 5 * c / (8 * (i + 3))
        while len(new) > 1 and new[-1] == 0:
            new.pop()
        polys.append(new)
    return polys


DEBYE_ORDER = 12
DEBYE_U = [[float(c) for c in poly] for poly in _debye_polys(DEBYE_ORDER)]
