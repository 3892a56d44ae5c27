"""Generating functions of the A/B sequences and the trigonometric identity
that turns their sum into the closed-form success probability."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np


def _poly(coeffs) -> tuple:
    c = [Fraction(x) for x in coeffs]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c) or (Fraction(0),)


def _poly_add(p, q):
    n = max(len(p), len(q))
    return _poly([(p[k] if k < len(p) else 0) + (q[k] if k < len(q) else 0) for k in range(n)])


def _poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _poly(out)


@dataclass(frozen=True)
class RationalFunction:
    """num(z) / den(z) with coefficient tuples in increasing powers of z."""

    num: tuple
    den: tuple

    def __post_init__(self):
        num, den = _poly(self.num), _poly(self.den)
        if den[0] == 0:
            raise ValueError("denominator must have a nonzero constant term")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        if self.den == other.den:
            return RationalFunction(_poly_add(self.num, other.num), self.den)
        return RationalFunction(
            _poly_add(_poly_mul(self.num, other.den), _poly_mul(other.num, self.den)),
            _poly_mul(self.den, other.den),
        )

    def coeffs(self, k: int) -> list[Fraction]:
        return series_coeffs(self, k)


def gf_pair(n: int) -> tuple[RationalFunction, RationalFunction]:
    """Generating functions of A_i and B_i:
    2Nz / D(z) and (N - Nz) / D(z) with D(z) = N + 2(2 - N)z + Nz^2."""
    if n < 1:
        raise ValueError(f"N must be positive, got {n}")
    den = (n, 2 * (2 - n), n)
    return RationalFunction((0, 2 * n), den), RationalFunction((n, -n), den)


def gf_sum(n: int) -> RationalFunction:
    a, b = gf_pair(n)
    return a + b


def series_coeffs(rf: RationalFunction, k: int) -> list[Fraction]:
    """First ``k`` power-series coefficients of ``rf``.

    From den * f = num: c_m = (num_m - sum_{j>=1} den_j c_{m-j}) / den_0.
    """
    if k < 1:
        raise ValueError(f"need at least one coefficient, got k={k}")
    num, den = rf.num, rf.den
    out: list[Fraction] = []
    for m in range(k):
        acc = num[m] if m < len(num) else Fraction(0)
        for j in range(1, min(m, len(den) - 1) + 1):
            acc -= den[j] * out[m - j]
        out.append(acc / den[0])
    return out


def _check_theta(theta: float):
    if not 0 < theta <= math.pi / 2:
        raise ValueError(f"theta must lie in (0, pi/2], got {theta!r}")


def dirichlet_check(c: int, theta: float) -> tuple[float, float]:
    """Both sides of 1 + 2 sum_{j=1}^{c} cos(2 j theta) = sin((2c+1) theta) / sin theta."""
    _check_theta(theta)
    if c < 0:
        raise ValueError(f"C must be nonnegative, got {c}")
    lhs = 1 + 2 * math.fsum(math.cos(2 * j * theta) for j in range(1, c + 1))
    rhs = math.sin((2 * c + 1) * theta) / math.sin(theta)
    return lhs, rhs


def kernel_sums(theta: float, cmax: int) -> tuple[np.ndarray, np.ndarray]:
    """``dirichlet_check`` for every c in 0..cmax at once, as two arrays."""
    _check_theta(theta)
    j = np.arange(1, cmax + 1)
    lhs = 1 + 2 * np.concatenate(([0.0], np.cumsum(np.cos(2 * j * theta))))
    c = np.arange(cmax + 1)
    rhs = np.sin((2 * c + 1) * theta) / np.sin(theta)
    return lhs, rhs
