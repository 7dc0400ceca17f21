"""Scalar special functions: Lobachevsky's function, the averaged-log
integral f(A, B, C), divisor sums of squares, and named constants."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

# zeta(2n)/(n(2n+1)) for the power series of the Clausen function Cl_2
_NTERMS = 40
_n = np.arange(1, _NTERMS)
_CLAUSEN_COEFFS = np.concatenate([[0.0], special.zeta(2.0 * _n, 1) / (_n * (2 * _n + 1))])


@dataclass(frozen=True)
class Constants:
    zeta3: float
    young_exponent: float
    skyscraper_exponent: float


_ZETA3 = float(special.zeta(3.0, 1))
CONSTANTS = Constants(
    zeta3=_ZETA3,
    young_exponent=math.pi * math.sqrt(2.0 / 3.0),
    skyscraper_exponent=3.0 * (_ZETA3 / 4.0) ** (1.0 / 3.0),
)


def _clausen2(theta):
    """Cl_2(theta) for theta in [0, 2pi].

    Uses Cl_2(t) = t - t ln|t| + t * sum_n zeta(2n)/(n(2n+1)) (t/2pi)^(2n),
    valid for |t| < 2pi; arguments above pi are folded to t - 2pi so the
    series ratio never exceeds 1/4.
    """
    t = np.asarray(theta, dtype=float)
    t = np.where(t > np.pi, t - 2.0 * np.pi, t)
    a = np.abs(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        base = np.where(a > 0, t - t * np.log(a), 0.0)
    r = (t / (2.0 * np.pi)) ** 2
    return base + t * np.polynomial.polynomial.polyval(r, _CLAUSEN_COEFFS)


def lobachevsky(x):
    """L(x) = -int_0^x ln(2 sin t) dt on [0, pi].

    Accepts scalars or arrays. Absolute error is at the level of double
    rounding (about 1e-16) over the whole interval.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(xa)) or np.any(xa < 0.0) or np.any(xa > np.pi):
        raise ValueError("lobachevsky is defined on [0, pi] only")
    out = 0.5 * _clausen2(2.0 * xa)
    # exact zeros at both ends
    out = np.where((xa == 0.0) | (xa == np.pi), 0.0, out)
    if np.ndim(out) == 0:
        return float(out)
    return out


def ronkin_f(A: float, B: float, C: float) -> float:
    """(1/4pi^2) int int ln|A + B e^{iu} + C e^{iv}| du dv for A, B, C > 0.

    The v-integral is done in closed form (Jensen), leaving
    (1/pi) int_0^pi ln max(|A + B e^{iu}|, C) du. The largest coefficient is
    moved into the C slot, so either C >= A + B (the answer is ln C) or the
    integrand has exactly one kink, at which the quadrature is split.
    """
    vals = [float(A), float(B), float(C)]
    if not all(math.isfinite(v) and v > 0 for v in vals):
        raise ValueError("ronkin_f needs three positive finite arguments")
    a, b, c = sorted(vals)
    if c >= a + b:
        return math.log(c)
    # kink where A^2 + B^2 + 2AB cos u = C^2; cos_k lies in (-1, 1) here
    cos_k = (c * c - a * a - b * b) / (2.0 * a * b)
    cos_k = min(1.0, max(-1.0, cos_k))
    uk = math.acos(cos_k)

    def g(u):
        return 0.5 * math.log(a * a + b * b + 2.0 * a * b * math.cos(u))

    head, _ = integrate.quad(g, 0.0, uk, epsabs=1e-14, epsrel=1e-13, limit=200)
    return (head + (math.pi - uk) * math.log(c)) / math.pi


def sigma2(k: int) -> int:
    """Sum of the squares of the divisors of k, by trial division."""
    k = int(k)
    if k < 1:
        raise ValueError("sigma2 needs k >= 1")
    total = 0
    d = 1
    while d * d <= k:
        if k % d == 0:
            e = k // d
            total += d * d
            if e != d:
                total += e * e
        d += 1
    return total


def sigma2_table(nmax: int) -> list:
    """sigma2(1..nmax) by a divisor sieve; entry 0 is 0."""
    out = [0] * (nmax + 1)
    for d in range(1, nmax + 1):
        dd = d * d
        for m in range(d, nmax + 1, d):
            out[m] += dd
    return out
