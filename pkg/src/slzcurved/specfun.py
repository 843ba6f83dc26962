"""Incomplete elliptic integral of the second kind and incomplete beta.

Both are needed beyond their textbook domains: E(x|m) with m = 2, and
B(x; a, b) with x = 1/sin^2 >= 1.  The conventions below keep every value
real; the Green-function quadrature is the independent check.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import DomainError, SeriesDivergence


def _carlson_e(sin_x: float, cos_x: float, m: float, sign: float = 1.0) -> float:
    # E = s R_F(c^2, 1 - m s^2, 1) - (m/3) s^3 R_D(c^2, 1 - m s^2, 1)
    s2 = sin_x * sin_x
    delta = 1.0 - m * s2 if sign > 0 else 1.0 + m * s2
    c2 = cos_x * cos_x
    rf = special.elliprf(c2, delta, 1.0)
    rd = special.elliprd(c2, delta, 1.0)
    return sin_x * rf - sign * (m / 3.0) * sin_x * s2 * rd


def incomplete_elliptic_e(x: float, m: float) -> float:
    """E(x|m) = integral_0^x sqrt(1 - m sin^2 t) dt for real amplitude x.

    For m <= 1 any real x is accepted (quasi-periodic extension).  For m > 1
    the integrand turns imaginary past ``asin(1/sqrt(m))``; such amplitudes
    raise :class:`DomainError`.
    """
    if x == 0.0:
        return 0.0
    if x < 0.0:
        return -incomplete_elliptic_e(-x, m)
    if m > 1.0:
        limit = math.asin(1.0 / math.sqrt(m))
        if x > limit * (1.0 + 1e-15):
            raise DomainError(f"E(x|{m}) is not real for x > {limit}")
        x = min(x, limit)
        return float(_carlson_e(math.sin(x), math.cos(x), m))
    half_periods = math.floor(x / math.pi + 0.5)
    rest = x - half_periods * math.pi
    out = _carlson_e(math.sin(rest), math.cos(rest), m) if rest != 0.0 else 0.0
    if half_periods:
        out += 2.0 * half_periods * special.ellipe(m)
    return float(out)


def incomplete_elliptic_e_imag(u: float, m: float) -> float:
    """Real e with E(i u | m) = i e, i.e. integral_0^u sqrt(1 + m sinh^2 t) dt.

    Needed when the amplitude carries an imaginary lambda_1 (z < 0).
    """
    if u == 0.0:
        return 0.0
    if u < 0.0:
        return -incomplete_elliptic_e_imag(-u, m)
    if m < 0.0 and math.sinh(u) ** 2 * -m > 1.0:
        raise DomainError("E(iu|m) is not purely imaginary on this range")
    return float(_carlson_e(math.sinh(u), math.cosh(u), m, sign=-1.0))


def _hyp_beta(y: float, a: float, b: float) -> float:
    """y^a/a 2F1(a, 1-b; a+1; y) for 0 <= y < 1 (analytic in a and b)."""
    if y == 0.0:
        if a > 0:
            return 0.0
        raise SeriesDivergence("B(0; a, b) diverges for a <= 0")
    val = y ** a / a * special.hyp2f1(a, 1.0 - b, a + 1.0, y)
    if not np.isfinite(val):
        raise SeriesDivergence(f"2F1 series failed at y = {y}, a = {a}, b = {b}")
    return float(val)


def complete_beta_projection(a: float, b: float) -> float:
    """B(a, b) cos(pi (b - 1)): the piece of B(x > 1) kept after dephasing."""
    phase = math.cos(math.pi * (b - 1.0))
    if phase == 0.0 or abs(phase) < 1e-15:
        return 0.0
    val = phase * special.beta(a, b)
    if not np.isfinite(val):
        raise SeriesDivergence(f"complete beta diverges at a = {a}, b = {b}")
    return float(val)


def incomplete_beta(x: float, a: float, b: float) -> float:
    """Incomplete beta B(x; a, b) = integral_0^x t^(a-1) (1-t)^(b-1) dt.

    For ``0 <= x <= 1`` this is the ordinary (hypergeometric) value.  For
    ``x > 1`` the analytic continuation is ``B(a,b) + e^{i pi (b-1)} B1(x)``
    with the real ``B1(x) = integral_1^x t^(a-1) (t-1)^(b-1) dt``; the value
    returned is the real part after dividing out that phase,
    ``B(a,b) cos(pi (b-1)) + B1(x)``.  Integer ``b`` gives the plain
    analytic continuation, e.g. ``B(x; a, 1) = x^a/a`` for every x > 0.
    """
    if x < 0.0:
        raise DomainError("incomplete_beta needs x >= 0")
    if x <= 1.0:
        if x == 1.0:
            return float(special.beta(a, b))
        return _hyp_beta(x, a, b)
    if b <= 0.0:
        raise SeriesDivergence("continuation past x = 1 needs b > 0")
    # substitute t = 1/(1 - y): B1(x) = B(1 - 1/x; b, 1 - a - b)
    y = -math.expm1(-math.log(x))
    tail = _hyp_beta(y, b, 1.0 - a - b)
    return complete_beta_projection(a, b) + tail
