"""Symplectic realizations of the deformed sl(2) Poisson coalgebra.

Deformed brackets::

    {J3, J+} = 2 J+ cosh(z J-),   {J3, J-} = -2 sinh(z J-)/z,   {J-, J+} = 4 J3

The n-site generators come from the coproduct; site ``i`` carries the factor
``exp(z (sum_{j>i} q_j^2 - sum_{j<i} q_j^2))``.  All ``sinh(z q^2)/(z q^2)``
ratios go through :func:`sinhc`, so ``z = 0`` is the classical realization
``J- = q^2, J+ = p^2 + sum b_i/q_i^2, J3 = q.p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, EvaluationError
from .spaces import SpaceSpec, as_vector, sinhc

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class DeformedGenerators:
    j_minus: float
    j_plus: float
    j_three: float


def _check_sites(q, b, arity):
    for i in range(arity):
        if b[i] != 0.0 and q[i] == 0.0:
            raise DomainError(f"b{i + 1} != 0 requires q{i + 1} != 0")


def _site_exponent(q2, z, i, arity):
    lower = sum(q2[:i])
    upper = sum(q2[i + 1:arity])
    return z * (upper - lower)


def _site_plus(q, p, z, b_i):
    """sinh(z q^2)/(z q^2) p^2 + z b / sinh(z q^2), the one-site J+."""
    u = z * q * q
    s = sinhc(u)
    out = s * p * p
    if b_i != 0.0:
        out += b_i / (q * q * s)
    return out


def realize_generators(state, spec: SpaceSpec, arity: int = 3) -> DeformedGenerators:
    """Generator values in the ``arity``-site symplectic realization."""
    if arity not in (1, 2, 3):
        raise DomainError("arity must be 1, 2 or 3")
    v = as_vector(state)
    if v.shape != (6,):
        raise DomainError("state needs three coordinate pairs")
    q, p, z, b = v[:3], v[3:], spec.z, spec.b
    if not np.all(np.isfinite(v[:arity])) or not np.all(np.isfinite(v[3:3 + arity])):
        raise DomainError("coordinates of the active sites are missing")
    _check_sites(q, b, arity)
    q2 = q * q
    jm = float(sum(q2[:arity]))
    jp = j3 = 0.0
    for i in range(arity):
        e = math.exp(_site_exponent(q2, z, i, arity))
        jp += _site_plus(q[i], p[i], z, b[i]) * e
        j3 += sinhc(z * q2[i]) * q[i] * p[i] * e
    return DeformedGenerators(jm, float(jp), float(j3))


def _pair_term(q, p, z, b, i, j):
    si, sj = sinhc(z * q[i] ** 2), sinhc(z * q[j] ** 2)
    lij = q[i] * p[j] - q[j] * p[i]
    out = si * sj * lij * lij
    # sinh(z qj^2)/sinh(z qi^2) written z-free
    if b[i] != 0.0:
        out += b[i] * (q[j] ** 2 * sj) / (q[i] ** 2 * si)
    if b[j] != 0.0:
        out += b[j] * (q[i] ** 2 * si) / (q[j] ** 2 * sj)
    return out


def casimir_two(state, spec: SpaceSpec) -> float:
    """Two-site Casimir on sites 1 (x) 2."""
    v = as_vector(state)
    q, p, z, b = v[:3], v[3:], spec.z, spec.b
    _check_sites(q, b, 2)
    q1, q2 = q[0] ** 2, q[1] ** 2
    return float(
        _pair_term(q, p, z, b, 0, 1) * math.exp(z * (q2 - q1))
        + b[0] * math.exp(2 * z * q2) + b[1] * math.exp(-2 * z * q1)
    )


def casimir_two_lower(state, spec: SpaceSpec) -> float:
    """Two-site Casimir on sites 2 (x) 3."""
    v = as_vector(state)
    q, p, z, b = v[:3], v[3:], spec.z, spec.b
    for i in (1, 2):
        if b[i] != 0.0 and q[i] == 0.0:
            raise DomainError(f"b{i + 1} != 0 requires q{i + 1} != 0")
    q2, q3 = q[1] ** 2, q[2] ** 2
    return float(
        _pair_term(q, p, z, b, 1, 2) * math.exp(z * (q3 - q2))
        + b[1] * math.exp(2 * z * q3) + b[2] * math.exp(-2 * z * q2)
    )


def casimir_three(state, spec: SpaceSpec) -> float:
    """Three-site Casimir on 1 (x) 2 (x) 3."""
    v = as_vector(state)
    q, p, z, b = v[:3], v[3:], spec.z, spec.b
    _check_sites(q, b, 3)
    a1, a2, a3 = q[0] ** 2, q[1] ** 2, q[2] ** 2
    return float(
        _pair_term(q, p, z, b, 0, 1) * math.exp(z * (-a1 + a2 + 2 * a3))
        + _pair_term(q, p, z, b, 0, 2) * math.exp(z * (-a1 + a3))
        + _pair_term(q, p, z, b, 1, 2) * math.exp(z * (-2 * a1 - a2 + a3))
        + b[0] * math.exp(2 * z * (a2 + a3))
        + b[1] * math.exp(2 * z * (a3 - a1))
        + b[2] * math.exp(-2 * z * (a1 + a2))
    )


def casimir_values(state, spec: SpaceSpec):
    """(C^(2), C_(2), C^(3)) at a Cartesian phase point."""
    return casimir_two(state, spec), casimir_two_lower(state, spec), casimir_three(state, spec)


def one_site_casimir(state, spec: SpaceSpec) -> float:
    """sinh(z J-)/z J+ - J3^2 for the one-site realization; equals b1."""
    g = realize_generators(state, spec, 1)
    return sinhc(spec.z * g.j_minus) * g.j_minus * g.j_plus - g.j_three ** 2


# ---------------------------------------------------------------------------
# Poisson brackets by central differences
# ---------------------------------------------------------------------------

def gradient_fd(fn: Callable[[np.ndarray], float], x, step_scale=None) -> np.ndarray:
    """Central-difference gradient of a scalar function of a flat vector."""
    x = np.asarray(x, dtype=float)
    h0 = np.cbrt(EPS) if step_scale is None else step_scale
    grad = np.empty_like(x)
    for k in range(x.size):
        h = h0 * max(1.0, abs(x[k]))
        xp, xm = x.copy(), x.copy()
        xp[k] += h
        xm[k] -= h
        h = xp[k] - xm[k]
        try:
            grad[k] = (fn(xp) - fn(xm)) / h
        except DomainError as exc:
            raise EvaluationError(f"stencil point left the domain: {exc}") from exc
    return grad


def poisson_bracket(fn_a, fn_b, state) -> float:
    """Canonical bracket {a, b} = sum_i da/dq_i db/dp_i - da/dp_i db/dq_i.

    ``fn_a`` and ``fn_b`` take the flat phase vector (q..., p...).  Works for
    any canonical chart, Cartesian or spherical, of even dimension.
    """
    x = as_vector(state)
    n = x.size // 2
    ga = gradient_fd(fn_a, x)
    gb = gradient_fd(fn_b, x)
    return float(np.dot(ga[:n], gb[n:]) - np.dot(ga[n:], gb[:n]))


def generator_functions(spec: SpaceSpec, arity: int = 3):
    """(J-, J+, J3) as functions of the flat phase vector."""
    def jm(x):
        return realize_generators(x, spec, arity).j_minus

    def jp(x):
        return realize_generators(x, spec, arity).j_plus

    def j3(x):
        return realize_generators(x, spec, arity).j_three

    return jm, jp, j3


def deformed_brackets(state, spec: SpaceSpec):
    """FD values of ({J3,J+}, {J3,J-}, {J-,J+}) at ``state``."""
    jm, jp, j3 = generator_functions(spec)
    return (
        poisson_bracket(j3, jp, state),
        poisson_bracket(j3, jm, state),
        poisson_bracket(jm, jp, state),
    )


def bracket_residuals(state, spec: SpaceSpec, brackets=None):
    """Residuals (r1, r2, r3) of the three deformed commutation rules."""
    gen = realize_generators(state, spec)
    b3p, b3m, bmp = deformed_brackets(state, spec) if brackets is None else brackets
    zj = spec.z * gen.j_minus
    r1 = b3p - 2.0 * gen.j_plus * math.cosh(zj)
    r2 = b3m + 2.0 * gen.j_minus * sinhc(zj)
    r3 = bmp - 4.0 * gen.j_three
    return r1, r2, r3
