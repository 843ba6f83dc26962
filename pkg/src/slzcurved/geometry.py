"""Metrics, connections and curvature in Cartesian and spherical-type charts.

Normalization
-------------
``metric_cartesian`` returns the metric whose inverse builds the kinetic
energy, ``H = J+ f(z J-)/2 = g^{ij} p_i p_j / 2``.  The line element that is
isometric to the spherical-type form carries an extra factor 2
(``line_element_cartesian``), and all Cartesian curvatures are reported for
that line element so that they agree with the spherical chart point by point.
Christoffel symbols do not see the constant factor.

Spherical-type chart
--------------------
With ``a = z T_z(r)^2``, ``s = kappa2 S_k(theta)^2``, ``c = C_k(theta)^2``::

    exp(2 z q1^2)            = 1 + a s sin^2(phi)
    exp(2 z (q1^2 + q2^2))   = 1 + a s
    exp(2 z q^2)             = 1 + a

Momenta are mapped canonically, ``p_sph = M^T p_cart`` with
``M = d q / d(r, theta, phi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, NumericalError
from .spaces import (
    C_kappa,
    PhasePointCartesian,
    PhasePointSpherical,
    S_kappa,
    SpaceSpec,
    sinhc,
)

EPS = np.finfo(float).eps


@dataclass
class CurvatureReport:
    christoffel: np.ndarray
    riemann: dict
    ricci: np.ndarray
    sectional: tuple
    scalar: float
    riemann_dense: Optional[np.ndarray] = field(default=None, repr=False)

    def identity_residual(self) -> float:
        """scalar - 2 (K12 + K13 + K23)."""
        return self.scalar - 2.0 * sum(self.sectional)


# ---------------------------------------------------------------------------
# generic tensor algebra for diagonal or dense metrics
# ---------------------------------------------------------------------------

def riemann_from_christoffel(gamma: np.ndarray, dgamma: np.ndarray) -> np.ndarray:
    """R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb}.

    ``dgamma[e, a, b, c]`` is the derivative of ``gamma[a, b, c]`` along ``e``.
    """
    d_c = np.einsum("cadb->abcd", dgamma)
    d_d = np.einsum("dacb->abcd", dgamma)
    quad = np.einsum("ace,edb->abcd", gamma, gamma) - np.einsum("ade,ecb->abcd", gamma, gamma)
    return d_c - d_d + quad


def _ricci_scalar_sectional(riem: np.ndarray, g: np.ndarray):
    ricci = np.einsum("abad->bd", riem)
    ginv = np.linalg.inv(g)
    scalar = float(np.einsum("bd,bd->", ginv, ricci))
    low = np.einsum("ae,ebcd->abcd", g, riem)
    sect = []
    for a, b in ((0, 1), (0, 2), (1, 2)):
        den = g[a, a] * g[b, b] - g[a, b] ** 2
        sect.append(float(low[a, b, a, b] / den))
    return ricci, scalar, tuple(sect)


def _sparse_riemann(riem: np.ndarray, tol=0.0) -> dict:
    out = {}
    for a in range(3):
        for b in range(3):
            for c in range(3):
                for d in range(c + 1, 3):
                    if abs(riem[a, b, c, d]) > tol:
                        out[(a, b, c, d)] = float(riem[a, b, c, d])
    return out


# ---------------------------------------------------------------------------
# Cartesian chart
# ---------------------------------------------------------------------------

# site i carries exp(z sum_j SIGMA[i][j] q_j^2) in J+ and J3
SIGMA = np.array([[0, 1, 1], [-1, 0, 1], [-1, -1, 0]], dtype=float)


def _profile_at(q, spec):
    x = spec.z * float(np.dot(q, q))
    f = spec.profile.f(x)
    if f == 0.0:
        raise DomainError(f"conformal profile vanishes at x = {x}")
    return x, f


def metric_cartesian(q, spec: SpaceSpec) -> np.ndarray:
    """Diagonal metric with ``H = g^{ij} p_i p_j / 2`` (no factor 2)."""
    q = np.asarray(q, dtype=float)
    z = spec.z
    _, f = _profile_at(q, spec)
    q2 = q * q
    diag = np.empty(3)
    for i in range(3):
        e = math.exp(-z * float(SIGMA[i] @ q2))
        diag[i] = e / (sinhc(z * q2[i]) * f)
    return np.diag(diag)


def line_element_cartesian(q, spec: SpaceSpec) -> np.ndarray:
    """The reference line element ds^2: twice ``metric_cartesian``."""
    return 2.0 * metric_cartesian(q, spec)


def _one_minus_u_coth(u: float) -> float:
    """(1 - u coth u)/u, finite at 0."""
    if abs(u) < 1e-3:
        u2 = u * u
        return -u / 3.0 + u * u2 / 45.0 - 2.0 * u * u2 * u2 / 945.0
    return (1.0 - u / math.tanh(u)) / u


def christoffel_cartesian(q, spec: SpaceSpec) -> np.ndarray:
    """Closed-form connection ``G[i, j, k] = Gamma^i_{jk}`` in Cartesian chart."""
    q = np.asarray(q, dtype=float)
    z = spec.z
    x, f = _profile_at(q, spec)
    ff = spec.profile.df(x) / f
    q2 = q * q
    s = [sinhc(z * v) for v in q2]
    gam = np.zeros((3, 3, 3))
    for i in range(3):
        # (1/q_i^2 - z/tanh(z q_i^2)) q_i - z f'/f q_i
        gam[i, i, i] = z * q[i] * (_one_minus_u_coth(z * q2[i]) - ff)
    for i in range(3):
        for j in range(i + 1, 3):
            gam[i, i, j] = gam[i, j, i] = -z * q[j] * (1.0 + ff)
            gam[j, i, j] = gam[j, j, i] = z * q[i] * (1.0 - ff)
            # q_j^2 sinh(z q_i^2) / (q_i sinh(z q_j^2)) = q_i s_i / s_j
            lower = float(np.sum(q2[i + 1:j]))  # q2^2 for the (1,3) pair
            gam[i, j, j] = -z * math.exp(z * (q2[i] + q2[j] + 2.0 * lower)) * q[i] * s[i] / s[j] * (1.0 - ff)
            gam[j, i, i] = z * math.exp(-z * (q2[i] + q2[j] + 2.0 * lower)) * q[j] * s[j] / s[i] * (1.0 + ff)
    return gam


def sectional_cartesian(q, spec: SpaceSpec):
    """Closed-form (K12, K13, K23) of the line element."""
    q = np.asarray(q, dtype=float)
    z = spec.z
    x, f = _profile_at(q, spec)
    f1, f2 = spec.profile.df(x), spec.profile.d2f(x)
    a = f + f1 * f1 / f
    q2 = q * q
    e3 = math.exp(2 * z * q2[2])
    e23 = math.exp(2 * z * (q2[1] + q2[2]))
    ex = math.exp(2 * x)
    pre = 0.25 * z * math.exp(-x)
    mid = 2.0 * (1.0 + ex) * f1
    k12 = pre * ((1 + e3 - 2 * ex) * a + mid - 2 * (e3 - ex) * f2)
    k13 = pre * ((2 - e3 + e23 - 2 * ex) * a + mid - 2 * (1 - e3 + e23 - ex) * f2)
    k23 = pre * ((2 - e23 - ex) * a + mid - 2 * (1 - e23) * f2)
    return k12, k13, k23


def scalar_curvature_x(x: float, profile) -> float:
    """Scalar curvature K(x), x = z q^2, divided by z."""
    f, f1, f2 = profile.f(x), profile.df(x), profile.d2f(x)
    return 6.0 * f1 * math.cosh(x) + (4.0 * f2 - 5.0 * f - 5.0 * f1 * f1 / f) * math.sinh(x)


def scalar_cartesian(q, spec: SpaceSpec) -> float:
    q = np.asarray(q, dtype=float)
    x, _ = _profile_at(q, spec)
    return spec.z * scalar_curvature_x(x, spec.profile)


def _fd_tensor_derivative(fn, x, h0=None):
    """Central differences of an array-valued fn; result indexed [e, ...]."""
    x = np.asarray(x, dtype=float)
    h0 = np.cbrt(EPS) if h0 is None else h0
    out = []
    for e in range(x.size):
        h = h0 * max(1.0, abs(x[e]))
        xp, xm = x.copy(), x.copy()
        xp[e] += h
        xm[e] -= h
        out.append((fn(xp) - fn(xm)) / (xp[e] - xm[e]))
    return np.array(out)


def curvature_cartesian(q, spec: SpaceSpec) -> CurvatureReport:
    """Curvature of the reference line element at Cartesian point ``q``.

    Connection, sectional and scalar curvatures are closed forms.  Riemann
    and Ricci components come from differentiating the closed-form
    connection numerically.
    """
    q = np.asarray(q, dtype=float)
    gam = christoffel_cartesian(q, spec)
    dgam = _fd_tensor_derivative(lambda y: christoffel_cartesian(y, spec), q)
    riem = riemann_from_christoffel(gam, dgam)
    ricci = np.einsum("abad->bd", riem)
    return CurvatureReport(
        christoffel=gam,
        riemann=_sparse_riemann(riem, 1e-14),
        ricci=ricci,
        sectional=sectional_cartesian(q, spec),
        scalar=scalar_cartesian(q, spec),
        riemann_dense=riem,
    )


# ---------------------------------------------------------------------------
# spherical-type chart
# ---------------------------------------------------------------------------

def _radial_block(r, spec):
    z = spec.z
    c, s = C_kappa(r, z), S_kappa(r, z)
    if c <= 0.0:
        raise DomainError(f"r = {r} outside the patch (C_z(r) = {c})")
    G, Gr, Grr = spec.profile.radial(r, z)
    if G == 0.0:
        raise DomainError("conformal profile vanishes")
    return c, s, s / c, G, Gr, Grr


def metric_spherical(r: float, theta: float, spec: SpaceSpec) -> np.ndarray:
    """diag(1, k2 S_z(r)^2, k2 S_z(r)^2 S_k2(theta)^2) / (g C_z(r))."""
    c, s, _, G, _, _ = _radial_block(r, spec)
    conf = 1.0 / (G * c)
    st = S_kappa(theta, spec.kappa2)
    k2 = spec.kappa2
    return np.diag([conf, conf * k2 * s * s, conf * k2 * s * s * st * st])


def _angular_gamma(r, spec):
    """Gamma^theta_{theta r} (= Gamma^phi_{phi r})."""
    c, s, t, G, Gr, _ = _radial_block(r, spec)
    if s == 0.0:
        raise DomainError("r = 0 is a coordinate singularity")
    return (1.0 + c * c) / (2.0 * s * c) - Gr / (2.0 * G)


def christoffel_spherical(r: float, theta: float, spec: SpaceSpec) -> np.ndarray:
    """Closed-form connection; index order (r, theta, phi)."""
    z, k2 = spec.z, spec.kappa2
    c, s, t, G, Gr, _ = _radial_block(r, spec)
    st, ct = S_kappa(theta, k2), C_kappa(theta, k2)
    if st == 0.0:
        raise DomainError("sin(lambda2 theta) = 0 is a coordinate singularity")
    a = _angular_gamma(r, spec)
    gam = np.zeros((3, 3, 3))
    gam[0, 0, 0] = 0.5 * (z * t - Gr / G)
    gam[0, 1, 1] = -k2 * s * s * a
    gam[0, 2, 2] = -k2 * s * s * st * st * a
    gam[1, 1, 0] = gam[1, 0, 1] = a
    gam[2, 2, 0] = gam[2, 0, 2] = a
    gam[1, 2, 2] = -st * ct
    gam[2, 2, 1] = gam[2, 1, 2] = ct / st
    return gam


def curvature_spherical(r: float, theta: float, spec: SpaceSpec) -> CurvatureReport:
    """Every closed-form block: connection, Riemann, Ricci, sectional, scalar."""
    z, k2 = spec.z, spec.kappa2
    c, s, t, G, Gr, Grr = _radial_block(r, spec)
    if s == 0.0 or t == 0.0:
        raise DomainError("r = 0 is a coordinate singularity")
    st = S_kappa(theta, k2)
    if st == 0.0:
        raise DomainError("sin(lambda2 theta) = 0 is a coordinate singularity")
    gam = christoffel_spherical(r, theta, spec)
    a = _angular_gamma(r, spec)
    lg = Gr / G
    r_trtr = 0.5 * (lg / t + Grr / G - lg * lg - z * z * t * t)
    r_ptpt = k2 * (1.0 - s * s * a * a)
    riem = {
        (1, 0, 1, 0): r_trtr,
        (2, 0, 2, 0): r_trtr,
        (0, 1, 0, 1): k2 * s * s * r_trtr,
        (0, 2, 0, 2): s * s * k2 * st * st * r_trtr,
        (2, 1, 2, 1): r_ptpt,
        (1, 2, 1, 2): st * st * r_ptpt,
    }
    dense = np.zeros((3, 3, 3, 3))
    for (i, j, k, l), v in riem.items():
        dense[i, j, k, l] = v
        dense[i, j, l, k] = -v
    r_thth = k2 * s * s * ((1.0 + 2.0 * c * c) / (2.0 * s * c) * lg + Grr / (2.0 * G)
                           - 0.75 * lg * lg - 0.75 * z * z * t * t)
    ricci = np.diag([2.0 * r_trtr, r_thth, st * st * r_thth])
    k_rt = 0.5 * c * (Gr / t + Grr - Gr * Gr / G - z * z * t * t * G)
    k_tp = c * G * (1.0 / (s * s) - a * a)
    scalar = 2.0 * c * ((1.0 + 3.0 * c * c) / (2.0 * s * c) * Gr + Grr
                        - 1.25 * Gr * Gr / G - 1.25 * z * z * t * t * G)
    return CurvatureReport(
        christoffel=gam,
        riemann=riem,
        ricci=ricci,
        sectional=(k_rt, k_rt, k_tp),
        scalar=scalar,
        riemann_dense=dense,
    )


# ---------------------------------------------------------------------------
# coordinate map
# ---------------------------------------------------------------------------

def _sign(v: float) -> float:
    return -1.0 if v < 0 else 1.0


def _spherical_positions(q, spec):
    z, k2 = spec.z, spec.kappa2
    if z == 0.0:
        raise DomainError("the spherical-type map needs z != 0")
    q2 = np.asarray(q, dtype=float) ** 2
    a = math.expm1(2 * z * float(q2.sum()))
    if a == 0.0:
        raise DomainError("the origin is a coordinate singularity")
    sP = math.expm1(2 * z * q2[0]) / a
    sQ = math.exp(2 * z * q2[0]) * math.expm1(2 * z * q2[1]) / a
    c = math.exp(2 * z * (q2[0] + q2[1])) * math.expm1(2 * z * q2[2]) / a
    s = sP + sQ
    if min(sP, sQ, c) < 0.0 or a < -1.0:
        raise DomainError("point lies outside the spherical-type patch")
    if z > 0:
        r = math.atan(math.sqrt(a)) / math.sqrt(z)
    else:
        r = math.atanh(math.sqrt(-a)) / math.sqrt(-z)
    if k2 > 0:
        theta = math.atan2(math.sqrt(s), _sign(q[2]) * math.sqrt(c)) / math.sqrt(k2)
    else:
        # kappa2 S^2 = -sinh^2 must equal s >= 0: only the theta = 0 ray
        if s > 0.0:
            raise DomainError("for kappa2 < 0 the Cartesian point must lie on the q3 axis")
        theta = 0.0
    phi = math.atan2(_sign(q[0]) * math.sqrt(sP), _sign(q[1]) * math.sqrt(sQ)) % (2 * math.pi)
    return r, theta, phi


def _dual(v, g=None):
    return np.array([v, *(np.zeros(3) if g is None else g)], dtype=float)


def _cartesian_with_jacobian(r, theta, phi, spec):
    """q(r, theta, phi) and M = dq/d(r, theta, phi), forward-mode."""
    z, k2 = spec.z, spec.kappa2
    if z == 0.0:
        raise DomainError("the spherical-type map needs z != 0")
    cr = C_kappa(r, z)
    if cr <= 0.0:
        raise DomainError(f"r = {r} outside the patch")
    t = S_kappa(r, z) / cr
    st, ct = S_kappa(theta, k2), C_kappa(theta, k2)
    # dual numbers: [value, d/dr, d/dtheta, d/dphi]
    a = np.array([z * t * t, 2 * z * t / (cr * cr), 0.0, 0.0])
    s = np.array([k2 * st * st, 0.0, 2 * k2 * st * ct, 0.0])
    c = np.array([ct * ct, 0.0, -2 * k2 * st * ct, 0.0])
    P = np.array([math.sin(phi) ** 2, 0.0, 0.0, math.sin(2 * phi)])
    Q = np.array([math.cos(phi) ** 2, 0.0, 0.0, -math.sin(2 * phi)])

    def mul(u, v):
        return np.array([u[0] * v[0], *(u[0] * v[1:] + v[0] * u[1:])])

    def div(u, v):
        return np.array([u[0] / v[0], *((u[1:] * v[0] - u[0] * v[1:]) / v[0] ** 2)])

    def log1p(u):
        return np.array([math.log1p(u[0]), *(u[1:] / (1.0 + u[0]))])

    one = np.array([1.0, 0.0, 0.0, 0.0])
    as_ = mul(a, s)
    w1 = mul(as_, P)
    w2 = div(mul(as_, Q), one + w1)
    w3 = div(mul(a, c), one + as_)
    signs = (_sign(math.sin(phi)), _sign(math.cos(phi)), _sign(ct))
    q = np.empty(3)
    M = np.empty((3, 3))
    for i, w in enumerate((w1, w2, w3)):
        L = log1p(w)
        val = L[0] / (2 * z)
        if val < 0.0:
            raise DomainError("point lies outside the spherical-type patch")
        q[i] = signs[i] * math.sqrt(val)
        with np.errstate(divide="ignore", invalid="ignore"):
            M[i] = L[1:] / (4 * z * q[i]) if q[i] != 0.0 else np.full(3, np.nan)
    return q, M


def to_spherical(point: PhasePointCartesian, spec: SpaceSpec) -> PhasePointSpherical:
    """Canonical map to spherical-type variables; momenta p_sph = M^T p."""
    if not isinstance(point, PhasePointCartesian):
        point = PhasePointCartesian.from_vector(point)
    q, p = np.array(point.q), np.array(point.p)
    r, theta, phi = _spherical_positions(q, spec)
    if not np.any(p):
        return PhasePointSpherical(r, theta, phi, 0.0, 0.0, 0.0)
    _, M = _cartesian_with_jacobian(r, theta, phi, spec)
    if not np.all(np.isfinite(M)):
        raise DomainError("momentum map is singular on the coordinate axes")
    ps = M.T @ p
    return PhasePointSpherical(r, theta, phi, *map(float, ps))


def to_cartesian(point: PhasePointSpherical, spec: SpaceSpec) -> PhasePointCartesian:
    """Inverse of :func:`to_spherical`."""
    if not isinstance(point, PhasePointSpherical):
        point = PhasePointSpherical.from_vector(point)
    q, M = _cartesian_with_jacobian(point.r, point.theta, point.phi, spec)
    ps = np.array([point.p_r, point.p_theta, point.p_phi])
    if not np.any(ps):
        return PhasePointCartesian(tuple(q), (0.0, 0.0, 0.0))
    if not np.all(np.isfinite(M)):
        raise DomainError("momentum map is singular on the coordinate axes")
    p = np.linalg.solve(M.T, ps)
    return PhasePointCartesian(tuple(q), tuple(p))


def coordinate_jacobian(r, theta, phi, spec: SpaceSpec) -> np.ndarray:
    """M = dq/d(r, theta, phi) at a spherical-type point."""
    return _cartesian_with_jacobian(r, theta, phi, spec)[1]


# ---------------------------------------------------------------------------
# finite-difference oracle
# ---------------------------------------------------------------------------

def curvature_oracle_fd(metric_fn: Callable[[np.ndarray], np.ndarray], point) -> CurvatureReport:
    """Connection and curvature from metric values alone (central differences).

    First derivatives use ``h = eps**(1/3)``, second derivatives
    ``h = eps**(1/4)``, each scaled by ``max(1, |x|)``.
    """
    x = np.asarray(point, dtype=float)
    n = x.size
    g = np.asarray(metric_fn(x), dtype=float)
    if np.linalg.cond(g) > 1e10:
        raise NumericalError("metric is too ill-conditioned for finite differences")
    ginv = np.linalg.inv(g)
    h1 = np.cbrt(EPS) * np.maximum(1.0, np.abs(x))
    h2 = EPS ** 0.25 * np.maximum(1.0, np.abs(x))

    def shifted(steps):
        y = x.copy()
        for k, hk in steps:
            y[k] += hk
        return np.asarray(metric_fn(y), dtype=float)

    dg = np.empty((n, n, n))
    for e in range(n):
        dg[e] = (shifted([(e, h1[e])]) - shifted([(e, -h1[e])])) / (2 * h1[e])
    ddg = np.empty((n, n, n, n))
    for e in range(n):
        for f in range(e, n):
            if e == f:
                val = (shifted([(e, h2[e])]) - 2 * g + shifted([(e, -h2[e])])) / h2[e] ** 2
            else:
                val = (shifted([(e, h2[e]), (f, h2[f])]) - shifted([(e, h2[e]), (f, -h2[f])])
                       - shifted([(e, -h2[e]), (f, h2[f])]) + shifted([(e, -h2[e]), (f, -h2[f])])) / (
                    4 * h2[e] * h2[f])
            ddg[e, f] = ddg[f, e] = val
    # Gamma_{l jk} = (d_j g_lk + d_k g_jl - d_l g_jk)/2
    low = 0.5 * (np.einsum("jlk->ljk", dg) + np.einsum("kjl->ljk", dg) - dg)
    gam = np.einsum("il,ljk->ijk", ginv, low)
    # R_{abcd} = (d_b d_c g_ad + d_a d_d g_bc - d_a d_c g_bd - d_b d_d g_ac)/2
    #            + g_ef (G^e_bc G^f_ad - G^e_bd G^f_ac)
    second = 0.5 * (np.einsum("bcad->abcd", ddg) + np.einsum("adbc->abcd", ddg)
                    - np.einsum("acbd->abcd", ddg) - np.einsum("bdac->abcd", ddg))
    quad = (np.einsum("ef,ebc,fad->abcd", g, gam, gam) - np.einsum("ef,ebd,fac->abcd", g, gam, gam))
    r_low = second + quad
    # R_{abcd} here is positive on spheres in the (a b a b) slot ordering
    riem = np.einsum("ae,ebcd->abcd", ginv, r_low)
    ricci, scalar, sect = _ricci_scalar_sectional(riem, g)
    return CurvatureReport(
        christoffel=gam,
        riemann=_sparse_riemann(riem, 1e-12),
        ricci=ricci,
        sectional=sect,
        scalar=scalar,
        riemann_dense=riem,
    )
