"""Hamiltonians, constants of motion, flows and the radial reduction.

Spherical-type states use the momenta in which the Hamiltonian reads::

    H = 1/2 G(r) C_z(r) (p_r^2 + C3 / (kappa2 S_z(r)^2)) + U(r)

    C2 = p_phi^2 + kappa2 b2 / cos^2 phi + kappa2 b3 / sin^2 phi
    C3 = p_theta^2 + kappa2 b1 / C_k2(theta)^2 + C2 / S_k2(theta)^2

with ``G(r) = g(lambda_1 r)``.  Cartesian states use the coalgebra form
``1/2 J+ f(z J-) + U(r(q))``.  The two are related by
:func:`spherical_counterpart` and :func:`spherical_state` (momenta doubled,
energies doubled); see :func:`spherical_constants` for the invariants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from .coalgebra import casimir_values, gradient_fd, realize_generators
from .errors import DomainError, NoBoundRegion, SingularityApproach, StepUnderflow
from .geometry import to_spherical
from .integrator import dopri5
from .potentials import IntrinsicPotential
from .spaces import (
    C_kappa,
    PhasePointCartesian,
    PhasePointSpherical,
    S_kappa,
    SpaceSpec,
    as_vector,
    sinhc,
    sinhc_prime,
)

REPRESENTATIONS = ("cartesian", "spherical")
SINGULARITY_MARGIN = 1e-6


@dataclass(frozen=True)
class HamiltonianSpec:
    """A model plus an optional central potential.

    ``potential`` is a function of the radius only; any centrifugal terms
    live in ``space.b``.  In the Cartesian representation the potential is
    evaluated at ``r(q)``, so the Cartesian Hamiltonian is
    ``1/2 J+ f + U(r(q))``.
    """

    space: SpaceSpec
    potential: Optional[IntrinsicPotential] = None
    representation: str = "spherical"

    def __post_init__(self):
        if self.representation not in REPRESENTATIONS:
            raise ValueError(f"representation must be one of {REPRESENTATIONS}")

    def potential_value(self, r: float) -> float:
        if self.potential is None:
            return 0.0
        return self.potential.value(r, self.space)

    def potential_derivative(self, r: float) -> float:
        if self.potential is None:
            return 0.0
        return self.potential.derivative(r, self.space)


# ---------------------------------------------------------------------------
# radial / angular building blocks
# ---------------------------------------------------------------------------

def _radial(r, spec):
    """K = G C_z, K', S_z(r)."""
    if r <= 0.0:
        raise DomainError("r must be positive")
    z = spec.z
    G, Gr, _ = spec.profile.radial(r, z)
    c, s = C_kappa(r, z), S_kappa(r, z)
    return G * c, Gr * c - z * s * G, s, c


def _angular(theta, phi, p_theta, p_phi, spec):
    """(C2, C3) plus the trig values reused by the flow."""
    k2 = spec.kappa2
    b1, b2, b3 = spec.b
    st, ct = S_kappa(theta, k2), C_kappa(theta, k2)
    sf, cf = math.sin(phi), math.cos(phi)
    c2 = p_phi * p_phi
    if b2 != 0.0:
        if cf == 0.0:
            raise DomainError("cos(phi) = 0 with b2 != 0")
        c2 += k2 * b2 / (cf * cf)
    if b3 != 0.0:
        if sf == 0.0:
            raise DomainError("sin(phi) = 0 with b3 != 0")
        c2 += k2 * b3 / (sf * sf)
    c3 = p_theta * p_theta
    if b1 != 0.0:
        if ct == 0.0:
            raise DomainError("cos(lambda_2 theta) = 0 with b1 != 0")
        c3 += k2 * b1 / (ct * ct)
    if c2 != 0.0:
        if st == 0.0:
            raise DomainError("sin(lambda_2 theta) = 0 with nonzero C2")
        c3 += c2 / (st * st)
    return c2, c3, (st, ct, sf, cf)


def _spherical_vector(state):
    v = as_vector(state)
    if v.shape != (6,):
        raise DomainError("spherical state needs (r, theta, phi, p_r, p_theta, p_phi)")
    return v


def _kinetic_radial(K, s, c3, p_r, k2):
    if c3 != 0.0 and s == 0.0:
        raise DomainError("sin(lambda_1 r) = 0 with nonzero C3")
    return 0.5 * K * (p_r * p_r + (c3 / (k2 * s * s) if c3 != 0.0 else 0.0))


def spherical_hamiltonian(state, hspec: HamiltonianSpec) -> float:
    r, theta, phi, p_r, p_t, p_f = _spherical_vector(state)
    spec = hspec.space
    K, _, s, _ = _radial(r, spec)
    _, c3, _ = _angular(theta, phi, p_t, p_f, spec)
    return float(_kinetic_radial(K, s, c3, p_r, spec.kappa2) + hspec.potential_value(r))


# ---------------------------------------------------------------------------
# Cartesian pieces
# ---------------------------------------------------------------------------

def radius_of(q, z: float) -> float:
    """Geodesic radius r(q) from tan^2(lambda_1 r) = exp(2 z q^2) - 1."""
    q2 = float(np.dot(q, q))
    if z == 0.0:
        return math.sqrt(2.0 * q2)
    a = math.expm1(2 * z * q2)
    if z > 0:
        return math.atan(math.sqrt(a)) / math.sqrt(z)
    if a <= -1.0:
        raise DomainError("q outside the hyperbolic patch")
    return math.atanh(math.sqrt(-a)) / math.sqrt(-z)


def cartesian_hamiltonian(state, hspec: HamiltonianSpec) -> float:
    v = as_vector(state)
    spec = hspec.space
    gens = realize_generators(v, spec)
    x = spec.z * gens.j_minus
    out = 0.5 * gens.j_plus * spec.profile.f(x)
    if hspec.potential is not None:
        out += hspec.potential_value(radius_of(v[:3], spec.z))
    return float(out)


def hamiltonian(state, hspec: HamiltonianSpec) -> float:
    """Energy in the representation chosen by ``hspec``."""
    if hspec.representation == "spherical":
        return spherical_hamiltonian(state, hspec)
    return cartesian_hamiltonian(state, hspec)


# ---------------------------------------------------------------------------
# constants of motion
# ---------------------------------------------------------------------------

def lower_casimir_spherical(state, spec: SpaceSpec) -> float:
    """C_(2): the two-site Casimir on the (q2, q3) pair in spherical form."""
    _, theta, phi, _, p_t, p_f = _spherical_vector(state)
    k2 = spec.kappa2
    b1, b2, _ = spec.b
    st, ct = S_kappa(theta, k2), C_kappa(theta, k2)
    sf, cf = math.sin(phi), math.cos(phi)
    if st == 0.0 and p_f * sf != 0.0:
        raise DomainError("sin(lambda_2 theta) = 0 in C_(2)")
    # 1/T = C/S
    cot = ct / st if st != 0.0 else 0.0
    out = (cf * p_t - sf * p_f * cot) ** 2
    tt = st / ct if ct != 0.0 else math.inf
    if b1 != 0.0:
        if ct == 0.0:
            raise DomainError("cos(lambda_2 theta) = 0 with b1 != 0")
        out += b1 * k2 * k2 * tt * tt * cf * cf
    if b2 != 0.0:
        if st == 0.0 or cf == 0.0:
            raise DomainError("b2 term singular at tan(lambda_2 theta) cos(phi) = 0")
        out += b2 * k2 / (tt * tt * cf * cf)
    return float(out)


def integrals_of_motion(state, hspec: HamiltonianSpec) -> Tuple[float, float, float, float]:
    """(C2, C_(2), C3, H) at a spherical-type state."""
    v = _spherical_vector(state)
    spec = hspec.space
    c2, c3, _ = _angular(v[1], v[2], v[4], v[5], spec)
    c2l = lower_casimir_spherical(v, spec)
    h = spherical_hamiltonian(v, replace(hspec, representation="spherical"))
    return float(c2), c2l, float(c3), h


def c3_from_chain(theta: float, p_theta: float, c2: float, spec: SpaceSpec) -> float:
    """C3 rebuilt from a given C2 through the separated (theta, p_theta) form."""
    k2 = spec.kappa2
    st, ct = S_kappa(theta, k2), C_kappa(theta, k2)
    out = p_theta * p_theta + c2 / (st * st)
    if spec.b[0] != 0.0:
        out += k2 * spec.b[0] / (ct * ct)
    return out


def extra_integral_staeckel(state, spec: SpaceSpec) -> float:
    """I = sinh(z q1^2)/(2 z q1^2) e^{z q1^2} p1^2.

    Conserved by the free flow only for the constant-curvature profile
    f = e^x; for other profiles the value is still returned.
    """
    v = as_vector(state)
    q1, p1 = v[0], v[3]
    u = spec.z * q1 * q1
    return float(0.5 * sinhc(u) * math.exp(u) * p1 * p1)


def staeckel_is_conserved(spec: SpaceSpec) -> bool:
    return spec.profile.tag == "exponential" and spec.profile.param == 1.0


# ---------------------------------------------------------------------------
# Hamilton's equations
# ---------------------------------------------------------------------------

def _spherical_flow(v, hspec):
    r, theta, phi, p_r, p_t, p_f = v
    spec = hspec.space
    k2 = spec.kappa2
    b1, b2, b3 = spec.b
    K, dK, s, c = _radial(r, spec)
    c2, c3, (st, ct, sf, cf) = _angular(theta, phi, p_t, p_f, spec)
    if s == 0.0:
        raise DomainError("r = 0 is a coordinate singularity")
    W = K / (k2 * s * s)
    # d/dr [K/(k2 S^2)] with S' = C
    dW = (dK * s - 2.0 * K * c) / (k2 * s * s * s)
    dU = hspec.potential_derivative(r)

    dc3_dt = 0.0
    if c2 != 0.0:
        dc3_dt -= 2.0 * c2 * ct / (st * st * st)
    if b1 != 0.0:
        dc3_dt += 2.0 * k2 * k2 * b1 * st / (ct * ct * ct)
    dc2_df = 0.0
    if b2 != 0.0:
        dc2_df += 2.0 * k2 * b2 * sf / (cf * cf * cf)
    if b3 != 0.0:
        dc2_df -= 2.0 * k2 * b3 * cf / (sf * sf * sf)
    inv_st2 = 1.0 / (st * st) if st != 0.0 else 0.0
    return np.array([
        K * p_r,
        W * p_t,
        W * p_f * inv_st2,
        -(0.5 * dK * p_r * p_r + 0.5 * dW * c3 + dU),
        -0.5 * W * dc3_dt,
        -0.5 * W * dc2_df * inv_st2,
    ])


def _cartesian_flow(v, hspec):
    spec = hspec.space
    z, b = spec.z, spec.b
    q, p = v[:3], v[3:]
    q2 = q * q
    gens = realize_generators(v, spec)
    x = z * gens.j_minus
    f0, f1 = spec.profile.f(x), spec.profile.df(x)
    # site factors E_i and the antisymmetric exponent pattern
    sigma = np.array([[0, 1, 1], [-1, 0, 1], [-1, -1, 0]], dtype=float)
    E = np.array([math.exp(z * float(sigma[i] @ q2)) for i in range(3)])
    A = np.empty(3)
    dA = np.empty(3)
    dJp_dp = np.empty(3)
    for i in range(3):
        u = z * q2[i]
        sh = sinhc(u)
        A[i] = sh * p[i] * p[i] + (b[i] / (q2[i] * sh) if b[i] != 0.0 else 0.0)
        dJp_dp[i] = 2.0 * sh * p[i] * E[i]
        # dA/dq = (sinhc'(u) z p^2 - b d/du[1/(q^2 sinhc)] ...) 2 q
        da = sinhc_prime(u) * z * p[i] * p[i] * 2.0 * q[i]
        if b[i] != 0.0:
            # b/(q^2 sinhc(z q^2)) = b z / sinh(z q^2)
            da -= b[i] * (sh + u * sinhc_prime(u)) * 2.0 / (q2[i] * q[i] * sh * sh)
        dA[i] = da
    AE = A * E
    dJp_dq = dA * E + 2.0 * z * q * (AE @ sigma)
    dV = 0.0
    if hspec.potential is not None:
        r = radius_of(q, z)
        if r == 0.0:
            raise DomainError("potential singular at the origin")
        # dr/dq_j = 2 q_j / T_z(r)
        dV = hspec.potential_derivative(r) * 2.0 / (S_kappa(r, z) / C_kappa(r, z))
    common = 0.5 * gens.j_plus * f1 * 2.0 * z
    dH_dq = 0.5 * dJp_dq * f0 + common * q + dV * q
    dH_dp = 0.5 * dJp_dp * f0
    return np.concatenate([dH_dp, -dH_dq])


def flow_derivatives(state, hspec: HamiltonianSpec) -> np.ndarray:
    """(dq/dt, dp/dt) from analytic partial derivatives."""
    v = as_vector(state).astype(float)
    if hspec.representation == "spherical":
        return _spherical_flow(v, hspec)
    return _cartesian_flow(v, hspec)


def flow_derivatives_fd(state, hspec: HamiltonianSpec) -> np.ndarray:
    """Same as :func:`flow_derivatives` from central differences (test oracle)."""
    v = as_vector(state).astype(float)
    grad = gradient_fd(lambda y: hamiltonian(y, hspec), v)
    return np.concatenate([grad[3:], -grad[:3]])


# ---------------------------------------------------------------------------
# invariants along a flow
# ---------------------------------------------------------------------------

def invariant_names(hspec: HamiltonianSpec, with_staeckel: bool = False) -> Tuple[str, ...]:
    names = ("H", "C2", "C2_lower", "C3")
    return names + ("I",) if with_staeckel else names


def invariant_vector(v, hspec: HamiltonianSpec, with_staeckel: bool = False) -> np.ndarray:
    if hspec.representation == "spherical":
        c2, c2l, c3, h = integrals_of_motion(v, hspec)
        out = [h, c2, c2l, c3]
    else:
        c2, c2l, c3 = casimir_values(v, hspec.space)
        out = [cartesian_hamiltonian(v, hspec), c2, c2l, c3]
    if with_staeckel:
        out.append(extra_integral_staeckel(v, hspec.space))
    return np.array(out, dtype=float)


def _margin_check(hspec: HamiltonianSpec, margin: float):
    spec = hspec.space
    z, k2 = spec.z, spec.kappa2
    b1, b2, b3 = spec.b

    def spherical(v):
        r, theta, phi = v[0], v[1], v[2]
        if r < margin:
            return f"r = {r:.3e} within {margin:g} of the origin"
        if z > 0 and 0.5 * math.pi / math.sqrt(z) - r < margin:
            return "r within margin of the patch boundary"
        st, ct = S_kappa(theta, k2), C_kappa(theta, k2)
        if abs(st) < margin and (v[5] != 0.0 or b2 != 0.0 or b3 != 0.0):
            return "theta within margin of the polar axis"
        if b1 != 0.0 and abs(ct) < margin:
            return "theta within margin of cos(lambda_2 theta) = 0"
        if b2 != 0.0 and abs(math.cos(phi)) < margin:
            return "phi within margin of cos(phi) = 0"
        if b3 != 0.0 and abs(math.sin(phi)) < margin:
            return "phi within margin of sin(phi) = 0"
        return None

    def cartesian(v):
        for i in range(3):
            if spec.b[i] != 0.0 and abs(v[i]) < margin:
                return f"q{i + 1} within margin of a centrifugal wall"
        if hspec.potential is not None and float(np.dot(v[:3], v[:3])) < margin * margin:
            return "q within margin of the potential centre"
        return None

    return spherical if hspec.representation == "spherical" else cartesian


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    invariants_log: np.ndarray
    invariant_names: Tuple[str, ...]
    step_stats: Dict[str, float]
    representation: str = "spherical"
    truncated: bool = False
    message: str = ""

    @property
    def t_reached(self) -> float:
        return float(self.times[-1])

    def drift(self, floor: float = 1e-12) -> Dict[str, float]:
        """max_t |I(t) - I(0)| / max(|I(0)|, floor) per invariant."""
        out = {}
        for j, name in enumerate(self.invariant_names):
            col = self.invariants_log[:, j]
            out[name] = float(np.max(np.abs(col - col[0])) / max(abs(col[0]), floor))
        return out

    def to_rows(self) -> List[dict]:
        rows = []
        for t, y, inv in zip(self.times, self.states, self.invariants_log):
            row = {"t": float(t)}
            row.update({f"y{i}": float(c) for i, c in enumerate(y)})
            row.update({n: float(c) for n, c in zip(self.invariant_names, inv)})
            rows.append(row)
        return rows


def _build_trajectory(raw, hspec, with_staeckel):
    states = np.array(raw.states)
    names = invariant_names(hspec, with_staeckel)
    log = []
    for y in states:
        try:
            log.append(invariant_vector(y, hspec, with_staeckel))
        except DomainError:
            log.append(np.full(len(names), np.nan))
    return Trajectory(
        times=np.array(raw.times), states=states, invariants_log=np.array(log),
        invariant_names=names, step_stats=raw.stats.as_dict(),
        representation=hspec.representation, truncated=raw.truncated, message=raw.message,
    )


def integrate(initial, hspec: HamiltonianSpec, t_end: float, tol: float = 1e-10,
              t_eval: Optional[Sequence[float]] = None, margin: float = SINGULARITY_MARGIN,
              with_staeckel: bool = False, on_singularity: str = "raise") -> Trajectory:
    """Integrate Hamilton's equations with a Dormand-Prince 5(4) pair.

    ``on_singularity="truncate"`` returns the partial trajectory (flagged
    ``truncated``) instead of raising :class:`SingularityApproach` or
    :class:`StepUnderflow`.
    """
    if t_end <= 0.0:
        raise ValueError("t_end must be positive")
    y0 = as_vector(initial).astype(float)
    check = _margin_check(hspec, margin)
    msg = check(y0)
    if msg:
        raise DomainError(f"initial state inadmissible: {msg}")

    def rhs(y):
        return flow_derivatives(y, hspec)

    try:
        raw = dopri5(rhs, y0, t_end, tol, t_eval=t_eval, margin_check=check)
    except (SingularityApproach, StepUnderflow) as exc:
        traj = _build_trajectory(exc.trajectory, hspec, with_staeckel)
        if on_singularity == "truncate":
            return traj
        raise type(exc)(str(exc), t_reached=exc.t_reached, trajectory=traj) from None
    return _build_trajectory(raw, hspec, with_staeckel)


# ---------------------------------------------------------------------------
# conventions
# ---------------------------------------------------------------------------

def spherical_state(point: PhasePointCartesian, spec: SpaceSpec) -> PhasePointSpherical:
    """Spherical-type state in the spherical momentum convention (2x canonical)."""
    s = to_spherical(point, spec)
    return PhasePointSpherical(s.r, s.theta, s.phi, 2 * s.p_r, 2 * s.p_theta, 2 * s.p_phi)


def spherical_counterpart(hspec: HamiltonianSpec) -> HamiltonianSpec:
    """Spherical spec whose H equals twice the Cartesian energy.

    The Cartesian sites (q1, q2, q3) map to (sin phi, cos phi, cos theta),
    so the centrifugal coefficients are reversed.  The momentum doubling
    scales them by 4 (and the two azimuthal ones by 1/kappa2, which the
    spherical H absorbs into lambda_2^2); the potential scales by 2.
    """
    spec = hspec.space
    b1, b2, b3 = spec.b
    k2 = spec.kappa2
    b = (4.0 * b3, 4.0 * b2 / k2, 4.0 * b1 / k2)
    pot = hspec.potential
    if pot is not None:
        pot = replace(pot, strength=2.0 * pot.strength)
    return HamiltonianSpec(spec.with_b(b), pot, "spherical")


def spherical_constants(h: float, c2: float, c2_lower: float, c3: float, kappa2: float,
                        b_spherical: Sequence[float] = (0.0, 0.0, 0.0)
                        ) -> Tuple[float, float, float, float]:
    """Coalgebra values to spherical-form ones: H = 2h, C2 = 4c2,
    C_(2) = 4 kappa2 c2_lower, C3 = 4 kappa2 c3.

    With centrifugal terms the spherical C_(2) omits the constant
    ``kappa2 b1 + kappa2^2 b2`` (spherical b's), which is subtracted here.
    """
    b1, b2, _ = b_spherical
    offset = kappa2 * b1 + kappa2 * kappa2 * b2
    return 2.0 * h, 4.0 * c2, 4.0 * kappa2 * c2_lower - offset, 4.0 * kappa2 * c3


# ---------------------------------------------------------------------------
# radial reduction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialProblem:
    energy: float
    c3: float
    hspec: HamiltonianSpec = field(repr=False)
    turning_points: Tuple[float, ...] = ()
    r_range: Tuple[float, float] = (0.0, math.inf)

    def effective_potential(self, r: float) -> float:
        """U(r) + 1/2 G C c3 / (kappa2 S_z^2)."""
        spec = self.hspec.space
        K, _, s, _ = _radial(r, spec)
        return 0.5 * K * self.c3 / (spec.kappa2 * s * s) + self.hspec.potential_value(r)

    def hamiltonian(self, r: float, p_r: float) -> float:
        K, _, _, _ = _radial(r, self.hspec.space)
        return 0.5 * K * p_r * p_r + self.effective_potential(r)

    def flow(self, y) -> np.ndarray:
        r, p_r = y
        spec = self.hspec.space
        K, dK, s, c = _radial(r, spec)
        k2 = spec.kappa2
        dW = (dK * s - 2.0 * K * c) / (k2 * s * s * s)
        return np.array([K * p_r, -(0.5 * dK * p_r * p_r + 0.5 * dW * self.c3
                                   + self.hspec.potential_derivative(r))])

    def integrate(self, r0: float, p_r0: float, t_end: float, tol: float = 1e-10,
                  t_eval: Optional[Sequence[float]] = None):
        """Integrate the 1D radial system; returns (times, r, p_r)."""
        raw = dopri5(self.flow, [r0, p_r0], t_end, tol, t_eval=t_eval)
        states = np.array(raw.states)
        return np.array(raw.times), states[:, 0], states[:, 1]


def theta_minimum(c2: float, spec: SpaceSpec) -> float:
    """Smallest value of C3 - p_theta^2 over theta (kappa2 > 0)."""
    k2, b1 = spec.kappa2, spec.b[0]

    def fn(theta):
        st, ct = S_kappa(theta, k2), C_kappa(theta, k2)
        return c2 / (st * st) + k2 * b1 / (ct * ct)

    top = 0.5 * math.pi / math.sqrt(k2)
    res = optimize.minimize_scalar(fn, bounds=(1e-9 * top, top * (1 - 1e-9)), method="bounded",
                                   options={"xatol": 1e-12})
    return float(res.fun)


def _radial_range(spec: SpaceSpec, r_max: Optional[float]):
    z = spec.z
    if z > 0:
        top = 0.5 * math.pi / math.sqrt(z)
    else:
        top = r_max if r_max is not None else (50.0 / math.sqrt(-z) if z < 0 else 50.0)
    return top


def radial_reduce(hspec: HamiltonianSpec, c2: float, c3: float, energy: float,
                  r_max: Optional[float] = None, samples: int = 4000,
                  xtol: float = 1e-13) -> RadialProblem:
    """Separated radial problem at fixed (C2, C3, H) with its turning points."""
    spec = hspec.space
    if spec.kappa2 > 0 and (c2 > 0 or spec.b[0] > 0) and c2 >= 0 and spec.b[0] >= 0:
        floor = theta_minimum(c2, spec)
        if c3 < floor * (1 - 1e-9):
            raise DomainError(f"c3 = {c3} below its angular minimum {floor} for c2 = {c2}")
    top = _radial_range(spec, r_max)
    problem = RadialProblem(energy, c3, replace(hspec, representation="spherical"))
    # log-spaced near the origin, linear further out
    lo = top * 1e-7
    hi = top * (1 - 1e-9) if spec.z > 0 else top
    grid = np.unique(np.concatenate([np.geomspace(lo, hi, samples // 2),
                                     np.linspace(lo, hi, samples // 2)]))

    def gap(r):
        return problem.effective_potential(r) - energy

    vals = []
    for r in grid:
        try:
            vals.append(gap(float(r)))
        except DomainError:
            vals.append(math.nan)
    vals = np.array(vals)
    finite = np.isfinite(vals)
    if not np.any(finite & (vals <= 0.0)):
        raise NoBoundRegion(f"effective potential exceeds E = {energy} on the whole patch")
    roots = []
    for i in range(len(grid) - 1):
        a, b = vals[i], vals[i + 1]
        if not (math.isfinite(a) and math.isfinite(b)):
            continue
        if a == 0.0:
            roots.append(float(grid[i]))
        elif a * b < 0.0:
            roots.append(float(optimize.brentq(gap, grid[i], grid[i + 1], xtol=xtol, rtol=1e-15)))
    return replace(problem, turning_points=tuple(roots), r_range=(float(lo), float(hi)))
