"""Radial Green function of the Laplace-Beltrami operator and the intrinsic
Kepler-Coulomb and oscillator potentials built from it.

Everything is written in the physical radius ``r`` so both signs of ``z`` are
real.  With ``H(s) = C_z(s) G(s)`` the Green function is normalized as::

    U(r) = integral^r sqrt(H(s)) / S_z(s)^2 ds

which equals ``lambda_1 U(lambda_1 r)`` in the angle variable and tends to
``-1/r`` as ``z -> 0``.  The additive constant is fixed by making U odd in r:
the ``1/S_z^2`` singularity is integrated exactly (``-1/T_z``) and the
smooth remainder from 0.  All four closed forms below follow the same
convention, so the two evaluation paths are directly comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

from scipy import integrate, special

from .errors import DomainError, QuadratureFailure
from .spaces import (
    C_kappa,
    C_kappa_minus_one,
    ConformalProfile,
    S_kappa,
    SpaceSpec,
    T_kappa,
    sinhc,
)
from .specfun import incomplete_beta, incomplete_elliptic_e, incomplete_elliptic_e_imag

QUAD_ABS_TOL = 1e-10
QUAD_LIMIT = 10_000
# Below this sin^2(lambda_1 r) the power-cosine closed form switches to 2F1.
BETA_FORM_MIN_SIN2 = 1e-2


def _check_patch(r: float, z: float):
    if r <= 0.0:
        raise DomainError("r must be positive")
    if z > 0 and r * math.sqrt(z) >= 0.5 * math.pi:
        raise DomainError(f"r = {r} beyond the patch boundary pi/(2 sqrt(z))")


def conformal_h(s: float, profile: ConformalProfile, z: float) -> float:
    """h = cos(lambda_1 s) g(lambda_1 s) as a function of the radius."""
    G, _, _ = profile.radial(s, z)
    return C_kappa(s, z) * G


def _sqrt_h_minus_one(s, profile, z):
    log_c = math.log1p(C_kappa_minus_one(s, z))
    if not math.isfinite(log_c):
        raise DomainError("outside the patch")
    x = -log_c
    if profile.f(x) <= 0.0:
        raise DomainError(f"h <= 0 at r = {s}")
    return math.expm1(0.5 * (log_c + profile.log_f(x)))


def green_integrand(s: float, profile: ConformalProfile, z: float) -> float:
    """sqrt(h)/S_z^2, the derivative of U."""
    return math.sqrt(conformal_h(s, profile, z)) / S_kappa(s, z) ** 2


def green_quadrature(r: float, profile: ConformalProfile, z: float) -> float:
    """U(r) by adaptive Gauss-Kronrod quadrature."""
    _check_patch(r, z)

    def remainder(s):
        if s == 0.0:
            return 0.0
        sk = S_kappa(s, z)
        return _sqrt_h_minus_one(s, profile, z) / (sk * sk)

    val, err, *rest = integrate.quad(remainder, 0.0, r, epsabs=1e-13, epsrel=1e-13,
                                     limit=QUAD_LIMIT, full_output=1)
    if len(rest) > 1 and err > QUAD_ABS_TOL:
        raise QuadratureFailure(f"quadrature error estimate {err:.2e} at r = {r}")
    return -1.0 / T_kappa(r, z) + val


def closed_form_case(profile: ConformalProfile) -> Optional[str]:
    """Which closed form applies to a profile, if any."""
    if profile.tag == "identity":
        return "identity"
    if profile.tag == "exponential":
        return "constant_curvature" if profile.param > 0 else "power_cosine"
    if profile.tag in ("power_cosine", "cos_cubed"):
        return profile.tag
    return None


def _power_cosine_k(profile: ConformalProfile) -> float:
    if profile.tag == "exponential":
        return (1.0 - profile.param) / 4.0
    return profile.param


def green_closed_form(r: float, profile: ConformalProfile, z: float) -> float:
    """U(r) from the closed-form expressions (constant curvature, g = 1,
    g = cos^(4k-1), g = cos^3)."""
    case = closed_form_case(profile)
    if case is None:
        raise DomainError(f"no closed form for profile {profile.tag!r}")
    _check_patch(r, z)
    if z == 0.0:
        return -1.0 / r
    c, t = C_kappa(r, z), T_kappa(r, z)
    w = math.sqrt(abs(z))
    if case == "constant_curvature":
        return -1.0 / t
    if case == "cos_cubed":
        return -z * r - 1.0 / t
    if case == "identity":
        # -(lambda_1/tan) sqrt(cos) - lambda_1 E(lambda_1 r / 2 | 2)
        if z > 0:
            return -math.sqrt(c) / t - w * incomplete_elliptic_e(0.5 * w * r, 2.0)
        return -math.sqrt(c) / t + w * incomplete_elliptic_e_imag(0.5 * w * r, 2.0)
    k = _power_cosine_k(profile)
    if k <= -0.5:
        raise DomainError("power_cosine closed form needs k > -1/2")
    if z > 0:
        sin2 = math.sin(w * r) ** 2
        if sin2 >= BETA_FORM_MIN_SIN2:
            # -lambda_1/2 B(1/sin^2(lambda_1 r), 1 - k, 1/2 + k)
            return -0.5 * w * incomplete_beta(1.0 / sin2, 1.0 - k, 0.5 + k)
        # near the origin the continued beta cancels; same function via 2F1
        tn = math.tan(w * r)
        return -w * special.hyp2f1(-0.5, k, 0.5, -tn * tn) / tn
    th = math.tanh(w * r)
    return -w * special.hyp2f1(-0.5, k, 0.5, th * th) / th


def green_derivative(r: float, profile: ConformalProfile, z: float) -> float:
    """dU/dr = sqrt(h)/S_z^2."""
    _check_patch(r, z)
    return green_integrand(r, profile, z)


def _d5(fn, x, h):
    return (fn(x - 2 * h) - 8 * fn(x - h) + 8 * fn(x + h) - fn(x + 2 * h)) / (12 * h)


def ode_residual(r: float, profile: ConformalProfile, z: float, evaluator=None,
                 step: float = 1e-2) -> float:
    """Relative FD residual of d/dr[(S_z^2/sqrt h) U'] = 0 at r.

    The flux ``(S_z^2/sqrt h) U'`` is formed with a five-point derivative of
    ``evaluator`` (default: quadrature) and its own five-point derivative,
    times the local length scale, is returned relative to the flux.  The
    step is ``step`` times the distance to the nearer singular end
    (origin or patch boundary).
    """
    ev = evaluator or (lambda s: green_quadrature(s, profile, z))
    ell = r
    if z > 0:
        ell = min(ell, 0.5 * math.pi / math.sqrt(z) - r)
    h = step * ell / 4.0

    def flux(s):
        return S_kappa(s, z) ** 2 / math.sqrt(conformal_h(s, profile, z)) * _d5(ev, s, h)

    return _d5(flux, r, h) * ell / abs(flux(r))


@dataclass(frozen=True)
class GreenFunction:
    profile: ConformalProfile
    z: float
    method: str = "auto"

    @property
    def normalization(self) -> str:
        """Factor relating this U to the angle-variable U(lambda_1 r)."""
        return "lambda_1"

    def evaluator(self) -> Callable[[float], float]:
        return self.__call__

    def __call__(self, r: float) -> float:
        use_closed = self.method == "closed" or (
            self.method == "auto" and closed_form_case(self.profile) is not None)
        if use_closed:
            return green_closed_form(r, self.profile, self.z)
        return green_quadrature(r, self.profile, self.z)

    def derivative(self, r: float) -> float:
        return green_derivative(r, self.profile, self.z)


# ---------------------------------------------------------------------------
# intrinsic potentials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntrinsicPotential:
    """``kind`` is ``"kc"`` (alpha U) or ``"oscillator"`` (beta / U^2)."""

    kind: str
    strength: float
    method: str = "auto"

    def __post_init__(self):
        if self.kind not in ("kc", "oscillator"):
            raise ValueError(f"unknown potential kind {self.kind!r}")

    def green(self, spec: SpaceSpec) -> GreenFunction:
        return GreenFunction(spec.profile, spec.z, self.method)

    def value(self, r: float, spec: SpaceSpec) -> float:
        return intrinsic_potential(r, self, spec)

    def derivative(self, r: float, spec: SpaceSpec) -> float:
        gf = self.green(spec)
        du = gf.derivative(r)
        if self.kind == "kc":
            return self.strength * du
        u = gf(r)
        if u == 0.0:
            raise DomainError("oscillator potential is singular at a zero of U")
        return -2.0 * self.strength * du / u ** 3

    def to_dict(self) -> dict:
        return {"kind": self.kind, "strength": self.strength, "method": self.method}


def kepler_coulomb(alpha: float, method: str = "auto") -> IntrinsicPotential:
    return IntrinsicPotential("kc", alpha, method)


def oscillator(beta: float, method: str = "auto") -> IntrinsicPotential:
    return IntrinsicPotential("oscillator", beta, method)


def intrinsic_potential(r: float, kind: IntrinsicPotential, spec: SpaceSpec) -> float:
    """alpha U(r) or beta / U(r)^2."""
    u = kind.green(spec)(r)
    if kind.kind == "kc":
        return kind.strength * u
    if u == 0.0:
        raise DomainError(f"U vanishes at r = {r}: oscillator potential singular")
    return kind.strength / (u * u)


# ---------------------------------------------------------------------------
# coalgebra form of the constant-curvature Hamiltonians
# ---------------------------------------------------------------------------

def hamiltonian_algebraic_forms(generators, kind: IntrinsicPotential, z: float) -> float:
    """Constant-curvature KC / oscillator Hamiltonians in generator form.

    KC:  J+ e^{z J-}/2 - alpha sqrt(z e^{-z J-} / sinh(z J-))
    O:   J+ e^{z J-}/2 + beta sinh(z J-) e^{z J-} / z
    """
    jm, jp = generators.j_minus, generators.j_plus
    x = z * jm
    kinetic = 0.5 * jp * math.exp(x)
    if kind.kind == "kc":
        if jm <= 0.0:
            raise DomainError("KC generator form is singular at J- = 0")
        # z/sinh(z J-) = 1/(J- sinhc(z J-))
        return kinetic - kind.strength * math.sqrt(math.exp(-x) / (jm * sinhc(x)))
    return kinetic + kind.strength * jm * sinhc(x) * math.exp(x)
