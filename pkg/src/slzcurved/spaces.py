"""Model parameterization: conformal profiles, space specs, phase points.

Curvature parameters are handled with real "kappa-trigonometry": for a real
label ``kappa`` the functions ``C_kappa``, ``S_kappa``, ``T_kappa`` are
``cos``/``sin``/``tan`` of ``sqrt(kappa) u`` (scaled) when ``kappa > 0`` and
their hyperbolic counterparts when ``kappa < 0``.  With ``z = lambda_1**2`` and
``kappa2 = lambda_2**2`` this replaces every imaginary ``lambda`` by a real
branch, e.g. ``sin(lambda_1 r) / lambda_1 == S_kappa(r, z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .errors import DomainError

# Below this |u| the removable singularities switch to Taylor series.
SERIES_CUTOFF = 1e-6


# ---------------------------------------------------------------------------
# removable singularities
# ---------------------------------------------------------------------------

def sinhc(u: float) -> float:
    """sinh(u)/u, finite at u = 0."""
    if abs(u) < SERIES_CUTOFF:
        u2 = u * u
        return 1.0 + u2 / 6.0 + u2 * u2 / 120.0 + u2 * u2 * u2 / 5040.0
    return math.sinh(u) / u


def sinhc_prime(u: float) -> float:
    """Derivative of sinh(u)/u."""
    if abs(u) < 1e-3:
        u2 = u * u
        return u / 3.0 + u * u2 / 30.0 + u * u2 * u2 / 840.0 + u * u2**3 / 45360.0
    return (u * math.cosh(u) - math.sinh(u)) / (u * u)


def u_over_sinh(u: float) -> float:
    """u/sinh(u), finite at u = 0."""
    return 1.0 / sinhc(u)


def u_over_tanh(u: float) -> float:
    """u/tanh(u), finite at u = 0."""
    if abs(u) < SERIES_CUTOFF:
        u2 = u * u
        return 1.0 + u2 / 3.0 - u2 * u2 / 45.0 + 2.0 * u2**3 / 945.0
    return u / math.tanh(u)


# ---------------------------------------------------------------------------
# kappa-trigonometry
# ---------------------------------------------------------------------------

def C_kappa(u: float, kappa: float) -> float:
    if kappa > 0:
        return math.cos(math.sqrt(kappa) * u)
    if kappa < 0:
        return math.cosh(math.sqrt(-kappa) * u)
    return 1.0


def S_kappa(u: float, kappa: float) -> float:
    if kappa > 0:
        s = math.sqrt(kappa)
        return math.sin(s * u) / s
    if kappa < 0:
        s = math.sqrt(-kappa)
        return math.sinh(s * u) / s
    return u


def T_kappa(u: float, kappa: float) -> float:
    return S_kappa(u, kappa) / C_kappa(u, kappa)


def C_kappa_minus_one(u: float, kappa: float) -> float:
    """C_kappa(u) - 1 without cancellation."""
    if kappa > 0:
        s = math.sin(0.5 * math.sqrt(kappa) * u)
        return -2.0 * s * s
    if kappa < 0:
        s = math.sinh(0.5 * math.sqrt(-kappa) * u)
        return 2.0 * s * s
    return 0.0


# ---------------------------------------------------------------------------
# conformal profiles
# ---------------------------------------------------------------------------

PROFILE_TAGS = ("identity", "exponential", "power_cosine", "cos_cubed", "custom")


@dataclass(frozen=True)
class ConformalProfile:
    """The function f(x), x = z q^2, of the kinetic term H = J+ f(z J-)/2.

    Every built-in is an exponential ``f = exp(c x)``; through
    ``x = -ln cos y`` this is ``g(y) = cos(y)**(-c)``:

    ========================  ==============  =================
    tag                       f(x)            g(y)
    ========================  ==============  =================
    ``identity``              1               1
    ``exponential(s)``        exp(s x)        cos(y)**(-s)
    ``power_cosine(k)``       exp((1-4k) x)   cos(y)**(4k-1)
    ``cos_cubed``             exp(-3 x)       cos(y)**3
    ========================  ==============  =================

    ``custom`` wraps user callables for f, f' and f''.
    """

    tag: str
    param: float = 0.0
    custom: Optional[Tuple[Callable[[float], float], Callable[[float], float],
                           Callable[[float], float]]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.tag not in PROFILE_TAGS:
            raise ValueError(f"unknown profile tag {self.tag!r}")
        if self.tag == "exponential" and self.param not in (1.0, -1.0):
            raise ValueError("exponential profile needs sign +1 or -1")
        if self.tag == "power_cosine" and self.param == 1.0:
            raise ValueError("power_cosine is undefined at k = 1; use cos_cubed")
        if self.tag == "custom" and self.custom is None:
            raise ValueError("custom profile needs (f, df, d2f)")
        if abs(self.f(1e-12) - 1.0) > 1e-9:
            raise ValueError("profile must satisfy f(x) -> 1 as x -> 0")

    # constructors ---------------------------------------------------------
    @classmethod
    def identity(cls) -> "ConformalProfile":
        return cls("identity")

    @classmethod
    def exponential(cls, sign: float = 1.0) -> "ConformalProfile":
        return cls("exponential", float(sign))

    @classmethod
    def power_cosine(cls, k: float) -> "ConformalProfile":
        return cls("power_cosine", float(k))

    @classmethod
    def cos_cubed(cls) -> "ConformalProfile":
        return cls("cos_cubed")

    @classmethod
    def constant_curvature(cls) -> "ConformalProfile":
        """g = 1/cos y, i.e. f = exp(x)."""
        return cls.exponential(1.0)

    @classmethod
    def from_callables(cls, f, df, d2f) -> "ConformalProfile":
        return cls("custom", custom=(f, df, d2f))

    # f-side ---------------------------------------------------------------
    @property
    def exponent(self) -> Optional[float]:
        """c in f = exp(c x) for built-ins, None for custom profiles."""
        return {
            "identity": 0.0,
            "exponential": self.param,
            "power_cosine": 1.0 - 4.0 * self.param,
            "cos_cubed": -3.0,
        }.get(self.tag)

    def f(self, x: float) -> float:
        c = self.exponent
        if c is None:
            return float(self.custom[0](x))
        return math.exp(c * x)

    def df(self, x: float) -> float:
        c = self.exponent
        if c is None:
            return float(self.custom[1](x))
        return c * math.exp(c * x)

    def d2f(self, x: float) -> float:
        c = self.exponent
        if c is None:
            return float(self.custom[2](x))
        return c * c * math.exp(c * x)

    def log_f(self, x: float) -> float:
        c = self.exponent
        if c is None:
            return math.log(self.f(x))
        return c * x

    def f_minus_one(self, x: float) -> float:
        c = self.exponent
        if c is None:
            return self.f(x) - 1.0
        return math.expm1(c * x)

    # g-side, y = lambda_1 r with lambda_1 real --------------------------------
    def g(self, y: float) -> float:
        return self.f(-math.log(math.cos(y)))

    def dg(self, y: float) -> float:
        x = -math.log(math.cos(y))
        return self.df(x) * math.tan(y)

    def d2g(self, y: float) -> float:
        x = -math.log(math.cos(y))
        t = math.tan(y)
        return self.d2f(x) * t * t + self.df(x) * (1.0 + t * t)

    # radial form for any sign of z -----------------------------------------
    def radial(self, r: float, z: float) -> Tuple[float, float, float]:
        """(G, dG/dr, d2G/dr2) with G(r) = g(lambda_1 r) = f(-ln C_z(r)).

        Real for either sign of z; d/dr = lambda_1 d/dy.
        """
        c = C_kappa(r, z)
        if c <= 0.0:
            raise DomainError(f"C_z(r) = {c} <= 0 at r = {r}: outside the coordinate patch")
        x = -math.log(c)
        t = S_kappa(r, z) / c
        f0, f1, f2 = self.f(x), self.df(x), self.d2f(x)
        return f0, f1 * z * t, f2 * (z * t) ** 2 + f1 * z / (c * c)

    def to_dict(self) -> dict:
        if self.tag == "custom":
            raise ValueError("custom profiles cannot be serialized")
        d = {"tag": self.tag}
        if self.tag == "exponential":
            d["sign"] = self.param
        elif self.tag == "power_cosine":
            d["k"] = self.param
        return d


# ---------------------------------------------------------------------------
# space specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SpaceSpec:
    """One model: deformation z, signature kappa2 = lambda_2**2, profile, b's.

    ``b`` holds the centrifugal coefficients attached to the Cartesian sites
    (b1 with q1, ...).  Any real values are accepted.
    """

    z: float
    kappa2: float = 1.0
    profile: ConformalProfile = field(default_factory=ConformalProfile.identity)
    b: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.kappa2 == 0:
            raise ValueError("kappa2 = 0 (Newton-Hooke, degenerate metric) is not supported")
        object.__setattr__(self, "z", float(self.z))
        object.__setattr__(self, "kappa2", float(self.kappa2))
        b = tuple(float(v) for v in self.b)
        if len(b) != 3:
            raise ValueError("b must have three entries")
        object.__setattr__(self, "b", b)

    @property
    def lambda1_squared(self) -> float:
        return self.z

    def with_b(self, b: Sequence[float]) -> "SpaceSpec":
        return SpaceSpec(self.z, self.kappa2, self.profile, tuple(b))

    def with_profile(self, profile: ConformalProfile) -> "SpaceSpec":
        return SpaceSpec(self.z, self.kappa2, profile, self.b)


# ---------------------------------------------------------------------------
# phase points
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PhasePointCartesian:
    q: Tuple[float, float, float]
    p: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(float(v) for v in self.q))
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))

    def vector(self) -> np.ndarray:
        return np.array(self.q + self.p, dtype=float)

    @classmethod
    def from_vector(cls, v) -> "PhasePointCartesian":
        v = np.asarray(v, dtype=float)
        return cls(tuple(v[:3]), tuple(v[3:6]))


@dataclass(frozen=True)
class PhasePointSpherical:
    r: float
    theta: float
    phi: float
    p_r: float = 0.0
    p_theta: float = 0.0
    p_phi: float = 0.0

    def vector(self) -> np.ndarray:
        return np.array([self.r, self.theta, self.phi, self.p_r, self.p_theta, self.p_phi])

    @classmethod
    def from_vector(cls, v) -> "PhasePointSpherical":
        return cls(*(float(x) for x in np.asarray(v, dtype=float)[:6]))


def as_vector(state) -> np.ndarray:
    if isinstance(state, (PhasePointCartesian, PhasePointSpherical)):
        return state.vector()
    return np.asarray(state, dtype=float)
