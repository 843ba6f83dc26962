import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from slzcurved import (
    ConformalProfile,
    DomainError,
    GreenFunction,
    SpaceSpec,
    green_closed_form,
    green_quadrature,
    intrinsic_potential,
    kepler_coulomb,
    oscillator,
)
from slzcurved.potentials import closed_form_case, green_derivative, ode_residual

CLOSED = [ConformalProfile.identity(), ConformalProfile.exponential(1.0),
          ConformalProfile.exponential(-1.0), ConformalProfile.power_cosine(0.3),
          ConformalProfile.power_cosine(-0.2), ConformalProfile.cos_cubed()]


@pytest.mark.parametrize("profile", CLOSED)
@pytest.mark.parametrize("z", [0.9, -0.9])
def test_closed_form_matches_quadrature(profile, z):
    top = 0.5 * math.pi / math.sqrt(z) if z > 0 else 2.0
    for r in np.linspace(0.05, 0.97 * top, 25):
        e = green_closed_form(r, profile, z)
        assert green_quadrature(r, profile, z) == pytest.approx(e, rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("profile", CLOSED)
def test_derivative_of_closed_form(profile):
    z, r, h = 0.7, 0.8, 1e-5
    fd = (green_closed_form(r + h, profile, z) - green_closed_form(r - h, profile, z)) / (2 * h)
    assert green_derivative(r, profile, z) == pytest.approx(fd, rel=1e-8)


def test_constant_curvature_green_is_cotangent():
    z, r = 0.5, 0.9
    w = math.sqrt(z)
    assert green_closed_form(r, ConformalProfile.exponential(1.0), z) == pytest.approx(-w / math.tan(w * r))


@given(r=st.floats(0.1, 3.0))
def test_flat_limit_is_coulomb(r):
    for p in CLOSED:
        assert green_closed_form(r, p, 1e-12) == pytest.approx(-1.0 / r, abs=1e-6)


@pytest.mark.parametrize("profile", CLOSED)
def test_laplace_beltrami_residual(profile):
    for z in (0.8, -0.8):
        for r in (0.2, 0.6, 1.1):
            assert abs(ode_residual(r, profile, z)) <= 1e-6


def test_custom_profile_uses_quadrature():
    c = 0.4
    custom = ConformalProfile.from_callables(lambda x: math.exp(c * x), lambda x: c * math.exp(c * x),
                                             lambda x: c * c * math.exp(c * x))
    assert closed_form_case(custom) is None
    gf = GreenFunction(custom, 0.7)
    ref = green_closed_form(0.6, ConformalProfile.power_cosine((1 - c) / 4), 0.7)
    assert gf(0.6) == pytest.approx(ref, rel=1e-9)
    with pytest.raises(DomainError):
        green_closed_form(0.6, custom, 0.7)


def test_patch_boundaries():
    with pytest.raises(DomainError):
        green_quadrature(2.0, ConformalProfile.identity(), 1.0)
    with pytest.raises(DomainError):
        green_closed_form(0.0, ConformalProfile.identity(), 1.0)


def test_intrinsic_potentials():
    spec = SpaceSpec(0.6, 1.0, ConformalProfile.cos_cubed())
    u = GreenFunction(spec.profile, spec.z)(0.7)
    assert intrinsic_potential(0.7, kepler_coulomb(2.0), spec) == pytest.approx(2.0 * u)
    assert intrinsic_potential(0.7, oscillator(3.0), spec) == pytest.approx(3.0 / u ** 2)
    osc = oscillator(3.0)
    h = 1e-6
    fd = (osc.value(0.7 + h, spec) - osc.value(0.7 - h, spec)) / (2 * h)
    assert osc.derivative(0.7, spec) == pytest.approx(fd, rel=1e-7)
    with pytest.raises(ValueError):
        from slzcurved import IntrinsicPotential
        IntrinsicPotential("yukawa", 1.0)


def test_quadrature_method_forced():
    spec = SpaceSpec(0.6, 1.0, ConformalProfile.identity())
    a = kepler_coulomb(1.0, "quadrature").value(0.5, spec)
    b = kepler_coulomb(1.0, "closed").value(0.5, spec)
    assert a == pytest.approx(b, rel=1e-12)
