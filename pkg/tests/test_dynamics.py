import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slzcurved import (
    ConformalProfile,
    DomainError,
    HamiltonianSpec,
    NoBoundRegion,
    PhasePointCartesian,
    SingularityApproach,
    SpaceSpec,
    casimir_values,
    extra_integral_staeckel,
    flow_derivatives,
    hamiltonian,
    integrals_of_motion,
    integrate,
    kepler_coulomb,
    oscillator,
    spherical_constants,
    spherical_state,
    radial_reduce,
    spherical_counterpart,
)
from slzcurved.audit import random_cartesian, random_spherical
from slzcurved.dynamics import c3_from_chain, flow_derivatives_fd, staeckel_is_conserved

PROFILES = [ConformalProfile.identity(), ConformalProfile.exponential(1.0),
            ConformalProfile.power_cosine(0.3), ConformalProfile.cos_cubed()]


@pytest.mark.parametrize("profile", PROFILES)
@pytest.mark.parametrize("pot", [None, kepler_coulomb(0.7), oscillator(0.2)])
def test_spherical_flow_matches_finite_differences(profile, pot):
    rng = np.random.default_rng(0)
    hs = HamiltonianSpec(SpaceSpec(0.6, 1.0, profile, (0.02, 0.01, 0.03)), pot)
    for _ in range(3):
        v = random_spherical(rng, hs.space)
        a, fd = flow_derivatives(v, hs), flow_derivatives_fd(v, hs)
        assert np.allclose(a, fd, rtol=1e-5, atol=1e-6 * (1 + np.max(np.abs(a))))


@pytest.mark.parametrize("profile", PROFILES)
def test_cartesian_flow_matches_finite_differences(profile):
    rng = np.random.default_rng(1)
    hs = HamiltonianSpec(SpaceSpec(-0.5, 1.0, profile, (0.02, 0.01, 0.03)), kepler_coulomb(0.4), "cartesian")
    for _ in range(3):
        x = random_cartesian(rng)
        a, fd = flow_derivatives(x, hs), flow_derivatives_fd(x, hs)
        assert np.allclose(a, fd, rtol=1e-5, atol=1e-6 * (1 + np.max(np.abs(a))))


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), k2=st.floats(0.5, 2.0))
def test_cartesian_and_spherical_energies_agree(seed, k2):
    rng = np.random.default_rng(seed)
    spec = SpaceSpec(0.5, k2, ConformalProfile.cos_cubed(), (0.01, 0.02, 0.03))
    cart = HamiltonianSpec(spec, oscillator(0.3), "cartesian")
    x = random_cartesian(rng, 0.5)
    e = 2.0 * hamiltonian(x, cart)
    s = hamiltonian(spherical_state(PhasePointCartesian.from_vector(x), spec), spherical_counterpart(cart))
    assert s == pytest.approx(e, rel=1e-10)


def test_chain_relation_for_c3():
    hs = HamiltonianSpec(SpaceSpec(0.6, 1.3, ConformalProfile.identity(), (0.02, 0.01, 0.03)), None)
    v = np.array([0.7, 0.5, 0.6, 0.2, -0.3, 0.4])
    c2, _, c3, _ = integrals_of_motion(v, hs)
    assert c3_from_chain(v[1], v[4], c2, hs.space) == pytest.approx(c3, rel=1e-13)


def test_lower_casimir_offset_resolution():
    spec = SpaceSpec(0.5, 1.4, ConformalProfile.identity(), (0.05, 0.02, 0.03))
    cart = HamiltonianSpec(spec, None, "cartesian")
    sph = spherical_counterpart(cart)
    x = np.array([0.35, 0.45, 0.3, 0.1, 0.2, -0.3])
    ps = spherical_state(PhasePointCartesian.from_vector(x), spec)
    c2, c2l, c3, h = integrals_of_motion(ps, sph)
    out = spherical_constants(hamiltonian(x, cart), *casimir_values(x, spec), spec.kappa2, sph.space.b)
    assert out == pytest.approx((h, c2, c2l, c3), rel=1e-12)


def test_flat_geodesics_are_straight_lines():
    hs = HamiltonianSpec(SpaceSpec(1e-12, 1.0), None, "cartesian")
    x0 = np.array([0.3, 0.4, 0.5, 0.1, -0.05, 0.02])
    traj = integrate(x0, hs, 2.0, 1e-11)
    # H = J+/2 = |p|^2/2, so q(t) = q0 + p t
    assert traj.states[-1][:3] == pytest.approx(x0[:3] + 2.0 * x0[3:], abs=1e-9)


def test_conservation_with_centrifugal_terms():
    hs = HamiltonianSpec(SpaceSpec(-0.4, 1.0, ConformalProfile.power_cosine(0.3), (0.02, 0.01, 0.015)),
                         kepler_coulomb(0.5))
    traj = integrate(np.array([0.8, 0.6, 0.7, 0.05, 0.1, 0.08]), hs, 5.0, 1e-10)
    assert max(traj.drift().values()) <= 1e-8


def test_staeckel_integral_selector():
    assert staeckel_is_conserved(SpaceSpec(0.5, 1.0, ConformalProfile.exponential(1.0)))
    assert not staeckel_is_conserved(SpaceSpec(0.5, 1.0, ConformalProfile.identity()))
    x = np.array([0.3, 0.4, 0.5, 0.08, -0.05, 0.03])
    assert math.isfinite(extra_integral_staeckel(x, SpaceSpec(0.5, 1.0, ConformalProfile.exponential(1.0))))


def test_inadmissible_initial_state():
    hs = HamiltonianSpec(SpaceSpec(1.0, 1.0), None)
    with pytest.raises(DomainError):
        integrate(np.array([1e-9, 0.5, 0.5, 0.1, 0.1, 0.1]), hs, 1.0)
    with pytest.raises(ValueError):
        integrate(np.array([0.5, 0.5, 0.5, 0.1, 0.1, 0.1]), hs, -1.0)


def test_truncate_mode_returns_partial_trajectory():
    # strongly outward radial motion reaches the patch boundary
    hs = HamiltonianSpec(SpaceSpec(1.0, 1.0), None)
    x0 = np.array([1.2, 0.7, 0.7, 3.0, 0.0, 0.0])
    with pytest.raises(SingularityApproach):
        integrate(x0, hs, 10.0)
    traj = integrate(x0, hs, 10.0, on_singularity="truncate")
    assert traj.truncated and traj.t_reached < 10.0
    assert len(traj.to_rows()) == len(traj.times)


def test_flat_kepler_turning_points():
    alpha, c2, c3, energy = 1.0, 0.1, 0.5, -0.3
    hs = HamiltonianSpec(SpaceSpec(1e-12, 1.0), kepler_coulomb(alpha))
    rp = radial_reduce(hs, c2, c3, energy, r_max=20.0)
    # E r^2 + alpha r - c3/2 = 0
    disc = math.sqrt(alpha ** 2 + 2 * energy * c3)
    expected = sorted(((-alpha + disc) / (2 * energy), (-alpha - disc) / (2 * energy)))
    assert rp.turning_points == pytest.approx(expected, rel=1e-8)


def test_radial_reduction_tracks_full_motion():
    hs = HamiltonianSpec(SpaceSpec(0.5, 1.0, ConformalProfile.identity()), kepler_coulomb(1.0))
    v0 = np.array([0.8, 0.9, 0.7, 0.1, 0.4, 0.3])
    c2, _, c3, h = integrals_of_motion(v0, hs)
    rp = radial_reduce(hs, c2, c3, h)
    lo, hi = rp.turning_points[:2]
    ts = list(np.linspace(0.5, 4.0, 8))
    traj = integrate(v0, hs, 4.0, 1e-11, t_eval=ts)
    t, r, _ = rp.integrate(v0[0], v0[3], 4.0, 1e-11, t_eval=ts)
    sel = np.isin(traj.times, ts)
    assert np.allclose(traj.states[sel, 0], r[np.isin(t, ts)], atol=1e-7)
    assert np.all((traj.states[:, 0] >= lo - 1e-9) & (traj.states[:, 0] <= hi + 1e-9))


def test_no_bound_region():
    hs = HamiltonianSpec(SpaceSpec(0.5, 1.0), oscillator(1.0))
    with pytest.raises(NoBoundRegion):
        radial_reduce(hs, 0.1, 0.5, -10.0)
