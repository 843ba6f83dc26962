import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slzcurved import (
    ConformalProfile,
    PhasePointCartesian,
    PhasePointSpherical,
    SpaceSpec,
    christoffel_cartesian,
    christoffel_spherical,
    curvature_cartesian,
    curvature_oracle_fd,
    curvature_spherical,
    metric_cartesian,
    metric_spherical,
    to_cartesian,
    to_spherical,
)
from slzcurved.geometry import coordinate_jacobian, line_element_cartesian

PROFILES = [ConformalProfile.identity(), ConformalProfile.exponential(1.0),
            ConformalProfile.exponential(-1.0), ConformalProfile.power_cosine(0.3),
            ConformalProfile.cos_cubed()]


def test_flat_limit_metric_is_euclidean():
    spec = SpaceSpec(1e-12, 1.0)
    g = metric_spherical(0.7, 0.4, spec)
    assert np.allclose(np.diag(g), [1.0, 0.49, 0.49 * math.sin(0.4) ** 2], rtol=1e-9)


def test_constant_curvature_sphere():
    z = 0.5
    rep = curvature_spherical(0.8, 0.6, SpaceSpec(z, 1.0, ConformalProfile.exponential(1.0)))
    assert rep.sectional == pytest.approx((z, z, z), rel=1e-12)
    assert rep.scalar == pytest.approx(6 * z, rel=1e-12)


@pytest.mark.parametrize("profile", PROFILES)
def test_christoffel_closed_form_matches_oracle(profile):
    spec = SpaceSpec(0.6, 1.0, profile)
    pt = np.array([0.7, 0.5, 0.3])
    oracle = curvature_oracle_fd(lambda x: metric_spherical(x[0], x[1], spec), pt)
    assert np.allclose(christoffel_spherical(0.7, 0.5, spec), oracle.christoffel, atol=1e-7)
    q = np.array([0.3, -0.2, 0.4])
    oracle = curvature_oracle_fd(lambda x: line_element_cartesian(x, spec), q)
    assert np.allclose(christoffel_cartesian(q, spec), oracle.christoffel, atol=1e-7)


@pytest.mark.parametrize("profile", PROFILES)
def test_ricci_trace_is_scalar(profile):
    spec = SpaceSpec(-0.4, 1.0, profile)
    rep = curvature_spherical(0.9, 0.5, spec)
    g = metric_spherical(0.9, 0.5, spec)
    assert np.trace(np.linalg.solve(g, rep.ricci)) == pytest.approx(rep.scalar, rel=1e-10)


def test_cartesian_and_spherical_scalars_agree():
    spec = SpaceSpec(0.6, 1.0, ConformalProfile.power_cosine(0.3))
    pt = PhasePointCartesian((0.3, 0.4, 0.5))
    s = to_spherical(pt, spec)
    k_cart = curvature_cartesian(np.array(pt.q), spec).scalar
    k_sph = curvature_spherical(s.r, s.theta, spec).scalar
    # curvature is a scalar: both charts describe the same line element
    assert k_cart == pytest.approx(k_sph, rel=1e-10)


def test_metric_is_positive_definite():
    spec = SpaceSpec(0.6, 1.0, ConformalProfile.cos_cubed())
    assert np.all(np.linalg.eigvalsh(metric_cartesian(np.array([0.3, 0.4, 0.5]), spec)) > 0)


@settings(max_examples=50)
@given(q=st.tuples(st.floats(0.1, 0.8), st.floats(0.1, 0.8), st.floats(0.1, 0.8)),
       p=st.tuples(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1)),
       z=st.floats(-1.0, 1.0).filter(lambda v: abs(v) > 1e-3), k2=st.floats(0.3, 2.0))
def test_round_trip(q, p, z, k2):
    spec = SpaceSpec(z, k2)
    pt = PhasePointCartesian(q, p)
    back = to_cartesian(to_spherical(pt, spec), spec)
    assert np.allclose(back.vector(), pt.vector(), atol=1e-10, rtol=1e-10)


def test_spherical_point_round_trip():
    spec = SpaceSpec(0.5, 1.0)
    s = PhasePointSpherical(0.8, 0.6, 0.7, 0.1, -0.2, 0.3)
    again = to_spherical(to_cartesian(s, spec), spec)
    assert np.allclose(again.vector(), s.vector(), atol=1e-12)


def test_coordinate_jacobian_against_differences():
    spec = SpaceSpec(0.5, 1.0)
    r, th, ph = 0.8, 0.6, 0.7
    jac = coordinate_jacobian(r, th, ph, spec)
    h = 1e-6

    def q_of(v):
        return np.array(to_cartesian(PhasePointSpherical(*v), spec).q)

    v0 = np.array([r, th, ph])
    fd = np.column_stack([(q_of(v0 + h * e) - q_of(v0 - h * e)) / (2 * h) for e in np.eye(3)])
    assert np.allclose(jac, fd, atol=1e-8) or np.allclose(jac.T, fd, atol=1e-8)
