import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slzcurved import (
    ConformalProfile,
    DomainError,
    EvaluationError,
    HamiltonianSpec,
    PhasePointCartesian,
    SpaceSpec,
    casimir_three,
    casimir_two,
    casimir_two_lower,
    casimir_values,
    integrals_of_motion,
    spherical_state,
    poisson_bracket,
    realize_generators,
    spherical_counterpart,
)
from slzcurved.coalgebra import bracket_residuals, deformed_brackets, gradient_fd, one_site_casimir

coord = st.floats(0.15, 0.8).flatmap(lambda a: st.sampled_from([a, -a]))
mom = st.floats(-1.0, 1.0)
states = st.tuples(coord, coord, coord, mom, mom, mom).map(np.array)
bs = st.tuples(st.floats(-0.3, 0.3), st.floats(-0.3, 0.3), st.floats(-0.3, 0.3))


def test_flat_generators_are_classical():
    x = np.array([0.3, -0.5, 0.4, 0.7, 0.2, -0.6])
    b = (0.1, 0.2, 0.05)
    g = realize_generators(x, SpaceSpec(0.0, 1.0, b=b))
    q, p = x[:3], x[3:]
    assert g.j_minus == pytest.approx(q @ q)
    assert g.j_plus == pytest.approx(p @ p + sum(bi / qi ** 2 for bi, qi in zip(b, q)))
    assert g.j_three == pytest.approx(q @ p)


def test_flat_two_site_casimir():
    x = np.array([0.3, -0.5, 0.4, 0.7, 0.2, -0.6])
    b = (0.1, 0.2, 0.0)
    q1, q2, p1, p2 = x[0], x[1], x[3], x[4]
    expected = (q1 * p2 - q2 * p1) ** 2 + b[0] * q2 ** 2 / q1 ** 2 + b[1] * q1 ** 2 / q2 ** 2 + b[0] + b[1]
    assert casimir_two(x, SpaceSpec(0.0, 1.0, b=b)) == pytest.approx(expected, rel=1e-14)


@given(x=states, z=st.floats(-1.0, 1.0), b=bs)
def test_one_site_casimir_is_b1(x, z, b):
    assert one_site_casimir(x, SpaceSpec(z, 1.0, b=b)) == pytest.approx(b[0], abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(x=states, z=st.floats(-1.0, 1.0), b=bs)
def test_bracket_closure_property(x, z, b):
    spec = SpaceSpec(z, 1.0, b=b)
    lhs = deformed_brackets(x, spec)
    for r, v in zip(bracket_residuals(x, spec, lhs), lhs):
        assert abs(r) <= 1e-6 * (1 + abs(v))


@settings(max_examples=20, deadline=None)
@given(x=states, z=st.floats(-1.0, 1.0), b=bs)
def test_casimirs_commute(x, z, b):
    spec = SpaceSpec(z, 1.0, b=b)
    c2 = lambda y: casimir_two(y, spec)
    c2l = lambda y: casimir_two_lower(y, spec)
    c3 = lambda y: casimir_three(y, spec)
    for fa, fb in ((c2, c3), (c2l, c3)):
        assert abs(poisson_bracket(fa, fb, x)) <= 1e-6 * (1 + abs(fa(x))) * (1 + abs(fb(x)))


def test_casimirs_match_spherical_integrals():
    spec = SpaceSpec(0.6, 1.5, ConformalProfile.power_cosine(0.3), (0.02, 0.03, 0.01))
    cart = HamiltonianSpec(spec, None, "cartesian")
    sph = spherical_counterpart(cart)
    x = np.array([0.35, 0.5, 0.4, 0.2, -0.3, 0.1])
    c2, c2l, c3 = casimir_values(x, spec)
    s2, _, s3, _ = integrals_of_motion(spherical_state(PhasePointCartesian.from_vector(x), spec), sph)
    assert s2 == pytest.approx(4 * c2, rel=1e-12)
    assert s3 == pytest.approx(4 * spec.kappa2 * c3, rel=1e-12)


def test_canonical_bracket():
    q1 = lambda y: y[0]
    p1 = lambda y: y[3]
    p2 = lambda y: y[4]
    x = np.ones(6)
    assert poisson_bracket(q1, p1, x) == pytest.approx(1.0)
    assert poisson_bracket(q1, p2, x) == pytest.approx(0.0, abs=1e-12)


def test_domain_errors():
    spec = SpaceSpec(0.5, 1.0, b=(0.1, 0.0, 0.0))
    x = np.array([0.0, 0.4, 0.3, 0.1, 0.1, 0.1])
    with pytest.raises(DomainError):
        realize_generators(x, spec)
    with pytest.raises(DomainError):
        casimir_two(x, spec)
    with pytest.raises(DomainError):
        realize_generators(np.ones(6), spec, arity=4)


def test_gradient_stencil_leaving_domain():
    def f(y):
        if y[0] > 1.0:
            raise DomainError("out")
        return y[0]

    with pytest.raises(EvaluationError):
        gradient_fd(f, np.array([1.0, 0.0]))


def test_gradient_of_quadratic():
    g = gradient_fd(lambda y: y @ y, np.array([0.5, -2.0, 3.0]))
    assert np.allclose(g, [1.0, -4.0, 6.0], rtol=1e-9)


def test_generators_symmetric_in_sign_of_coordinates():
    spec = SpaceSpec(0.7, 1.0)
    x = np.array([0.3, 0.5, 0.4, 0.2, -0.1, 0.6])
    y = x * np.array([-1, 1, 1, -1, 1, 1])
    a, b = realize_generators(x, spec), realize_generators(y, spec)
    assert (a.j_minus, a.j_plus, a.j_three) == pytest.approx((b.j_minus, b.j_plus, b.j_three))
    assert math.isfinite(casimir_three(x, spec))
