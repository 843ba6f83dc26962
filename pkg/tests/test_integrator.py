import math

import numpy as np
import pytest

from slzcurved import DomainError, SingularityApproach, StepUnderflow
from slzcurved.integrator import dopri5


def test_harmonic_oscillator_accuracy():
    sol = dopri5(lambda y: np.array([y[1], -y[0]]), [1.0, 0.0], 10.0, 1e-10)
    assert sol.times[-1] == 10.0
    assert sol.states[-1] == pytest.approx([math.cos(10.0), -math.sin(10.0)], abs=1e-8)
    assert sol.stats.accepted > 0


def test_lands_on_requested_times():
    t_eval = [0.5, 1.25, 3.0]
    sol = dopri5(lambda y: -y, [1.0], 4.0, 1e-9, t_eval=t_eval)
    for t in t_eval:
        i = sol.times.index(t)
        assert sol.states[i][0] == pytest.approx(math.exp(-t), rel=1e-8)


def test_tighter_tolerance_is_more_accurate():
    def rhs(y):
        return np.array([y[1], -math.sin(y[0])])

    ref = dopri5(rhs, [1.0, 0.0], 5.0, 1e-13).states[-1]
    errs = [np.max(np.abs(dopri5(rhs, [1.0, 0.0], 5.0, tol).states[-1] - ref)) for tol in (1e-5, 1e-9)]
    assert errs[1] < errs[0]


def test_tolerance_range_enforced():
    with pytest.raises(ValueError):
        dopri5(lambda y: y, [1.0], 1.0, 1e-2)
    with pytest.raises(ValueError):
        dopri5(lambda y: y, [1.0], 1.0, 1e-15)


def test_margin_check_raises_with_partial_solution():
    with pytest.raises(SingularityApproach) as info:
        dopri5(lambda y: np.array([1.0]), [0.0], 5.0, 1e-8,
               margin_check=lambda y: "too far" if y[0] > 2.0 else None)
    assert 2.0 < info.value.t_reached < 5.0


def test_finite_time_blowup_underflows():
    # y' = y^2 escapes at t = 1
    with pytest.raises((StepUnderflow, SingularityApproach)):
        dopri5(lambda y: y * y, [1.0], 2.0, 1e-10)


def test_domain_error_shrinks_step():
    def rhs(y):
        if y[0] > 0.999999:
            raise DomainError("wall")
        return np.array([1.0 - y[0]])

    sol = dopri5(rhs, [0.0], 3.0, 1e-9)
    assert sol.states[-1][0] == pytest.approx(1 - math.exp(-3.0), rel=1e-7)
