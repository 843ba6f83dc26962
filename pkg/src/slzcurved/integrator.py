"""Dormand-Prince 5(4) with PI step-size control.

A small self-contained stepper: the dynamics module needs per-step hooks
(invariant logging, singularity margins, exact landing on output times) that
are awkward to bolt onto a black-box solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np

from .errors import DomainError, SingularityApproach, StepUnderflow

# Butcher tableau (Dormand & Prince 1980)
C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
E = B5 - B4

SAFETY = 0.9
# PI controller exponents (Hairer, Norsett & Wanner II, IV.2)
ALPHA = 0.7 / 5
BETA = 0.4 / 5
MAX_GROW = 5.0
MIN_SHRINK = 0.2


@dataclass
class StepStats:
    accepted: int = 0
    rejected: int = 0
    domain_rejections: int = 0
    max_error_estimate: float = 0.0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class RawSolution:
    times: List[float] = field(default_factory=list)
    states: List[np.ndarray] = field(default_factory=list)
    stats: StepStats = field(default_factory=StepStats)
    truncated: bool = False
    message: str = ""


def _error_norm(err, y0, y1, tol):
    scale = tol * (1.0 + np.maximum(np.abs(y0), np.abs(y1)))
    return float(np.sqrt(np.mean((err / scale) ** 2)))


def dopri5(
    rhs: Callable[[np.ndarray], np.ndarray],
    y0: Sequence[float],
    t_end: float,
    tol: float,
    t_eval: Optional[Sequence[float]] = None,
    margin_check: Optional[Callable[[np.ndarray], Optional[str]]] = None,
    h0: Optional[float] = None,
    max_steps: int = 2_000_000,
) -> RawSolution:
    """Integrate the autonomous system y' = rhs(y) from t = 0 to ``t_end``.

    Every accepted step is recorded.  If ``t_eval`` is given the step size is
    clipped so those times are hit exactly.  ``margin_check(y)`` returns a
    message when ``y`` is too close to a singular locus; integration then
    raises :class:`SingularityApproach` carrying the partial solution.
    """
    if not 1e-13 <= tol <= 1e-3:
        raise ValueError("tol must lie in [1e-13, 1e-3]")
    y = np.asarray(y0, dtype=float).copy()
    sol = RawSolution([0.0], [y.copy()])
    stops = sorted(set(float(t) for t in (t_eval or []) if 0.0 < t < t_end)) + [t_end]
    h_min = 1e-14 * t_end
    k1 = rhs(y)
    if h0 is None:
        d0 = np.linalg.norm(y) / math.sqrt(y.size)
        d1 = np.linalg.norm(k1) / math.sqrt(y.size)
        h0 = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
        h0 = min(h0, 0.01 * t_end, 1e-2)
    h = h0
    t = 0.0
    err_prev = 1e-4
    stop_idx = 0
    for _ in range(max_steps):
        if t >= t_end:
            break
        while stops[stop_idx] <= t:
            stop_idx += 1
        target = stops[stop_idx]
        h_try = min(h, target - t)
        landing = h_try == target - t
        try:
            k = [k1]
            for s in range(1, 7):
                ys = y + h_try * sum(a * ki for a, ki in zip(A[s], k))
                k.append(rhs(ys))
            y_new = y + h_try * sum(b * ki for b, ki in zip(B5, k) if b != 0.0)
            err = h_try * sum(e * ki for e, ki in zip(E, k))
            err_norm = _error_norm(err, y, y_new, tol)
            if not np.all(np.isfinite(y_new)) or not math.isfinite(err_norm):
                raise DomainError("non-finite stage")
        except DomainError as exc:
            sol.stats.domain_rejections += 1
            h = 0.25 * h_try
            if h < h_min:
                sol.truncated = True
                sol.message = f"domain boundary reached: {exc}"
                raise SingularityApproach(sol.message, t_reached=t, trajectory=sol) from exc
            continue
        if err_norm <= 1.0:
            t = target if landing else t + h_try
            y = y_new
            k1 = k[6]  # FSAL
            sol.times.append(t)
            sol.states.append(y.copy())
            sol.stats.accepted += 1
            sol.stats.max_error_estimate = max(sol.stats.max_error_estimate, err_norm * tol)
            fac = SAFETY * err_norm ** -ALPHA * err_prev ** BETA if err_norm > 0 else MAX_GROW
            h = h_try * min(MAX_GROW, max(MIN_SHRINK, fac))
            err_prev = max(err_norm, 1e-4)
            if margin_check is not None:
                msg = margin_check(y)
                if msg:
                    sol.truncated = True
                    sol.message = msg
                    raise SingularityApproach(msg, t_reached=t, trajectory=sol)
        else:
            sol.stats.rejected += 1
            h = h_try * max(MIN_SHRINK, SAFETY * err_norm ** -0.2)
        if h < h_min and t < t_end:
            sol.truncated = True
            sol.message = f"step {h:.3e} below minimum {h_min:.3e}"
            raise StepUnderflow(sol.message, t_reached=t, trajectory=sol)
    return sol
