"""Randomized property suites shared by the CLI ``audit`` run and the tests.

Each suite returns a plain dict ``{"max": ..., "tol": ..., "pass": ...}``
(plus suite-specific fields) so results serialize without conversion.
"""

from __future__ import annotations

import math
from typing import Dict, List, Optional

import numpy as np

from .coalgebra import (
    bracket_residuals,
    casimir_three,
    casimir_two,
    deformed_brackets,
    generator_functions,
    gradient_fd,
    poisson_bracket,
)
from .dynamics import (
    HamiltonianSpec,
    hamiltonian,
    integrals_of_motion,
    integrate,
    spherical_state,
    spherical_counterpart,
    staeckel_is_conserved,
)
from .errors import SlzError
from .geometry import (
    curvature_oracle_fd,
    curvature_spherical,
    metric_spherical,
    to_cartesian,
    to_spherical,
)
from .spaces import PhasePointCartesian, SpaceSpec

DEFAULT_TOLERANCES = {
    "bracket_closure": 1e-6,
    "centrality": 1e-6,
    "involution": 1e-6,
    "witness": 1e-3,
    "rank": 1e-8,
    "curvature_oracle": 1e-4,
    "sectional_identity": 1e-8,
    "round_trip": 1e-10,
    "hamiltonian_invariance": 1e-9,
    "staeckel": 1e-7,
}


def _verdict(values, tol, **extra) -> dict:
    worst = float(max(values)) if len(values) else 0.0
    return {"max": worst, "tol": tol, "count": len(values), "pass": bool(worst <= tol), **extra}


# ---------------------------------------------------------------------------
# state samplers
# ---------------------------------------------------------------------------

def radial_top(z: float) -> float:
    return 0.5 * math.pi / math.sqrt(z) if z > 0 else 2.0


def random_spherical(rng: np.random.Generator, spec: SpaceSpec, p_scale: float = 0.7) -> np.ndarray:
    r = rng.uniform(0.1, 0.9) * radial_top(spec.z)
    if spec.kappa2 > 0:
        theta = rng.uniform(0.15, 0.85) * 0.5 * math.pi / math.sqrt(spec.kappa2)
    else:
        theta = rng.uniform(0.2, 1.5)
    phi = rng.uniform(0.2, 1.37)
    return np.array([r, theta, phi, *rng.normal(0.0, p_scale, 3)])


def random_cartesian(rng: np.random.Generator, p_scale: float = 0.7) -> np.ndarray:
    q = rng.uniform(0.15, 0.7, 3) * rng.choice([-1.0, 1.0], 3)
    return np.concatenate([q, rng.normal(0.0, p_scale, 3)])


def _scale(a: float, b: float) -> float:
    return (1.0 + abs(a)) * (1.0 + abs(b))


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def suite_bracket_closure(spec: SpaceSpec, rng, samples: int, tol: float) -> dict:
    vals = []
    for _ in range(samples):
        x = random_cartesian(rng)
        lhs = deformed_brackets(x, spec)
        res = bracket_residuals(x, spec, lhs)
        vals.append(max(abs(r) / (1.0 + abs(b)) for r, b in zip(res, lhs)))
    return _verdict(vals, tol)


def suite_centrality(spec: SpaceSpec, rng, samples: int, tol: float) -> dict:
    gens3 = generator_functions(spec, 3)
    gens2 = generator_functions(spec, 2)
    vals = []
    for _ in range(samples):
        x = random_cartesian(rng)
        for cas, gens in ((lambda y: casimir_three(y, spec), gens3),
                          (lambda y: casimir_two(y, spec), gens2)):
            c0 = cas(x)
            for g in gens:
                vals.append(abs(poisson_bracket(cas, g, x)) / _scale(c0, g(x)))
    return _verdict(vals, tol)


def _integral_fns(hspec: HamiltonianSpec):
    return {
        "C2": lambda y: integrals_of_motion(y, hspec)[0],
        "C2_lower": lambda y: integrals_of_motion(y, hspec)[1],
        "C3": lambda y: integrals_of_motion(y, hspec)[2],
        "H": lambda y: hamiltonian(y, hspec),
    }


INVOLUTION_PAIRS = (("C2", "C3"), ("C2", "H"), ("C3", "H"), ("C2_lower", "C3"), ("C2_lower", "H"))


def suite_involution(hspec: HamiltonianSpec, rng, samples: int, tol: float) -> dict:
    fns = _integral_fns(hspec)
    per_pair = {f"{a},{b}": [] for a, b in INVOLUTION_PAIRS}
    for _ in range(samples):
        v = random_spherical(rng, hspec.space)
        for a, b in INVOLUTION_PAIRS:
            fa, fb = fns[a], fns[b]
            per_pair[f"{a},{b}"].append(abs(poisson_bracket(fa, fb, v)) / _scale(fa(v), fb(v)))
    allv = [x for vals in per_pair.values() for x in vals]
    out = _verdict(allv, tol)
    out["pairs"] = {k: float(max(v)) for k, v in per_pair.items()}
    return out


def suite_witness(hspec: HamiltonianSpec, rng, samples: int, tol: float,
                  min_fraction: float = 0.9) -> dict:
    """{C2, C_(2)} must be visibly nonzero at generic states.

    The bracket is normalized by |grad C2| |grad C_(2)|, so it measures the
    angle between the two Hamiltonian vector fields rather than their size.
    """
    fns = _integral_fns(hspec)
    a, b = fns["C2"], fns["C2_lower"]
    vals = []
    for _ in range(samples):
        v = random_spherical(rng, hspec.space)
        norm = np.linalg.norm(gradient_fd(a, v)) * np.linalg.norm(gradient_fd(b, v))
        vals.append(abs(poisson_bracket(a, b, v)) / norm if norm > 0 else 0.0)
    frac = float(np.mean(np.array(vals) > tol))
    return {"median": float(np.median(vals)), "fraction_above": frac, "tol": tol,
            "count": len(vals), "pass": bool(frac >= min_fraction)}


def jacobian_of_integrals(v, hspec: HamiltonianSpec) -> np.ndarray:
    fns = _integral_fns(hspec)
    return np.array([gradient_fd(fns[k], v) for k in ("C2", "C2_lower", "C3", "H")])


def suite_rank(hspec: HamiltonianSpec, rng, samples: int, tol: float,
               min_fraction: float = 0.9) -> dict:
    ratios = []
    for _ in range(samples):
        v = random_spherical(rng, hspec.space)
        sv = np.linalg.svd(jacobian_of_integrals(v, hspec), compute_uv=False)
        ratios.append(float(sv[-1] / sv[0]))
    full = sum(r > tol for r in ratios)
    return {"full_rank": int(full), "count": samples, "min_ratio": float(min(ratios)),
            "tol": tol, "pass": bool(full >= math.ceil(min_fraction * samples))}


def suite_curvature_oracle(spec: SpaceSpec, rng, samples: int, tol: float) -> dict:
    vals = []
    for _ in range(samples):
        v = random_spherical(rng, spec)
        r, theta = v[0], v[1]
        closed = curvature_spherical(r, theta, spec)
        oracle = curvature_oracle_fd(lambda x: metric_spherical(x[0], x[1], spec), v[:3])
        scale = 1.0 + abs(closed.scalar)
        diffs = [abs(closed.scalar - oracle.scalar) / scale]
        diffs += [abs(a - b) / (1.0 + abs(a)) for a, b in zip(closed.sectional, oracle.sectional)]
        g_scale = 1.0 + np.max(np.abs(closed.christoffel))
        diffs.append(float(np.max(np.abs(closed.christoffel - oracle.christoffel)) / g_scale))
        vals.append(max(diffs))
    return _verdict(vals, tol)


def suite_sectional_identity(spec: SpaceSpec, rng, samples: int, tol: float) -> dict:
    vals = []
    for _ in range(samples):
        v = random_spherical(rng, spec)
        rep = curvature_spherical(v[0], v[1], spec)
        vals.append(abs(rep.identity_residual()) / (1.0 + abs(rep.scalar)))
    return _verdict(vals, tol)


def suite_map(hspec: HamiltonianSpec, rng, samples: int, tol_trip: float, tol_h: float) -> dict:
    spec = hspec.space
    if spec.kappa2 <= 0 or spec.z == 0.0:
        return {"skipped": "the Cartesian chart covers only the axis for kappa2 < 0", "pass": True}
    cart = HamiltonianSpec(spec, hspec.potential, "cartesian")
    sph = spherical_counterpart(cart)
    trips, hs = [], []
    for _ in range(samples):
        x = random_cartesian(rng, 0.5)
        pt = PhasePointCartesian.from_vector(x)
        back = to_cartesian(to_spherical(pt, spec), spec).vector()
        trips.append(float(np.max(np.abs(back - x)) / (1.0 + np.max(np.abs(x)))))
        e_cart = 2.0 * hamiltonian(x, cart)
        e_sph = hamiltonian(spherical_state(pt, spec), sph)
        hs.append(abs(e_cart - e_sph) / (1.0 + abs(e_cart)))
    trip, hv = _verdict(trips, tol_trip), _verdict(hs, tol_h)
    return {"round_trip": trip, "hamiltonian_invariance": hv, "pass": trip["pass"] and hv["pass"]}


def suite_staeckel(spec: SpaceSpec, tol: float, t_end: float = 10.0) -> dict:
    """Drift of I along a Cartesian free flow; conserved only for f = e^x."""
    hs = HamiltonianSpec(spec.with_b((0.0, 0.0, 0.0)), None, "cartesian")
    x0 = np.array([0.3, 0.4, 0.5, 0.08, -0.05, 0.03])
    traj = integrate(x0, hs, t_end, 1e-10, with_staeckel=True, on_singularity="truncate")
    drift = traj.drift()["I"]
    expected = staeckel_is_conserved(spec)
    conserved = drift <= tol
    return {"drift": drift, "tol": tol, "conserved": bool(conserved),
            "expected_conserved": bool(expected), "t_reached": traj.t_reached,
            "pass": bool(conserved == expected)}


def run_suites(hspec: HamiltonianSpec, seed: int, samples: int = 20,
               tolerances: Optional[Dict[str, float]] = None, staeckel: bool = False) -> Dict[str, dict]:
    """All properties in a fixed order; each suite gets its own child RNG."""
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    seeds = np.random.SeedSequence(seed).spawn(8)
    rngs = [np.random.default_rng(s) for s in seeds]
    spec = hspec.space
    out: Dict[str, dict] = {}
    suites: List[tuple] = [
        ("bracket_closure", lambda: suite_bracket_closure(spec, rngs[0], samples, tol["bracket_closure"])),
        ("centrality", lambda: suite_centrality(spec, rngs[1], samples, tol["centrality"])),
        ("involution", lambda: suite_involution(hspec, rngs[2], samples, tol["involution"])),
        ("non_involution_witness", lambda: suite_witness(hspec, rngs[3], samples, tol["witness"])),
        ("functional_independence", lambda: suite_rank(hspec, rngs[4], samples, tol["rank"])),
        ("curvature_oracle", lambda: suite_curvature_oracle(spec, rngs[5], samples, tol["curvature_oracle"])),
        ("sectional_identity", lambda: suite_sectional_identity(spec, rngs[6], samples,
                                                                tol["sectional_identity"])),
        ("coordinate_map", lambda: suite_map(hspec, rngs[7], samples, tol["round_trip"],
                                             tol["hamiltonian_invariance"])),
    ]
    if staeckel:
        suites.append(("staeckel", lambda: suite_staeckel(spec, tol["staeckel"])))
    for name, fn in suites:
        try:
            out[name] = fn()
        except SlzError as exc:
            out[name] = {"error": f"{type(exc).__name__}: {exc}", "pass": False}
    return out
