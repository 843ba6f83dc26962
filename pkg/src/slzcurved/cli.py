"""Command-line front end: ``slzcurved {curvature,geodesic,audit,potential}``.

Exit codes: 0 every property passed, 1 some property failed, 2 bad config.
The config schema is documented in the README; ``config_echo`` in every
record is a complete config that reproduces the run.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import yaml

from . import __version__
from .audit import DEFAULT_TOLERANCES, run_suites
from .dynamics import HamiltonianSpec, integrate
from .errors import ConfigError, SlzError
from .geometry import curvature_cartesian, curvature_spherical
from .potentials import (
    IntrinsicPotential,
    closed_form_case,
    green_closed_form,
    green_quadrature,
    ode_residual,
)
from .spaces import ConformalProfile, SpaceSpec

SCHEMA_VERSION = 1
RUN_TYPES = ("curvature", "geodesic", "audit", "potential")

DEFAULTS: Dict[str, Any] = {
    "space": {"z": 1.0, "kappa2": 1.0, "profile": {"tag": "identity"}, "b": [0.0, 0.0, 0.0]},
    "curvature": {
        "coords": "spherical",
        "r": {"start": 0.1, "stop": 1.4, "num": 14},
        "theta": {"start": 0.3, "stop": 1.2, "num": 4},
        "q": {"start": 0.2, "stop": 0.8, "num": 4},
        "tol": 1e-8,
    },
    "geodesic": {
        "representation": "spherical",
        "initial": [0.8, 0.9, 0.7, 0.1, 0.4, 0.3],
        "t_end": 10.0,
        "tol": 1e-10,
        "potential": {"kind": "kc", "strength": 1.0},
        "drift_budget": 1e-8,
        "staeckel": False,
        "margin": 1e-6,
    },
    "potential": {
        "r": {"start": 0.05, "stop": 1.5, "num": 30},
        "alpha": 1.0,
        "beta": 1.0,
        "tol": 1e-8,
        "ode_tol": 1e-6,
    },
    "audit": {
        "samples": 20,
        "potential": None,
        "staeckel": False,
        "tolerances": {},
    },
    "output": {"format": "json"},
    "seed": 0,
}

PROFILE_KEYS = {"tag", "k", "sign"}
POTENTIAL_KEYS = {"kind", "strength"}


# ---------------------------------------------------------------------------
# config parsing and validation
# ---------------------------------------------------------------------------

def _num(value, where: str, positive=False, integer=False) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number, got a boolean")
    try:
        out = int(value) if integer else float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected a number, got {value!r}") from None
    if integer and float(value) != out:
        raise ConfigError(f"{where}: expected an integer")
    if not math.isfinite(out):
        raise ConfigError(f"{where}: must be finite")
    if positive and out <= 0:
        raise ConfigError(f"{where}: must be positive")
    return out


def _merge(base: dict, over: dict, where: str) -> dict:
    out = copy.deepcopy(base)
    for key, val in over.items():
        if key not in base:
            raise ConfigError(f"unknown key {where}{key!r}")
        # nested profile/potential/tolerances sections are replaced whole, not merged
        replace_whole = where != "" and key in ("tolerances", "potential", "profile")
        if isinstance(base[key], dict) and base[key] and not replace_whole:
            if not isinstance(val, dict):
                raise ConfigError(f"{where}{key} must be a section")
            out[key] = _merge(base[key], val, f"{where}{key}.")
        else:
            out[key] = val
    return out


def load_config(path: Optional[str]) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML/JSON: {exc}") from None
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("config root must be a mapping")
    return data


def resolve_config(raw: dict, run: str, seed=None, fmt=None, tol=None) -> dict:
    """Defaults + file + flags, validated.  Only the section for ``run`` is kept."""
    raw = dict(raw)
    declared = raw.pop("run", run)
    if declared != run:
        raise ConfigError(f"config is for run {declared!r}, not {run!r}")
    cfg = _merge(DEFAULTS, raw, "")
    if seed is not None:
        cfg["seed"] = seed
    if fmt is not None:
        cfg["output"]["format"] = fmt
    if tol is not None:
        if run == "audit":
            raise ConfigError("--tol does not apply to audit; set audit.tolerances instead")
        cfg[run]["tol"] = tol
    out = {"run": run, "space": cfg["space"], run: cfg[run], "output": cfg["output"],
           "seed": _num(cfg["seed"], "seed", integer=True)}
    if out["seed"] < 0:
        raise ConfigError("seed must be non-negative")
    if not isinstance(out["output"], dict) or set(out["output"]) != {"format"}:
        raise ConfigError("output takes only format")
    if out["output"]["format"] not in ("csv", "json"):
        raise ConfigError("output.format must be csv or json")
    build_space(out["space"])
    VALIDATORS[run](out[run], out["space"])
    return normalize(out)


def normalize(obj):
    """Numbers as floats (ints kept for counts) so the echo is stable."""
    if isinstance(obj, dict):
        return {k: normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, str):
        try:
            return float(obj)
        except ValueError:
            return obj
    return obj


def build_profile(d: dict) -> ConformalProfile:
    if not isinstance(d, dict):
        raise ConfigError("space.profile must be a section")
    extra = set(d) - PROFILE_KEYS
    if extra:
        raise ConfigError(f"unknown key(s) in space.profile: {sorted(extra)}")
    tag = d.get("tag")
    try:
        if tag == "identity":
            return ConformalProfile.identity()
        if tag == "exponential":
            return ConformalProfile.exponential(_num(d.get("sign", 1.0), "space.profile.sign"))
        if tag == "power_cosine":
            if "k" not in d:
                raise ConfigError("power_cosine needs k")
            return ConformalProfile.power_cosine(_num(d["k"], "space.profile.k"))
        if tag == "cos_cubed":
            return ConformalProfile.cos_cubed()
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown profile tag {tag!r}")


def build_space(d: dict) -> SpaceSpec:
    b = d.get("b")
    if not isinstance(b, (list, tuple)) or len(b) != 3:
        raise ConfigError("space.b must be a list of three numbers")
    try:
        return SpaceSpec(_num(d["z"], "space.z"), _num(d["kappa2"], "space.kappa2"),
                         build_profile(d["profile"]), tuple(_num(v, "space.b") for v in b))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def build_potential(d) -> Optional[IntrinsicPotential]:
    if d is None:
        return None
    if not isinstance(d, dict):
        raise ConfigError("potential must be a section with kind and strength")
    extra = set(d) - POTENTIAL_KEYS
    if extra:
        raise ConfigError(f"unknown key(s) in potential: {sorted(extra)}")
    try:
        return IntrinsicPotential(d.get("kind"), _num(d.get("strength"), "potential.strength"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def grid(d: dict, where: str) -> np.ndarray:
    if not isinstance(d, dict) or set(d) - {"start", "stop", "num"}:
        raise ConfigError(f"{where} must have exactly start, stop, num")
    num = _num(d.get("num"), f"{where}.num", integer=True)
    if num < 1:
        raise ConfigError(f"{where}: empty grid")
    return np.linspace(_num(d.get("start"), f"{where}.start"), _num(d.get("stop"), f"{where}.stop"), num)


def _check_curvature(c, space):
    if c["coords"] not in ("spherical", "cartesian"):
        raise ConfigError("curvature.coords must be spherical or cartesian")
    keys = ("r", "theta") if c["coords"] == "spherical" else ("q",)
    for k in keys:
        grid(c[k], f"curvature.{k}")
    _num(c["tol"], "curvature.tol", positive=True)


def _check_geodesic(c, space):
    if c["representation"] not in ("spherical", "cartesian"):
        raise ConfigError("geodesic.representation must be spherical or cartesian")
    init = c["initial"]
    if not isinstance(init, (list, tuple)) or len(init) != 6:
        raise ConfigError("geodesic.initial must list six numbers")
    [_num(v, "geodesic.initial") for v in init]
    _num(c["t_end"], "geodesic.t_end", positive=True)
    tol = _num(c["tol"], "geodesic.tol", positive=True)
    if not 1e-13 <= tol <= 1e-3:
        raise ConfigError("geodesic.tol must lie in [1e-13, 1e-3]")
    _num(c["drift_budget"], "geodesic.drift_budget", positive=True)
    _num(c["margin"], "geodesic.margin", positive=True)
    if not isinstance(c["staeckel"], bool):
        raise ConfigError("geodesic.staeckel must be true or false")
    build_potential(c["potential"])


def _check_potential(c, space):
    grid(c["r"], "potential.r")
    for k in ("alpha", "beta"):
        _num(c[k], f"potential.{k}")
    _num(c["tol"], "potential.tol", positive=True)
    _num(c["ode_tol"], "potential.ode_tol", positive=True)


def _check_audit(c, space):
    n = _num(c["samples"], "audit.samples", integer=True)
    if n < 1:
        raise ConfigError("audit.samples must be at least 1")
    build_potential(c["potential"])
    if not isinstance(c["staeckel"], bool):
        raise ConfigError("audit.staeckel must be true or false")
    if not isinstance(c["tolerances"], dict):
        raise ConfigError("audit.tolerances must be a section")
    for k, v in c["tolerances"].items():
        if k not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance {k!r}")
        _num(v, f"audit.tolerances.{k}", positive=True)


VALIDATORS = {
    "curvature": _check_curvature,
    "geodesic": _check_geodesic,
    "potential": _check_potential,
    "audit": _check_audit,
}


# ---------------------------------------------------------------------------
# result record
# ---------------------------------------------------------------------------

@dataclass
class ResultRecord:
    run: str
    config_echo: dict
    columns: List[str]
    rows: List[dict] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return bool(self.summary.get("pass", False))

    def as_dict(self, with_rows=True) -> dict:
        d = {"schema_version": self.schema_version, "run": self.run,
             "config_echo": self.config_echo, "columns": self.columns,
             "summary": self.summary}
        if with_rows:
            d["rows"] = [[row.get(c) for c in self.columns] for row in self.rows]
        return _finite(d)

    def to_json(self, with_rows=True) -> str:
        return json.dumps(self.as_dict(with_rows), indent=2, sort_keys=True, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow(["" if row.get(c) is None else _cell(row.get(c)) for c in self.columns])
        return buf.getvalue()


def _cell(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ""
    return v


def _finite(obj):
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_finite(v) for v in obj]
    if isinstance(obj, (np.floating,)):
        return _finite(float(obj))
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


# ---------------------------------------------------------------------------
# runs
# ---------------------------------------------------------------------------

def run_curvature_grid(cfg: dict) -> ResultRecord:
    spec = build_space(cfg["space"])
    c = cfg["curvature"]
    tol = c["tol"]
    rows = []
    if c["coords"] == "spherical":
        cols = ["r", "theta", "K_rtheta", "K_rphi", "K_thetaphi", "scalar", "identity_residual", "flag"]
        points = [(r, th) for r in grid(c["r"], "curvature.r") for th in grid(c["theta"], "curvature.theta")]
        for r, th in points:
            row = {"r": float(r), "theta": float(th)}
            try:
                rep = curvature_spherical(float(r), float(th), spec)
                row.update(zip(cols[2:6], map(float, (*rep.sectional, rep.scalar))))
                row["identity_residual"] = abs(rep.identity_residual()) / (1.0 + abs(rep.scalar))
                row["flag"] = ""
            except SlzError as exc:
                row["flag"] = type(exc).__name__
            rows.append(row)
    else:
        cols = ["q1", "q2", "q3", "K12", "K13", "K23", "scalar", "identity_residual", "flag"]
        axis = grid(c["q"], "curvature.q")
        for q1 in axis:
            for q2 in axis:
                for q3 in axis:
                    row = {"q1": float(q1), "q2": float(q2), "q3": float(q3)}
                    try:
                        rep = curvature_cartesian(np.array([q1, q2, q3]), spec)
                        row.update(zip(cols[3:7], map(float, (*rep.sectional, rep.scalar))))
                        row["identity_residual"] = abs(rep.identity_residual()) / (1.0 + abs(rep.scalar))
                        row["flag"] = ""
                    except SlzError as exc:
                        row["flag"] = type(exc).__name__
                    rows.append(row)
    good = [r["identity_residual"] for r in rows if not r["flag"]]
    worst = max(good) if good else math.nan
    summary = {"points": len(rows), "flagged": len(rows) - len(good),
               "max_identity_residual": worst, "tol": tol,
               "pass": bool(good) and worst <= tol}
    return ResultRecord("curvature", cfg, cols, rows, summary)


def run_geodesic(cfg: dict) -> ResultRecord:
    spec = build_space(cfg["space"])
    c = cfg["geodesic"]
    hspec = HamiltonianSpec(spec, build_potential(c["potential"]), c["representation"])
    with_i = bool(c["staeckel"])
    traj = integrate(np.array(c["initial"], dtype=float), hspec, c["t_end"], c["tol"],
                     margin=c["margin"], with_staeckel=with_i, on_singularity="truncate")
    state_cols = (["r", "theta", "phi", "p_r", "p_theta", "p_phi"] if hspec.representation == "spherical"
                  else ["q1", "q2", "q3", "p1", "p2", "p3"])
    cols = ["t", *state_cols, *traj.invariant_names]
    rows = []
    for t, y, inv in zip(traj.times, traj.states, traj.invariants_log):
        row = {"t": float(t)}
        row.update(zip(state_cols, map(float, y)))
        row.update(zip(traj.invariant_names, map(float, inv)))
        rows.append(row)
    drift = traj.drift()
    budget = c["drift_budget"]
    audited = [n for n in traj.invariant_names if n != "I"]
    ok = all(drift[n] <= budget for n in audited)
    summary = {"drift": drift, "drift_budget": budget, "truncated": traj.truncated,
               "t_reached": traj.t_reached, "message": traj.message,
               "steps": {k: traj.step_stats[k] for k in ("accepted", "rejected", "domain_rejections")},
               "max_error_estimate": traj.step_stats["max_error_estimate"]}
    if with_i:
        summary["staeckel_conserved"] = bool(drift["I"] <= 1e-7)
    summary["pass"] = bool(ok)
    return ResultRecord("geodesic", cfg, cols, rows, summary)


def run_potential_scan(cfg: dict) -> ResultRecord:
    spec = build_space(cfg["space"])
    c = cfg["potential"]
    prof, z = spec.profile, spec.z
    has_closed = closed_form_case(prof) is not None
    cols = ["r", "U_quadrature", "U_closed", "U_kc", "U_oscillator", "ode_residual", "delta", "flag"]
    rows = []
    for r in grid(c["r"], "potential.r"):
        r = float(r)
        row = {"r": r, "flag": ""}
        try:
            uq = green_quadrature(r, prof, z)
            row["U_quadrature"] = uq
            row["U_kc"] = c["alpha"] * uq
            if uq == 0.0:
                row["flag"] = "oscillator_singular"
            else:
                row["U_oscillator"] = c["beta"] / (uq * uq)
            if has_closed:
                uc = green_closed_form(r, prof, z)
                row["U_closed"] = uc
                row["delta"] = abs(uc - uq)
            row["ode_residual"] = abs(ode_residual(r, prof, z, evaluator=(
                (lambda s: green_closed_form(s, prof, z)) if has_closed else None)))
        except SlzError as exc:
            row["flag"] = row["flag"] or type(exc).__name__
        rows.append(row)
    # a sign change of U between neighbours brackets a zero: the oscillator is singular there
    for a, b in zip(rows, rows[1:]):
        ua, ub = a.get("U_quadrature"), b.get("U_quadrature")
        if ua is not None and ub is not None and ua * ub < 0 and not b["flag"]:
            b["flag"] = "oscillator_singular_crossed"
    deltas = [r["delta"] for r in rows if r.get("delta") is not None]
    odes = [r["ode_residual"] for r in rows if r.get("ode_residual") is not None]
    max_delta = max(deltas) if deltas else None
    max_ode = max(odes) if odes else math.nan
    ok = bool(odes) and max_ode <= c["ode_tol"] and (max_delta is None or max_delta <= c["tol"])
    summary = {"points": len(rows), "flagged": sum(1 for r in rows if r["flag"]),
               "closed_form": closed_form_case(prof), "max_delta": max_delta, "tol": c["tol"],
               "max_ode_residual": max_ode, "ode_tol": c["ode_tol"], "pass": ok}
    return ResultRecord("potential", cfg, cols, rows, summary)


def run_audit(cfg: dict) -> ResultRecord:
    spec = build_space(cfg["space"])
    c = cfg["audit"]
    hspec = HamiltonianSpec(spec, build_potential(c["potential"]), "spherical")
    results = run_suites(hspec, cfg["seed"], c["samples"], c["tolerances"], c["staeckel"])
    cols = ["property", "pass", "detail"]
    rows = [{"property": k, "pass": v["pass"],
             "detail": json.dumps(_finite(v), sort_keys=True)} for k, v in results.items()]
    summary = {"properties": results, "pass": all(v["pass"] for v in results.values())}
    return ResultRecord("audit", cfg, cols, rows, summary)


RUNNERS = {
    "curvature": run_curvature_grid,
    "geodesic": run_geodesic,
    "audit": run_audit,
    "potential": run_potential_scan,
}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="slzcurved", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="run", required=True)
    for name in RUN_TYPES:
        s = sub.add_parser(name)
        s.add_argument("--config", help="YAML or JSON config file")
        s.add_argument("--out", help="output path (default: stdout)")
        s.add_argument("--format", choices=("csv", "json"))
        s.add_argument("--seed", type=int)
        s.add_argument("--tol", type=float, help="overrides the run's tol setting")
    return p


def write_record(rec: ResultRecord, out: Optional[str]) -> None:
    fmt = rec.config_echo["output"]["format"]
    if fmt == "json":
        payload = rec.to_json()
        if out:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(payload)
        else:
            sys.stdout.write(payload)
        return
    table = rec.to_csv()
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(table)
        with open(out + ".summary.json", "w", encoding="utf-8") as fh:
            fh.write(rec.to_json(with_rows=False))
    else:
        sys.stdout.write(table)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(load_config(args.config), args.run, args.seed, args.format, args.tol)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        rec = RUNNERS[args.run](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SlzError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    write_record(rec, args.out)
    if not rec.passed:
        print(f"{args.run}: some properties failed", file=sys.stderr)
    return 0 if rec.passed else 1


if __name__ == "__main__":
    sys.exit(main())
