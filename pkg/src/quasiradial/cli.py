"""Command-line front end.

    quasiradial region      --config FILE            admissible exponent report
    quasiradial region-plot --config FILE [ranges]   membership raster CSV
    quasiradial check       --config FILE            hypothesis validation
    quasiradial probe       --config FILE            supremum decay probes
    quasiradial solve       --config FILE [--force]  ground-state solve
    quasiradial example NAME [--out DIR]             built-in reference problems

Exit codes: 0 success, 2 invalid configuration, 3 hypothesis failure,
4 solver did not converge, 5 solver collapsed to the trivial solution.
All JSON output is canonical (sorted keys, 17 significant digits), so
identical inputs produce byte-identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from ._jsonio import canonical_json
from .exponents import (
    EndpointAsymptotics,
    InvalidAsymptotics,
    ProblemDims,
    critical_exponents,
    pointwise_decay_exponent,
    q1_admissible_set,
    q2_lower_bound,
    q1_region_membership,
    q_double_star,
    q_star,
)
from .nonlinearity import NonlinearitySpec
from .potentials import (
    default_radii,
    eval_potentials,
    spec_from_json,
    validate_hypotheses,
)
from .probes import decay_verdict, make_trial_family, probe_infinity, probe_origin
from .solver import (
    CollapsedToZero,
    NotConverged,
    build_grid,
    solve_ground_state,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_HYPOTHESIS = 3
EXIT_NOT_CONVERGED = 4
EXIT_COLLAPSED = 5


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    dims: ProblemDims
    spec_A: object
    spec_V: object
    spec_K: object
    s_loc: float
    asym_origin: EndpointAsymptotics
    asym_infinity: EndpointAsymptotics
    nonlinearity: NonlinearitySpec
    r_min: float
    r_max: float
    n_nodes: int
    solve_tol: float
    max_iter: int
    probe_threshold: float
    probe_r_min: float
    probe_r_max: float
    probe_n_nodes: int
    R_origin: list
    R_infinity: list
    seed: int = 0

    @property
    def q_sorted(self):
        return tuple(sorted((self.nonlinearity.q1, self.nonlinearity.q2)))

    @property
    def q_order_swapped(self):
        return self.nonlinearity.q1 > self.nonlinearity.q2

    def solver_nonlinearity(self):
        """Nonlinearity with (q1, q2) sorted ascending; the min of the two
        powers is symmetric in the pair."""
        q1, q2 = self.q_sorted
        nl = self.nonlinearity
        return NonlinearitySpec(kind=nl.kind, q1=q1, q2=q2, M=nl.M, t0=nl.t0)


def _endpoint_from_json(end, obj):
    try:
        return EndpointAsymptotics(
            end=end, a=float(obj["a"]), alpha=float(obj["alpha"]),
            beta=float(obj["beta"]), gamma=float(obj["gamma"]),
            R=float(obj.get("R", 1.0)))
    except KeyError as exc:
        raise ConfigError(f"asymptotics.{end} is missing field {exc}")


def load_config(obj) -> RunConfig:
    """Parse and validate one JSON configuration document."""
    try:
        if int(obj.get("schema_version", 1)) != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {obj.get('schema_version')}")
        dims = ProblemDims(N=int(obj["dims"]["N"]), p=float(obj["dims"]["p"]))
        pots = obj["potentials"]
        spec_a = spec_from_json(pots["A"])
        spec_v = spec_from_json(pots["V"])
        spec_k = spec_from_json(pots["K"])
        s_loc = float(pots.get("s_loc", 2.0))
        if s_loc <= 1:
            raise ConfigError("potentials.s_loc must exceed 1")
        asym_o = _endpoint_from_json("origin", obj["asymptotics"]["origin"])
        asym_i = _endpoint_from_json("infinity", obj["asymptotics"]["infinity"])
        # structural sanity only: range conditions on a and gamma are
        # hypotheses, reported by the check command rather than refused here
        for asym in (asym_o, asym_i):
            if not 0 <= asym.beta <= 1:
                raise ConfigError(f"beta must lie in [0, 1], got {asym.beta}")
            if not asym.R > 0:
                raise ConfigError(f"R must be positive, got {asym.R}")
        nl = NonlinearitySpec.from_json(obj["nonlinearity"])
        grid = obj.get("grid", {})
        r_min = float(grid.get("r_min", 1e-4))
        r_max = float(grid.get("r_max", 1e4))
        n_nodes = int(grid.get("n_nodes", 2000))
        tols = obj.get("tolerances", {})
        probe = obj.get("probe", {})
        return RunConfig(
            dims=dims, spec_A=spec_a, spec_V=spec_v, spec_K=spec_k, s_loc=s_loc,
            asym_origin=asym_o, asym_infinity=asym_i, nonlinearity=nl,
            r_min=r_min, r_max=r_max, n_nodes=n_nodes,
            solve_tol=float(tols.get("solve_tol", 1e-6)),
            max_iter=int(tols.get("max_iter", 20000)),
            probe_threshold=float(tols.get("probe_threshold", 0.9)),
            probe_r_min=float(probe.get("r_min", min(r_min, 5e-5))),
            probe_r_max=float(probe.get("r_max", max(r_max, 1e5))),
            probe_n_nodes=int(probe.get("n_nodes", 2400)),
            R_origin=[float(x) for x in probe.get("R_origin", [0.1, 0.01, 0.001])],
            R_infinity=[float(x) for x in probe.get("R_infinity", [10.0, 100.0, 1000.0])],
            seed=int(obj.get("seed", 0)),
        )
    except ConfigError:
        raise
    except (InvalidAsymptotics, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(str(exc))


def load_config_file(path) -> RunConfig:
    try:
        with open(path) as fh:
            return load_config(json.load(fh))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(str(exc))


def region_report(cfg: RunConfig) -> dict:
    """Admissible exponent intervals and thresholds for the configured data."""
    dims = cfg.dims
    s = q1_admissible_set(cfg.asym_origin, dims)
    bound = q2_lower_bound(cfg.asym_infinity, dims)
    q1, q2 = cfg.q_sorted
    admissible = s.contains(q1) and q2 > max(float(bound), dims.p)
    ce_o = critical_exponents(cfg.asym_origin.a, cfg.asym_origin.alpha,
                              cfg.asym_origin.beta, cfg.asym_origin.gamma, dims)
    ce_i = critical_exponents(cfg.asym_infinity.a, cfg.asym_infinity.alpha,
                              cfg.asym_infinity.beta, cfg.asym_infinity.gamma, dims)
    constraints = []
    if s.alpha_constraint is not None:
        constraints.append({"kind": s.alpha_constraint.kind,
                            "satisfied": s.alpha_constraint.satisfied})
    return {
        "schema_version": SCHEMA_VERSION,
        "q1_interval": {"lower": float(s.lower), "upper": float(s.upper)},
        "q1_alpha_constraints": constraints,
        "q2_lower_bound": float(bound),
        "q1": q1, "q2": q2,
        "q_order_swapped": cfg.q_order_swapped,
        "admissible": bool(admissible),
        "thresholds": {
            "origin": {
                "q_star": None if ce_o.q_star is None else float(ce_o.q_star),
                "q_double_star": None if ce_o.q_double_star is None
                else float(ce_o.q_double_star),
                "p_sobolev": float(ce_o.p_sobolev),
            },
            "infinity": {
                "q_star": None if ce_i.q_star is None else float(ce_i.q_star),
                "q_double_star": None if ce_i.q_double_star is None
                else float(ce_i.q_double_star),
                "p_sobolev": float(ce_i.p_sobolev),
            },
        },
    }


def region_plot_rows(cfg: RunConfig, alpha_range, q_range, resolution):
    """Membership raster of the origin region over an (alpha, q) rectangle."""
    a_lo, a_hi = alpha_range
    q_lo, q_hi = q_range
    rows = []
    for alpha in np.linspace(a_lo, a_hi, resolution):
        asym = EndpointAsymptotics(
            end="origin", a=cfg.asym_origin.a, alpha=float(alpha),
            beta=cfg.asym_origin.beta, gamma=cfg.asym_origin.gamma,
            R=cfg.asym_origin.R)
        for q in np.linspace(q_lo, q_hi, resolution):
            member = q1_region_membership(asym, float(q), cfg.dims)
            rows.append((float(alpha), float(q), int(member)))
    return rows


def check_report(cfg: RunConfig) -> dict:
    radii = default_radii()
    rep = validate_hypotheses((cfg.spec_A, cfg.spec_V, cfg.spec_K), cfg.dims,
                              cfg.asym_origin, cfg.asym_infinity,
                              radii=radii, s_loc=cfg.s_loc)
    out = rep.to_dict()
    out["schema_version"] = SCHEMA_VERSION
    return out


def probe_report(cfg: RunConfig) -> dict:
    dims = cfg.dims
    grid = build_grid(cfg.probe_r_min, cfg.probe_r_max, cfg.probe_n_nodes, dims)
    table = eval_potentials(cfg.spec_A, cfg.spec_V, cfg.spec_K, grid.nodes)
    nu_o = float(pointwise_decay_exponent(cfg.asym_origin.a,
                                          cfg.asym_origin.gamma, dims))
    nu_i = float(pointwise_decay_exponent(cfg.asym_infinity.a,
                                          cfg.asym_infinity.gamma, dims))
    q1, q2 = cfg.q_sorted
    fam_o = make_trial_family(grid, table, nu_o, "origin")
    fam_i = make_trial_family(grid, table, nu_i, "infinity")
    curve_o = probe_origin(table, q1, cfg.R_origin, fam_o)
    curve_i = probe_infinity(table, q2, cfg.R_infinity, fam_i)
    return {
        "schema_version": SCHEMA_VERSION,
        "origin": {
            "q": q1,
            "samples": [[R, v] for R, v in curve_o.samples],
            "verdict": decay_verdict(curve_o, cfg.probe_threshold),
            "family_size": len(fam_o),
        },
        "infinity": {
            "q": q2,
            "samples": [[R, v] for R, v in curve_i.samples],
            "verdict": decay_verdict(curve_i, cfg.probe_threshold),
            "family_size": len(fam_i),
        },
        "_curves": (curve_o, curve_i),
    }


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format(float(v), ".17g") if isinstance(v, float)
                             else v for v in row])


def _solve_once(cfg: RunConfig, r_min, r_max, n_nodes):
    grid = build_grid(r_min, r_max, n_nodes, cfg.dims)
    table = eval_potentials(cfg.spec_A, cfg.spec_V, cfg.spec_K, grid.nodes)
    if not (np.all(np.isfinite(table.values_A)) and np.all(np.isfinite(table.values_V))
            and np.all(np.isfinite(table.values_K))):
        raise ConfigError(
            "potentials overflow the float range on the solve grid; "
            "shrink [r_min, r_max]")
    u, rep = solve_ground_state(table, cfg.solver_nonlinearity(), grid,
                                tol=cfg.solve_tol, max_iter=cfg.max_iter,
                                asym_origin=cfg.asym_origin,
                                asym_infinity=cfg.asym_infinity)
    return grid, u, rep


def _truncation_sensitivity_report(cfg: RunConfig, u, rep):
    """Re-solve on a domain shrunk by one decade per side and report the
    relative drift of the energy and of the peak value."""
    r_min, r_max = cfg.r_min * 10.0, cfg.r_max / 10.0
    if not r_min < r_max / 10.0:
        return {"skipped": "domain too narrow to shrink"}
    decades_full = math.log10(cfg.r_max / cfg.r_min)
    decades = math.log10(r_max / r_min)
    n = max(128, int(cfg.n_nodes * decades / decades_full))
    try:
        _, u2, rep2 = _solve_once(cfg, r_min, r_max, n)
    except (NotConverged, CollapsedToZero, ConfigError) as exc:
        return {"failed": f"{type(exc).__name__}: {exc}"}
    peak1 = float(np.max(u.values))
    peak2 = float(np.max(u2.values))
    return {
        "domain": [r_min, r_max],
        "energy_rel_diff": abs(rep2.energy - rep.energy) / max(abs(rep.energy), 1e-300),
        "peak_rel_diff": abs(peak2 - peak1) / max(peak1, 1e-300),
    }


def solve_to_files(cfg: RunConfig, out_dir: Path, prefix="solution"):
    """Run the ground-state solve and write CSV + report JSON.

    Returns (report dict, exit code)."""
    try:
        grid, u, rep = _solve_once(cfg, cfg.r_min, cfg.r_max, cfg.n_nodes)
    except NotConverged as exc:
        return {"error": "not_converged", "detail": str(exc)}, EXIT_NOT_CONVERGED
    except CollapsedToZero as exc:
        return {"error": "collapsed_to_zero", "detail": str(exc)}, EXIT_COLLAPSED
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_csv(out_dir / f"{prefix}.csv", ["r", "u"],
               list(zip(grid.nodes.tolist(), u.values.tolist())))
    report = {"schema_version": SCHEMA_VERSION, **rep.to_dict()}
    # exponent admissibility is warn-only for the solver (exploration is fine)
    try:
        report["admissible"] = region_report(cfg)["admissible"]
    except InvalidAsymptotics as exc:
        report["admissible"] = None
        report["admissibility_warning"] = str(exc)
    else:
        if not report["admissible"]:
            report["admissibility_warning"] = (
                "configured (q1, q2) lie outside the computed admissible ranges")
    report["truncation_sensitivity"] = _truncation_sensitivity_report(cfg, u, rep)
    (out_dir / f"{prefix}_report.json").write_text(canonical_json(report) + "\n")
    return report, EXIT_OK


# ---------------------------------------------------------------------------
# Built-in example problems
# ---------------------------------------------------------------------------

def example_config(name: str) -> dict:
    """JSON configuration documents for the bundled reference problems."""
    if name == "ex1":
        return {
            "schema_version": 1,
            "dims": {"N": 4, "p": 2.0},
            "potentials": {
                "A": {"kind": "power", "c": 1.0, "e": -1.0},
                "V": {"kind": "piecewise", "breakpoint": 1.0,
                      "inner": {"kind": "exp_inv", "scale": 1.0},
                      "outer": {"kind": "power", "c": 1.0, "e": -3.0}},
                "K": {"kind": "piecewise", "breakpoint": 1.0,
                      "inner": {"kind": "exp_inv", "scale": 1.0},
                      "outer": {"kind": "constant", "c": 1.0}},
                "s_loc": 2.0,
            },
            "asymptotics": {
                "origin": {"a": -1.0, "alpha": 0.0, "beta": 1.0, "gamma": 8.0, "R": 1.0},
                "infinity": {"a": -1.0, "alpha": 0.0, "beta": 0.0, "gamma": 3.0, "R": 1.0},
            },
            "nonlinearity": {"kind": "min_powers", "q1": 9.0, "q2": 9.0},
            "grid": {"r_min": 4e-3, "r_max": 1e4, "n_nodes": 1600},
            "tolerances": {"solve_tol": 1e-5, "max_iter": 20000},
        }
    if name in ("ex2_I", "ex2_II", "ex2_III"):
        # dimensions chosen so the quasilinearity sits strictly below N - 2
        N, p, d = 5, 2.0, 10.0
        gamma0 = {"ex2_I": 4.0, "ex2_II": float(N), "ex2_III": 6.0}[name]
        return {
            "schema_version": 1,
            "dims": {"N": N, "p": p},
            "potentials": {
                "A": {"kind": "min", "args": [
                    {"kind": "power", "c": 1.0, "e": -2.0},
                    {"kind": "power", "c": 1.0, "e": -1.0}]},
                "V": {"kind": "max", "args": [
                    {"kind": "power", "c": 1.0, "e": -gamma0},
                    {"kind": "power", "c": 1.0, "e": 0.5}]},
                "K": {"kind": "max", "args": [
                    {"kind": "power", "c": 1.0, "e": d},
                    {"kind": "power", "c": 1.0, "e": 0.5}]},
                "s_loc": 2.0,
            },
            "asymptotics": {
                "origin": {"a": -1.0, "alpha": 0.5, "beta": 0.0, "gamma": gamma0, "R": 0.5},
                "infinity": {"a": -2.0, "alpha": d, "beta": 0.0, "gamma": -0.5, "R": 2.0},
            },
            "nonlinearity": {"kind": "min_powers", "q1": 3.0, "q2": 8.5},
            "grid": {"r_min": 1e-4, "r_max": 1e4, "n_nodes": 1600},
            "tolerances": {"solve_tol": 1e-5, "max_iter": 20000},
        }
    raise ConfigError(f"unknown example {name!r}; "
                      "choose from ex1, ex2_I, ex2_II, ex2_III")


def _example2_formula_layer(d=10.0):
    """Published threshold values of the second example's formula layer
    (evaluated at N=4, p=2, where the pipeline constraint p < N-2 is not
    needed for the algebra)."""
    dims = ProblemDims(N=4, p=2)
    qs = q_star(Fraction(int(d)), 0, Fraction(-1, 2), dims)
    qss = q_double_star(-2, Fraction(int(d)), 0, Fraction(-1, 2), dims)
    return {
        "dims": {"N": 4, "p": 2.0},
        "d": d,
        "q_star_infinity": float(qs),
        "q_double_star_infinity": float(qss),
        "q_double_star_gt_q_star": bool(qss > qs),
        "q_star_exact": [qs.numerator, qs.denominator],
        "q_double_star_exact": [qss.numerator, qss.denominator],
    }


def smallest_sampled_d(dims: ProblemDims, d_max=20.0, step=0.5):
    """Smallest sampled d at which the second threshold strictly exceeds the
    first for the far-field data of the second example (empirical, grid 0.5)."""
    d = step
    while d <= d_max:
        qs = q_star(d, 0.0, -0.5, dims)
        qss = q_double_star(-2.0, d, 0.0, -0.5, dims)
        if qss > qs:
            return d
        d += step
    return math.nan


def run_example(name: str, out_dir: Path) -> dict:
    cfg_json = example_config(name)
    cfg = load_config(cfg_json)
    doc = {"schema_version": SCHEMA_VERSION, "example": name,
           "config": cfg_json}

    region = region_report(cfg)
    doc["region"] = region

    if name == "ex1":
        thr = region["thresholds"]["infinity"]
        assert thr["q_star"] == 8.0 and thr["q_double_star"] == 8.0
        assert region["q1_interval"]["lower"] == 2.0
        doc["thresholds_asserted"] = {
            "q_star_infinity": 8.0, "q_double_star_infinity": 8.0,
            "q1_lower": 2.0}
    else:
        formula = _example2_formula_layer()
        assert formula["q_star_exact"] == [56, 9]
        assert formula["q_double_star_exact"] == [94, 9]
        assert formula["q_double_star_gt_q_star"]
        doc["formula_layer"] = formula
        doc["smallest_sampled_d"] = smallest_sampled_d(cfg.dims)
        if name == "ex2_II":
            N, p = cfg.dims.N, cfg.dims.p
            expected = p * (p / 2 + (N - 1) * (p + 1)) / (N - p - 1)
            assert region["q1_interval"]["upper"] == expected
            doc["q1_upper_bound_formula"] = expected
        if name == "ex2_III":
            assert region["thresholds"]["origin"]["q_star"] < 0
    doc["check"] = check_report(cfg)
    probe = probe_report(cfg)
    probe.pop("_curves")
    doc["probe"] = probe
    solve_rep, code = solve_to_files(cfg, out_dir, prefix=f"{name}_solution")
    doc["solve"] = solve_rep
    doc["solve_exit_code"] = code
    return doc


# ---------------------------------------------------------------------------
# argparse front end
# ---------------------------------------------------------------------------

def _parse_range(text):
    lo, hi = text.split(":")
    return float(lo), float(hi)


def _parse_sweep(text):
    key, _, rng = text.partition("=")
    lo, hi, step = rng.split(":")
    return key, float(lo), float(hi), float(step)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="quasiradial",
        description="Exponent calculus, hypothesis checks and radial solves "
                    "for weighted quasilinear elliptic equations.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--config", required=True, help="JSON configuration file")
        sp.add_argument("--out", default=".", help="output directory")

    sp = sub.add_parser("region", help="admissible exponent report")
    add_common(sp)

    sp = sub.add_parser("region-plot", help="membership raster over the alpha-q plane")
    add_common(sp)
    sp.add_argument("--alpha-range", type=_parse_range, default=(-10.0, 5.0))
    sp.add_argument("--q-range", type=_parse_range, default=(1.0, 15.0))
    sp.add_argument("--resolution", type=int, default=64)

    sp = sub.add_parser("check", help="validate the admissibility hypotheses")
    add_common(sp)

    sp = sub.add_parser("probe", help="supremum decay probes at both endpoints")
    add_common(sp)

    sp = sub.add_parser("solve", help="compute the nonnegative ground state")
    add_common(sp)
    sp.add_argument("--force", action="store_true",
                    help="solve even if the hypothesis check fails")
    sp.add_argument("--sweep", type=_parse_sweep, default=None,
                    metavar="KEY=LO:HI:STEP",
                    help="fan out solves over q, q1 or q2")

    sp = sub.add_parser("example", help="run a bundled reference problem")
    sp.add_argument("name", choices=["ex1", "ex2_I", "ex2_II", "ex2_III"])
    sp.add_argument("--out", default=".", help="output directory")
    sp.add_argument("--sweep", type=_parse_sweep, default=None,
                    metavar="d=LO:HI:STEP",
                    help="fan out solves of the second example over d")
    return parser


def sweep_example_d(name: str, out_dir: Path, lo, hi, step):
    """Independent solves of the second example across far-field growth rates d."""
    if not name.startswith("ex2"):
        raise ConfigError("the d sweep applies to the ex2_* examples only")
    summary = {}
    code = EXIT_OK
    d = lo
    while d <= hi + 1e-12:
        cfg_json = example_config(name)
        cfg_json["potentials"]["K"]["args"][0]["e"] = d
        cfg_json["asymptotics"]["infinity"]["alpha"] = d
        cfg = load_config(cfg_json)
        rep, c = solve_to_files(cfg, out_dir, prefix=f"{name}_d_{d:g}")
        bound = q2_lower_bound(cfg.asym_infinity, cfg.dims)
        summary[f"{d:g}"] = {"q2_lower_bound": float(bound), "solve": rep}
        code = max(code, c)
        d += step
    return {"schema_version": SCHEMA_VERSION, "example": name, "sweep": "d",
            "results": summary}, code


def _emit(doc):
    sys.stdout.write(canonical_json(doc) + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out_dir = Path(args.out)
    try:
        if args.command == "example":
            out_dir.mkdir(parents=True, exist_ok=True)
            if args.sweep is not None:
                key, lo, hi, step = args.sweep
                if key != "d":
                    raise ConfigError("example sweeps support the key 'd' only")
                doc, code = sweep_example_d(args.name, out_dir, lo, hi, step)
                _emit(doc)
                return code
            doc = run_example(args.name, out_dir)
            _emit(doc)
            return doc.get("solve_exit_code", EXIT_OK)

        cfg = load_config_file(args.config)

        if args.command == "region":
            _emit(region_report(cfg))
            return EXIT_OK

        if args.command == "region-plot":
            rows = region_plot_rows(cfg, args.alpha_range, args.q_range,
                                    args.resolution)
            out_dir.mkdir(parents=True, exist_ok=True)
            path = out_dir / "region_plot.csv"
            _write_csv(path, ["alpha", "q", "member"], rows)
            _emit({"schema_version": SCHEMA_VERSION, "rows": len(rows),
                   "path": str(path)})
            return EXIT_OK

        if args.command == "check":
            doc = check_report(cfg)
            _emit(doc)
            return EXIT_OK if doc["passed"] else EXIT_HYPOTHESIS

        if args.command == "probe":
            doc = probe_report(cfg)
            curves = doc.pop("_curves")
            out_dir.mkdir(parents=True, exist_ok=True)
            _write_csv(out_dir / "probe_origin.csv", ["R", "value"],
                       curves[0].samples)
            _write_csv(out_dir / "probe_infinity.csv", ["R", "value"],
                       curves[1].samples)
            _emit(doc)
            return EXIT_OK

        if args.command == "solve":
            check = check_report(cfg)
            if not check["passed"] and not args.force:
                _emit({"error": "hypothesis_check_failed", "check": check})
                return EXIT_HYPOTHESIS
            if args.sweep is not None:
                key, lo, hi, step = args.sweep
                if key not in ("q", "q1", "q2"):
                    raise ConfigError(f"unsupported sweep key {key!r}")
                summary = {}
                code = EXIT_OK
                val = lo
                while val <= hi + 1e-12:
                    nl = cfg.nonlinearity
                    q1 = val if key in ("q", "q1") else nl.q1
                    q2 = val if key in ("q", "q2") else nl.q2
                    cfg.nonlinearity = NonlinearitySpec(
                        kind=nl.kind, q1=q1, q2=q2, M=nl.M, t0=nl.t0)
                    rep, c = solve_to_files(cfg, out_dir,
                                            prefix=f"solution_{key}_{val:g}")
                    summary[f"{val:g}"] = rep
                    code = max(code, c)
                    val += step
                _emit({"schema_version": SCHEMA_VERSION, "sweep": key,
                       "results": summary})
                return code
            rep, code = solve_to_files(cfg, out_dir)
            _emit(rep)
            return code

        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        _emit({"error": "invalid_config", "detail": str(exc)})
        return EXIT_CONFIG
    except InvalidAsymptotics as exc:
        _emit({"error": "invalid_asymptotics", "detail": str(exc)})
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
