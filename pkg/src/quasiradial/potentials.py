"""Radial potential models and numeric hypothesis checks.

Potentials are closed-form expression trees (powers, exponentials of 1/r,
min/max combinations, piecewise splices) evaluated on log-spaced grids.  The
essential sup/inf quantities behind the admissibility hypotheses are
approximated by grid extrema with one local dyadic refinement; extremely
singular factors like e^{1/r} are handled through exact log-values carried by
every table, so the ratio K / (r^alpha V^beta) stays computable even where the
individual potentials overflow.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .exponents import EndpointAsymptotics, ProblemDims, validate_endpoint, InvalidAsymptotics


class NonPositive(ValueError):
    """A or K evaluated to a non-positive value."""


class DivisionByZeroV(ZeroDivisionError):
    """V vanishes on the sample while beta > 0: the ratio sup is +inf."""


class InsufficientRange(ValueError):
    """The table does not span enough decades for the requested estimate."""


# ---------------------------------------------------------------------------
# Potential expression trees
# ---------------------------------------------------------------------------

class PotentialSpec:
    """Base class for closed-form radial potentials on (0, inf)."""

    kind = "abstract"

    def __call__(self, r):
        return self.evaluate(np.asarray(r, dtype=float))

    def evaluate(self, r):
        raise NotImplementedError

    def evaluate_log(self, r):
        """Natural log of the potential, computed without overflow."""
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Power(PotentialSpec):
    c: float = 1.0
    e: float = 0.0
    kind = "power"

    def evaluate(self, r):
        with np.errstate(over="ignore"):
            return self.c * np.asarray(r, dtype=float) ** self.e

    def evaluate_log(self, r):
        if self.c <= 0:
            raise NonPositive(f"power coefficient must be positive, got {self.c}")
        return math.log(self.c) + self.e * np.log(r)

    def to_json(self):
        return {"kind": "power", "c": self.c, "e": self.e}


@dataclass(frozen=True)
class Constant(PotentialSpec):
    c: float = 1.0
    kind = "constant"

    def evaluate(self, r):
        return np.full_like(np.asarray(r, dtype=float), self.c)

    def evaluate_log(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return np.full_like(r, math.log(self.c) if self.c > 0 else -math.inf)

    def to_json(self):
        return {"kind": "constant", "c": self.c}


@dataclass(frozen=True)
class ExpInv(PotentialSpec):
    """e^{scale / r}: singular at the origin for scale > 0."""

    scale: float = 1.0
    kind = "exp_inv"

    def evaluate(self, r):
        with np.errstate(over="ignore"):
            return np.exp(self.scale / np.asarray(r, dtype=float))

    def evaluate_log(self, r):
        return self.scale / np.asarray(r, dtype=float)

    def to_json(self):
        return {"kind": "exp_inv", "scale": self.scale}


@dataclass(frozen=True)
class MinOf(PotentialSpec):
    parts: tuple
    kind = "min"

    def evaluate(self, r):
        return np.minimum.reduce([s.evaluate(r) for s in self.parts])

    def evaluate_log(self, r):
        return np.minimum.reduce([s.evaluate_log(r) for s in self.parts])

    def to_json(self):
        return {"kind": "min", "args": [s.to_json() for s in self.parts]}


@dataclass(frozen=True)
class MaxOf(PotentialSpec):
    parts: tuple
    kind = "max"

    def evaluate(self, r):
        return np.maximum.reduce([s.evaluate(r) for s in self.parts])

    def evaluate_log(self, r):
        return np.maximum.reduce([s.evaluate_log(r) for s in self.parts])

    def to_json(self):
        return {"kind": "max", "args": [s.to_json() for s in self.parts]}


@dataclass(frozen=True)
class Piecewise(PotentialSpec):
    """inner for r < breakpoint, outer for r >= breakpoint."""

    breakpoint: float
    inner: PotentialSpec
    outer: PotentialSpec
    kind = "piecewise"

    def evaluate(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r < self.breakpoint, self.inner.evaluate(r), self.outer.evaluate(r))

    def evaluate_log(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r < self.breakpoint, self.inner.evaluate_log(r),
                        self.outer.evaluate_log(r))

    def to_json(self):
        return {"kind": "piecewise", "breakpoint": self.breakpoint,
                "inner": self.inner.to_json(), "outer": self.outer.to_json()}


def spec_from_json(obj) -> PotentialSpec:
    """Rebuild a potential expression tree from its JSON form."""
    kind = obj["kind"]
    if kind == "power":
        return Power(c=float(obj.get("c", 1.0)), e=float(obj.get("e", 0.0)))
    if kind == "constant":
        return Constant(c=float(obj["c"]))
    if kind == "exp_inv":
        return ExpInv(scale=float(obj.get("scale", 1.0)))
    if kind == "min":
        return MinOf(tuple(spec_from_json(s) for s in obj["args"]))
    if kind == "max":
        return MaxOf(tuple(spec_from_json(s) for s in obj["args"]))
    if kind == "piecewise":
        return Piecewise(breakpoint=float(obj["breakpoint"]),
                         inner=spec_from_json(obj["inner"]),
                         outer=spec_from_json(obj["outer"]))
    raise ValueError(f"unknown potential kind {kind!r}")


# ---------------------------------------------------------------------------
# Sampled tables
# ---------------------------------------------------------------------------

def default_radii(decades_each_side=6, per_decade=256):
    """Log-spaced grid around r = 1, 256 points per decade by default."""
    n = 2 * decades_each_side * per_decade + 1
    return np.logspace(-decades_each_side, decades_each_side, n)


@dataclass
class PotentialTable:
    """Sampled A, V, K on a strictly increasing positive radius grid.

    log_A/log_V/log_K are exact log-values when the table was built from
    specs; linear values may be inf where a spec overflows float range.
    """

    radii: np.ndarray
    values_A: np.ndarray
    values_V: np.ndarray
    values_K: np.ndarray
    refinement_level: int = 0
    log_A: Optional[np.ndarray] = None
    log_V: Optional[np.ndarray] = None
    log_K: Optional[np.ndarray] = None
    specs: Optional[tuple] = None

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if r.ndim != 1 or len(r) < 2:
            raise ValueError("radii must be a 1-d grid with at least 2 points")
        if not np.all(r > 0) or not np.all(np.diff(r) > 0):
            raise ValueError("radii must be positive and strictly increasing")
        if self.log_A is not None and self.log_K is not None:
            # spec-backed: positivity is judged on the exact log-values, since
            # a genuinely positive potential may underflow the linear range
            if np.any(np.isneginf(self.log_A)) or np.any(np.isnan(self.log_A)) \
                    or np.any(np.isneginf(self.log_K)) or np.any(np.isnan(self.log_K)):
                raise NonPositive("A and K must be strictly positive")
        elif np.any(self.values_A <= 0) or np.any(self.values_K <= 0):
            raise NonPositive("A and K must be strictly positive")
        if np.any(self.values_V < 0):
            raise NonPositive("V must be nonnegative")
        with np.errstate(divide="ignore"):
            if self.log_A is None:
                self.log_A = np.log(self.values_A)
            if self.log_V is None:
                self.log_V = np.log(self.values_V)
            if self.log_K is None:
                self.log_K = np.log(self.values_K)

    def interval_mask(self, r_lo, r_hi):
        return (self.radii >= r_lo) & (self.radii <= r_hi)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["r", "A", "V", "K"])
            for i in range(len(self.radii)):
                writer.writerow([format(float(v), ".17g") for v in
                                 (self.radii[i], self.values_A[i],
                                  self.values_V[i], self.values_K[i])])


def eval_potentials(spec_A: PotentialSpec, spec_V: PotentialSpec,
                    spec_K: PotentialSpec, radii) -> PotentialTable:
    """Tabulate the three potentials on `radii` with exact log-values."""
    r = np.asarray(radii, dtype=float)
    log_A = spec_A.evaluate_log(r)
    log_V = spec_V.evaluate_log(r)
    log_K = spec_K.evaluate_log(r)
    if np.any(np.isnan(log_A)) or np.any(np.isnan(log_K)) \
            or np.any(log_A == -np.inf) or np.any(log_K == -np.inf):
        raise NonPositive("A and K must be strictly positive on the grid")
    with np.errstate(over="ignore"):
        table = PotentialTable(
            radii=r,
            values_A=np.exp(log_A),
            values_V=np.exp(log_V),
            values_K=np.exp(log_K),
            log_A=log_A, log_V=log_V, log_K=log_K,
            specs=(spec_A, spec_V, spec_K),
        )
    return table


# ---------------------------------------------------------------------------
# Asymptotic bounds
# ---------------------------------------------------------------------------

QUANTITY_ESSSUP = "esssup_K_over_r_alpha_V_beta"
QUANTITY_ESSINF = "essinf_r_gamma_V"
QUANTITY_RATIO_A = "ratio_A_over_r_alpha"


@dataclass(frozen=True)
class AsymptoticBound:
    quantity: str
    interval: tuple
    value: float
    grid_points: int
    converged: bool
    heuristic: bool = False


@dataclass(frozen=True)
class LimitExponent:
    exponent: float
    c_lo: float
    c_hi: float


def _refine_radii(radii, idx, factor=2):
    """Dyadically refined local grid spanning the neighbours of node idx."""
    lo = radii[max(idx - 1, 0)]
    hi = radii[min(idx + 1, len(radii) - 1)]
    if hi <= lo:
        return np.array([])
    n = 2 * factor * 8 + 1
    return np.logspace(math.log10(lo), math.log10(hi), n)


def _log_ratio(table, alpha, beta, mask):
    log_r = np.log(table.radii[mask])
    out = table.log_K[mask] - alpha * log_r
    if beta != 0:
        out = out - beta * table.log_V[mask]
    return out


def esssup_ratio(table: PotentialTable, alpha: float, beta: float,
                 interval, tol=1e-3) -> AsymptoticBound:
    """Grid sup of K / (r^alpha V^beta) with one local dyadic refinement.

    V^0 is 1 everywhere by convention, so a beta = 0 call never reads V.
    """
    r_lo, r_hi = interval
    mask = table.interval_mask(r_lo, r_hi)
    if not np.any(mask):
        raise InsufficientRange(f"no grid points inside ({r_lo}, {r_hi})")
    if beta != 0 and np.any(table.values_V[mask] == 0):
        raise DivisionByZeroV("V vanishes on the sample while beta > 0")
    log_vals = _log_ratio(table, alpha, beta, mask)
    i_rel = int(np.argmax(log_vals))
    idx = np.flatnonzero(mask)[i_rel]
    log_v0 = log_vals[i_rel]
    n_pts = int(mask.sum())
    converged = True
    log_v1 = log_v0
    if table.specs is not None:
        sub_r = _refine_radii(table.radii, idx)
        sub_r = sub_r[(sub_r >= r_lo) & (sub_r <= r_hi)]
        if len(sub_r):
            spec_A, spec_V, spec_K = table.specs
            sub = spec_K.evaluate_log(sub_r) - alpha * np.log(sub_r)
            if beta != 0:
                sub = sub - beta * spec_V.evaluate_log(sub_r)
            log_v1 = max(log_v0, float(np.max(sub)))
            n_pts += len(sub_r)
        converged = abs(log_v1 - log_v0) <= tol
    with np.errstate(over="ignore"):
        value = float(np.exp(log_v1))
    return AsymptoticBound(QUANTITY_ESSSUP, (float(r_lo), float(r_hi)), value,
                           n_pts, bool(converged), heuristic=table.specs is None)


def essinf_weighted(table: PotentialTable, gamma: float, interval,
                    tol=1e-3) -> AsymptoticBound:
    """Grid inf of r^gamma V with one local dyadic refinement.

    Returns 0 (no error) when V vanishes on the sample.
    """
    r_lo, r_hi = interval
    mask = table.interval_mask(r_lo, r_hi)
    if not np.any(mask):
        raise InsufficientRange(f"no grid points inside ({r_lo}, {r_hi})")
    log_vals = gamma * np.log(table.radii[mask]) + table.log_V[mask]
    i_rel = int(np.argmin(log_vals))
    idx = np.flatnonzero(mask)[i_rel]
    log_v0 = log_vals[i_rel]
    n_pts = int(mask.sum())
    converged = True
    log_v1 = log_v0
    if table.specs is not None:
        sub_r = _refine_radii(table.radii, idx)
        sub_r = sub_r[(sub_r >= r_lo) & (sub_r <= r_hi)]
        if len(sub_r):
            spec_V = table.specs[1]
            sub = gamma * np.log(sub_r) + spec_V.evaluate_log(sub_r)
            log_v1 = min(log_v0, float(np.min(sub)))
            n_pts += len(sub_r)
        converged = (log_v1 == -math.inf and log_v0 == -math.inf) \
            or abs(log_v1 - log_v0) <= tol
    value = 0.0 if log_v1 == -math.inf else float(np.exp(log_v1))
    return AsymptoticBound(QUANTITY_ESSINF, (float(r_lo), float(r_hi)), value,
                           n_pts, bool(converged), heuristic=table.specs is None)


def estimate_limit_exponent(table: PotentialTable, which: str, end: str,
                            min_decades=3.0) -> LimitExponent:
    """Log-log slope of A, V or K over the last decade toward one endpoint."""
    logs = {"A": table.log_A, "V": table.log_V, "K": table.log_K}[which]
    r = table.radii
    total_decades = math.log10(r[-1] / r[0])
    if total_decades < min_decades:
        raise InsufficientRange(
            f"table spans {total_decades:.2f} decades, need >= {min_decades}")
    if end == "origin":
        mask = r <= r[0] * 10.0
    elif end == "infinity":
        mask = r >= r[-1] / 10.0
    else:
        raise ValueError(f"unknown end {end!r}")
    x = np.log(r[mask])
    y = logs[mask]
    if not np.all(np.isfinite(y)):
        raise InsufficientRange("potential is zero or non-finite on the end decade")
    slope, _ = np.polyfit(x, y, 1)
    resid = y - slope * x
    return LimitExponent(exponent=float(slope),
                         c_lo=float(np.exp(np.min(resid))),
                         c_hi=float(np.exp(np.max(resid))))


# ---------------------------------------------------------------------------
# Hypothesis validation
# ---------------------------------------------------------------------------

@dataclass
class CheckResult:
    name: str
    passed: bool
    value: object = None
    detail: str = ""
    gating: bool = True

    def to_dict(self):
        return {"name": self.name, "passed": self.passed, "value": self.value,
                "detail": self.detail, "gating": self.gating}


@dataclass
class HypothesisReport:
    entries: list = field(default_factory=list)
    bounds: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries if e.gating)

    def add(self, *args, **kwargs):
        self.entries.append(CheckResult(*args, **kwargs))

    def to_dict(self):
        return {
            "passed": self.passed,
            "checks": [e.to_dict() for e in self.entries],
            "bounds": {k: {"quantity": b.quantity, "interval": list(b.interval),
                           "value": b.value, "grid_points": b.grid_points,
                           "converged": b.converged, "heuristic": b.heuristic}
                       for k, b in self.bounds.items()},
        }


def _end_trend(r_sub, log_sub, end):
    """Fitted log-log slope of a sampled quantity over its end decade."""
    if end == "origin":
        m = r_sub <= r_sub[0] * 10
    else:
        m = r_sub >= r_sub[-1] / 10
    x = np.log(r_sub[m])
    y = log_sub[m]
    good = np.isfinite(y)
    if good.sum() < 2:
        return math.nan
    slope, _ = np.polyfit(x[good], y[good], 1)
    return float(slope)


def _quad_refinement_cauchy(f_vals, r, tol=1e-8):
    """Trapezoid integral of sampled values, plus a convergence-under-refinement flag.

    The integral converges if the difference between successive grid
    coarsenings either is below tolerance already or shrinks by the factor
    expected of a convergent quadrature.
    """
    full = float(np.trapezoid(f_vals, r))
    half = float(np.trapezoid(f_vals[::2], r[::2]))
    quarter = float(np.trapezoid(f_vals[::4], r[::4]))
    d1 = abs(full - half)
    d2 = abs(half - quarter)
    converged = math.isfinite(full) and (
        d1 <= tol * (1.0 + abs(full)) or (d2 > 0 and d1 <= 0.6 * d2))
    return full, converged


def validate_hypotheses(specs, dims: ProblemDims,
                        asym_origin: EndpointAsymptotics,
                        asym_infinity: EndpointAsymptotics,
                        radii=None, s_loc=2.0) -> HypothesisReport:
    """Numerically verify the admissibility hypotheses on concrete potentials.

    Failures are report entries, not exceptions.  Local integrability is
    checked on compact subsets of (0, inf) away from the endpoints, which is
    what the hypotheses require; the weighted near-origin integral is reported
    as a non-gating diagnostic.
    """
    spec_A, spec_V, spec_K = specs
    if radii is None:
        radii = default_radii()
    table = eval_potentials(spec_A, spec_V, spec_K, radii)
    rep = HypothesisReport()
    p, N = dims.p, dims.N

    for label, asym in (("origin", asym_origin), ("infinity", asym_infinity)):
        ok = p - N < asym.a <= p
        rep.add(f"a_{label}_in_range", ok,
                value=asym.a, detail=f"requires a in ({p - N}, {p}]")
        try:
            validate_endpoint(asym, dims)
            rep.add(f"asymptotics_{label}_consistent", True)
        except InvalidAsymptotics as exc:
            rep.add(f"asymptotics_{label}_consistent", False, detail=str(exc))

    # declared growth rate of A at each end, plus the ratio band A / r^a
    for label, end, a_decl in (("origin", "origin", asym_origin.a),
                               ("infinity", "infinity", asym_infinity.a)):
        est = estimate_limit_exponent(table, "A", end)
        ok = abs(est.exponent - a_decl) < 0.05 and est.c_lo > 0 \
            and math.isfinite(est.c_hi)
        rep.add(f"A_rate_{label}", ok, value=est.exponent,
                detail=f"declared a = {a_decl}, fitted band [{est.c_lo:.3g}, {est.c_hi:.3g}]")
        r = table.radii
        mask = r <= r[0] * 10 if end == "origin" else r >= r[-1] / 10
        log_ratio = table.log_A[mask] - a_decl * np.log(r[mask])
        with np.errstate(over="ignore"):
            rep.bounds[f"ratio_A_{label}"] = AsymptoticBound(
                QUANTITY_RATIO_A,
                (float(r[mask][0]), float(r[mask][-1])),
                float(np.exp(np.max(log_ratio))),
                int(mask.sum()), converged=bool(ok),
                heuristic=table.specs is None)

    r_min, r_max = table.radii[0], table.radii[-1]

    def _sup_check(label, asym, interval, end):
        try:
            bound = esssup_ratio(table, asym.alpha, asym.beta, interval)
        except DivisionByZeroV:
            rep.add(f"esssup_{label}_finite", False,
                    detail="V vanishes on the sample while beta > 0")
            return
        mask = table.interval_mask(*interval)
        logs = _log_ratio(table, asym.alpha, asym.beta, mask)
        slope = _end_trend(table.radii[mask], logs, end)
        diverging = (end == "origin" and slope < -0.01) \
            or (end == "infinity" and slope > 0.01)
        ok = math.isfinite(bound.value) and bound.converged and not diverging
        rep.bounds[f"esssup_{label}"] = bound
        rep.add(f"esssup_{label}_finite", ok, value=bound.value,
                detail=f"end trend slope {slope:.3g}")

    def _inf_check(label, asym, interval, end):
        bound = essinf_weighted(table, asym.gamma, interval)
        mask = table.interval_mask(*interval)
        logs = asym.gamma * np.log(table.radii[mask]) + table.log_V[mask]
        slope = _end_trend(table.radii[mask], logs, end)
        vanishing = (end == "origin" and slope > 0.01) \
            or (end == "infinity" and slope < -0.01)
        ok = bound.value > 0 and not vanishing
        rep.bounds[f"essinf_{label}"] = bound
        rep.add(f"essinf_{label}_positive", ok, value=bound.value,
                detail=f"end trend slope {slope:.3g}")

    _sup_check("origin", asym_origin, (r_min, asym_origin.R), "origin")
    _inf_check("origin", asym_origin, (r_min, asym_origin.R), "origin")
    _sup_check("infinity", asym_infinity, (asym_infinity.R, r_max), "infinity")
    _inf_check("infinity", asym_infinity, (asym_infinity.R, r_max), "infinity")

    # local integrability on an interior compact (the hypotheses only ask for
    # integrability away from the endpoints)
    lo = max(r_min, 1e-2)
    hi = min(r_max, 1e2)
    mask = table.interval_mask(lo, hi)
    v_int, v_cauchy = _quad_refinement_cauchy(table.values_V[mask], table.radii[mask])
    rep.add("V_locally_integrable", bool(np.all(np.isfinite(table.values_V[mask]))
                                         and v_cauchy), value=v_int)
    with np.errstate(over="ignore"):
        k_pow = table.values_K[mask] ** s_loc
    k_int, k_cauchy = _quad_refinement_cauchy(k_pow, table.radii[mask])
    rep.add("K_locally_s_integrable", bool(np.all(np.isfinite(k_pow)) and k_cauchy),
            value=k_int, detail=f"s = {s_loc}")

    # non-gating diagnostic: weighted integral of V toward the origin
    ks = np.arange(2, int(math.log2(1.0 / r_min)))
    vals = []
    for k in ks:
        m = table.interval_mask(2.0 ** (-int(k)), 1.0)
        with np.errstate(over="ignore"):
            integrand = table.values_V[m] * table.radii[m] ** (N - 1)
        vals.append(float(np.trapezoid(integrand, table.radii[m])))
    cauchy = len(vals) >= 2 and math.isfinite(vals[-1]) \
        and abs(vals[-1] - vals[-2]) <= 1e-8 * (1.0 + abs(vals[-1]))
    rep.add("diagnostic_v_weight_near_origin", bool(cauchy),
            value=vals[-1] if vals else math.nan, gating=False,
            detail="informational: quadrature of V r^(N-1) over (2^-k, 1)")

    return rep
