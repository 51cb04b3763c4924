"""Finite trial-family probes of the small-ball and far-field suprema.

The probed quantities are suprema over the whole unit ball of the weighted
K-integral over a small ball (origin side) or a ball complement (infinity
side); they are not computable.  The probe evaluates the integral on a family
of normalized cutoff power profiles swept around the pointwise-decay rate, so
every probe value is a certified lower bound, and the per-decade decay of the
curve illustrates (not proves) the compactness criterion.

All amplitudes are handled in log space: profiles normalized against
potentials like e^{1/r} have values far below the floating-point range, while
their probe integrals remain representable.  Profiles whose norm concentrates
in the grid's edge region are truncation artifacts (they approximate no
unit-ball member) and are filtered out of the family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .solver import RadialFunction, RadialGrid
from .potentials import PotentialTable


class TooFewSamples(ValueError):
    """A decay verdict needs at least three probe samples."""


def _log_abs_diff(la, lb):
    """log |e^la - e^lb| computed stably; -inf when the two coincide."""
    hi = np.maximum(la, lb)
    lo = np.minimum(la, lb)
    with np.errstate(invalid="ignore", divide="ignore"):
        gap = np.where(hi == lo, -np.inf, np.log1p(-np.exp(np.minimum(lo - hi, -1e-300))))
        out = hi + gap
    return np.where(np.isneginf(hi), -np.inf, out)


def _log_norm_p(log_u, grid: RadialGrid, table: PotentialTable):
    """log of ||u||^p for a profile given by nodal log-values."""
    p = grid.dims.p
    log_du = _log_abs_diff(log_u[1:], log_u[:-1]) - np.log(grid.dr)
    log_a_cell = 0.5 * (table.log_A[:-1] + table.log_A[1:])
    grad_terms = log_a_cell + p * log_du + np.log(grid.cell_measure)
    with np.errstate(divide="ignore"):
        log_w = np.log(grid.quad_weights)
    mass_terms = log_w + table.log_V + p * log_u
    return float(logsumexp(np.concatenate([grad_terms, mass_terms])))


@dataclass
class TrialFamily:
    """Normalized cutoff power profiles stored as nodal log-values."""

    grid: RadialGrid
    table: PotentialTable
    log_profiles: list = field(default_factory=list)
    nus: list = field(default_factory=list)
    cuts: list = field(default_factory=list)

    def __len__(self):
        return len(self.log_profiles)

    def as_radial_functions(self):
        """Linear-space views; values below the float range underflow to 0."""
        out = []
        for lp in self.log_profiles:
            with np.errstate(over="ignore"):
                vals = np.exp(lp)
            vals[-1] = 0.0
            out.append(RadialFunction(self.grid, vals))
        return out

    def norm_defects(self):
        """|log ||u||^p| per profile; all ~0 since profiles are normalized."""
        return [abs(_log_norm_p(lp, self.grid, self.table)) for lp in self.log_profiles]


def _raw_log_profile(grid, nu, cut_lo, cut_hi):
    """log of min(1, r^-nu) ramped in above cut_lo and tapered to 0 at cut_hi.

    The outer taper spans half a decade so the profile reaches zero smoothly;
    a one-node drop at the Dirichlet boundary would put an artificial gradient
    spike into the norm.
    """
    log_r = np.log(grid.nodes)
    shape = np.minimum(0.0, -nu * log_r)
    chi = np.clip((log_r - math.log(cut_lo)) / math.log(2.0), 0.0, 1.0)
    if cut_hi is not None:
        half_decade = 0.5 * math.log(10.0)
        chi = np.minimum(
            chi, np.clip((math.log(cut_hi) - log_r) / half_decade, 0.0, 1.0))
    with np.errstate(divide="ignore"):
        log_chi = np.log(chi)
    vals = shape + log_chi
    vals[-1] = -np.inf
    return vals


def _edge_fraction(log_u, grid, table, end):
    """Fraction of ||u||^p carried by the nodes where truncation bites.

    Origin side: the first half-decade (cut profiles vanish there, so only
    profiles genuinely reaching the edge register).  Infinity side: the last
    full decade, since the outer taper itself occupies the final half-decade.
    """
    p = grid.dims.p
    r = grid.nodes
    if end == "origin":
        node_mask = r <= r[0] * math.sqrt(10.0)
    else:
        node_mask = r >= r[-1] / 10.0
    cell_mask = node_mask[:-1] | node_mask[1:]
    log_du = _log_abs_diff(log_u[1:], log_u[:-1]) - np.log(grid.dr)
    log_a_cell = 0.5 * (table.log_A[:-1] + table.log_A[1:])
    grad_terms = log_a_cell + p * log_du + np.log(grid.cell_measure)
    with np.errstate(divide="ignore"):
        log_w = np.log(grid.quad_weights)
    mass_terms = log_w + table.log_V + p * log_u
    total = logsumexp(np.concatenate([grad_terms, mass_terms]))
    pieces = np.concatenate([grad_terms[cell_mask], mass_terms[node_mask]])
    if not len(pieces) or total == -np.inf:
        return 0.0
    return float(np.exp(logsumexp(pieces) - total))


def make_trial_family(grid: RadialGrid, table: PotentialTable, nu_center: float,
                      end: str, n_exponents: int = 16, n_cuts: int = 12,
                      edge_fraction_max: float = 0.25) -> TrialFamily:
    """Build normalized profiles with decay rates swept around nu_center.

    Exponents sweep [0.5, 1.5] * nu_center (a symmetric band when the center
    is close to zero).  Origin families also sweep the inner cut radius so the
    small balls being probed contain profile mass; infinity families use a
    fixed moderate inner cut and reach to the outer truncation.
    """
    if abs(nu_center) > 1e-9:
        nus = np.linspace(0.5 * nu_center, 1.5 * nu_center, n_exponents)
    else:
        nus = np.linspace(-0.5, 0.5, n_exponents)
    r_min, r_max = grid.nodes[0], grid.nodes[-1]
    if end == "origin":
        # inner cuts start clear of the edge half-decade the artifact filter
        # watches, and sweep up so every probed ball contains profile mass
        cuts = np.logspace(math.log10(5.0 * r_min), math.log10(min(0.3, r_max / 10)),
                           n_cuts)
        cut_hi = min(5.0, r_max / 4.0)
        combos = [(nu, cut, cut_hi) for nu in nus for cut in cuts]
    elif end == "infinity":
        cut = min(0.3, r_max / 100.0)
        combos = [(nu, cut, r_max) for nu in nus]
        cuts = np.array([cut])
    else:
        raise ValueError(f"unknown end {end!r}")
    family = TrialFamily(grid=grid, table=table)
    for nu, cut_lo, cut_hi in combos:
        raw = _raw_log_profile(grid, nu, cut_lo, cut_hi)
        log_np = _log_norm_p(raw, grid, table)
        if not math.isfinite(log_np):
            continue
        normalized = raw - log_np / grid.dims.p
        if _edge_fraction(normalized, grid, table, end) > edge_fraction_max:
            continue
        family.log_profiles.append(normalized)
        family.nus.append(float(nu))
        family.cuts.append(float(cut_lo))
    return family


@dataclass
class ProbeCurve:
    """Lower-bound probe values of one supremum at several radii."""

    q: float
    end: str
    samples: list          # list of (R, value)
    log_values: list       # matching log values, safe against underflow

    def to_rows(self):
        return [(R, v) for R, v in self.samples]


def _probe(table, q, R_list, family, end):
    grid = family.grid
    with np.errstate(divide="ignore"):
        log_w = np.log(grid.quad_weights)
    base = log_w + table.log_K
    samples, logs = [], []
    for R in R_list:
        mask = grid.nodes <= R if end == "origin" else grid.nodes >= R
        best = -math.inf
        for lp in family.log_profiles:
            terms = base[mask] + q * lp[mask]
            if len(terms):
                best = max(best, float(logsumexp(terms)))
        with np.errstate(over="ignore"):
            samples.append((float(R), float(np.exp(best))))
        logs.append(best)
    return ProbeCurve(q=float(q), end=end, samples=samples, log_values=logs)


def probe_origin(table: PotentialTable, q: float, R_list, family: TrialFamily) -> ProbeCurve:
    """Family maximum of the K-weighted q-integral over balls of radius R.

    Nondecreasing in R by integral monotonicity on the fixed family.
    """
    if q <= 1:
        raise ValueError("probe exponent must exceed 1")
    return _probe(table, q, sorted(R_list), family, "origin")


def probe_infinity(table: PotentialTable, q: float, R_list, family: TrialFamily) -> ProbeCurve:
    """Family maximum of the K-weighted q-integral over ball complements.

    Nonincreasing in R on the fixed family.
    """
    if q <= 1:
        raise ValueError("probe exponent must exceed 1")
    return _probe(table, q, sorted(R_list), family, "infinity")


def decay_verdict(curve: ProbeCurve, threshold: float = 0.9) -> str:
    """'decays' when every successive per-decade ratio toward the limit is
    below the threshold, else 'stalls'."""
    if len(curve.samples) < 3:
        raise TooFewSamples("need at least three samples for a verdict")
    rs = [s[0] for s in curve.samples]
    logs = list(curve.log_values)
    if curve.end == "origin":
        rs, logs = rs[::-1], logs[::-1]  # march toward the origin
    for (r1, l1), (r2, l2) in zip(zip(rs, logs), zip(rs[1:], logs[1:])):
        decades = abs(math.log10(r2 / r1))
        if decades == 0:
            continue
        if l1 == -math.inf and l2 == -math.inf:
            continue  # both below the floor: already decayed
        if l1 == -math.inf:
            return "stalls"
        per_decade = math.exp((l2 - l1) / decades)
        if not per_decade < threshold:
            return "stalls"
    return "decays"
