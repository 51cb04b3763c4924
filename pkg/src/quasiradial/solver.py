"""Discrete variational solver for the radial quasilinear problem.

The energy

    I(u) = (1/p) * [ int A |u'|^p  +  int V |u|^p ] - int K F(u)

is discretized on a log-spaced radial grid: cell-constant derivatives, nodal
values for the zero-order terms, and quadrature weights that integrate the
r^(N-1) surface measure exactly per cell.  A nonnegative nontrivial critical
point is computed by descent on the Nehari-projected energy: a gradient step
preconditioned by the linearized quadratic metric, a positive-part clamp, and
re-projection, with Armijo backtracking.

Boundary conditions: homogeneous Dirichlet at the outer truncation radius,
natural (free) at the inner one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded
from scipy.special import logsumexp

from .exponents import EndpointAsymptotics, ProblemDims, pointwise_decay_exponent
from .nonlinearity import NonlinearitySpec, F_eval, f_eval
from .potentials import PotentialTable


class BadRange(ValueError):
    """Invalid truncation interval or node count."""


class NoProjection(RuntimeError):
    """The ray through u never meets the natural constraint set."""


class NotConverged(RuntimeError):
    """Descent exhausted its iteration budget above tolerance."""


class CollapsedToZero(RuntimeError):
    """The iterate degenerated to the trivial solution."""


class Degenerate(ValueError):
    """The function support is too small for the requested diagnostic."""


def unit_sphere_area(N: int) -> float:
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


@dataclass
class RadialGrid:
    """Log-spaced nodes with exact per-cell integrals of the surface measure.

    quad_weights[i] integrates a nodal-value integrand against
    omega_{N-1} r^(N-1) dr; cell_measure[c] is the same integral over one cell.
    """

    nodes: np.ndarray
    quad_weights: np.ndarray
    dims: ProblemDims
    cell_measure: np.ndarray = None
    dr: np.ndarray = None

    def __post_init__(self):
        r = np.asarray(self.nodes, dtype=float)
        if self.cell_measure is None:
            N = self.dims.N
            omega = unit_sphere_area(N)
            self.cell_measure = omega * np.diff(r ** N) / N
        if self.dr is None:
            self.dr = np.diff(r)

    @property
    def n(self):
        return len(self.nodes)

    def integrate(self, nodal_values):
        """Quadrature of a nodal integrand against the surface measure."""
        return float(np.dot(self.quad_weights, nodal_values))


def build_grid(r_min: float, r_max: float, n_nodes: int, dims: ProblemDims) -> RadialGrid:
    """Log-uniform grid on [r_min, r_max]; weights are exact cell integrals
    of omega_{N-1} r^(N-1) dr split evenly between cell endpoints."""
    if not (0 < r_min < r_max):
        raise BadRange(f"need 0 < r_min < r_max, got {r_min}, {r_max}")
    if n_nodes < 16:
        raise BadRange(f"need at least 16 nodes, got {n_nodes}")
    nodes = np.logspace(math.log10(r_min), math.log10(r_max), n_nodes)
    nodes[0], nodes[-1] = r_min, r_max
    omega = unit_sphere_area(dims.N)
    cell = omega * np.diff(nodes ** dims.N) / dims.N
    w = np.zeros(n_nodes)
    w[:-1] += 0.5 * cell
    w[1:] += 0.5 * cell
    return RadialGrid(nodes=nodes, quad_weights=w, dims=dims)


@dataclass
class RadialFunction:
    """Nodal values on a RadialGrid, zero at the outer truncation node."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if len(v) != self.grid.n:
            raise ValueError("values length does not match the grid")
        if v[-1] != 0.0:
            raise ValueError("outer boundary value must be zero")
        self.values = v


@dataclass
class SolveReport:
    energy: float
    norm_X_p: float
    residual: float
    nehari_gap: float
    iterations: int
    decay_slope_origin: float
    decay_slope_infinity: float
    nu0_bound: float
    nu_inf_bound: float

    def to_dict(self):
        return asdict(self)


def _check_alignment(grid: RadialGrid, table: PotentialTable):
    if len(table.radii) != grid.n or not np.allclose(table.radii, grid.nodes,
                                                     rtol=1e-12, atol=0.0):
        raise ValueError("potential table must be sampled on the grid nodes")


def _a_cell(table: PotentialTable):
    # geometric mean of endpoint values, consistent with the log grid
    return np.exp(0.5 * (table.log_A[:-1] + table.log_A[1:]))


def _grad_energy_parts(u, grid, table, p, eps):
    """A-term energy density phi(u') = (u'^2 + eps^2)^(p/2) - eps^p per cell."""
    du = np.diff(u) / grid.dr
    dens = (du * du + eps * eps) ** (p / 2.0) - eps ** p
    return du, float(np.dot(_a_cell(table) * dens, grid.cell_measure))


def _norm_p(u, grid, table):
    """Unregularized p-th power of the weighted norm."""
    p = grid.dims.p
    du = np.diff(u) / grid.dr
    ea = float(np.dot(_a_cell(table) * np.abs(du) ** p, grid.cell_measure))
    ev = float(np.dot(grid.quad_weights * table.values_V, np.abs(u) ** p))
    return ea + ev


def weighted_norm(u: RadialFunction, table: PotentialTable) -> float:
    """Norm combining the A-weighted gradient term and the V-weighted mass term."""
    _check_alignment(u.grid, table)
    return _norm_p(u.values, u.grid, table) ** (1.0 / u.grid.dims.p)


def _source_integral(u, grid, table, nl):
    return float(np.dot(grid.quad_weights * table.values_K,
                        F_eval(nl, u, nonneg=True)))


def _eps_for(u, grid, scale=1e-10):
    du = np.diff(u) / grid.dr
    m = float(np.max(np.abs(du))) if len(du) else 0.0
    return scale * m


def energy(u: RadialFunction, table: PotentialTable, nl: NonlinearitySpec) -> float:
    """Discrete value of the variational energy at u."""
    _check_alignment(u.grid, table)
    grid, p = u.grid, u.grid.dims.p
    eps = _eps_for(u.values, grid)
    _, ea = _grad_energy_parts(u.values, grid, table, p, eps)
    ev = float(np.dot(grid.quad_weights * table.values_V, np.abs(u.values) ** p))
    return (ea + ev) / p - _source_integral(u.values, grid, table, nl)


def _gradient_array(u, grid, table, nl, eps):
    """Exact gradient of the discrete energy; outer Dirichlet node excluded."""
    p = grid.dims.p
    du = np.diff(u) / grid.dr
    with np.errstate(invalid="ignore", divide="ignore"):
        flux_density = np.where(
            (du == 0.0) & (eps == 0.0), 0.0,
            (du * du + eps * eps) ** ((p - 2.0) / 2.0) * du)
    flux = _a_cell(table) * flux_density * grid.cell_measure / grid.dr
    g = np.zeros_like(u)
    g[:-1] -= flux
    g[1:] += flux
    with np.errstate(invalid="ignore", divide="ignore"):
        zero_order = np.where(u == 0.0, 0.0, np.abs(u) ** (p - 2.0) * u)
    g += grid.quad_weights * table.values_V * zero_order
    g -= grid.quad_weights * table.values_K * f_eval(nl, u, nonneg=True)
    g[-1] = 0.0
    return g



def energy_gradient(u: RadialFunction, table: PotentialTable,
                    nl: NonlinearitySpec) -> RadialFunction:
    """Gradient of the discrete energy with respect to nodal values."""
    _check_alignment(u.grid, table)
    eps = _eps_for(u.values, u.grid)
    g = _gradient_array(u.values, u.grid, table, nl, eps)
    return RadialFunction(u.grid, g)


def _hat_norms(grid, table):
    """Weighted norm of each nodal hat function (outer node excluded)."""
    p = grid.dims.p
    a_cell = _a_cell(table)
    stiff = a_cell * grid.cell_measure / grid.dr ** p
    ea = np.zeros(grid.n)
    ea[:-1] += stiff
    ea[1:] += stiff
    ev = grid.quad_weights * table.values_V
    return (ea + ev) ** (1.0 / p)


def residual_weak_form(u: RadialFunction, table: PotentialTable,
                       nl: NonlinearitySpec) -> float:
    """Largest normalized weak-form defect over the nodal hat-function basis.

    Uses the unregularized p-Laplacian flux.
    """
    _check_alignment(u.grid, table)
    g = _gradient_array(u.values, u.grid, table, nl, eps=0.0)
    norms = _hat_norms(u.grid, table)
    return float(np.max(np.abs(g[:-1]) / norms[:-1]))


def nehari_scale(u: RadialFunction, table: PotentialTable,
                 nl: NonlinearitySpec) -> float:
    """Positive scale t with t^p ||u||^p = int K f(tu) tu (natural-constraint hit).

    Closed form for a single power; bisection otherwise.
    """
    _check_alignment(u.grid, table)
    grid, p = u.grid, u.grid.dims.p
    q_norm = _norm_p(u.values, grid, table)
    if q_norm == 0.0:
        raise NoProjection("u vanishes")
    wk = grid.quad_weights * table.values_K
    if nl.kind == "pure_power" or nl.q1 == nl.q2:
        # t* = (||u||^p / (M int K u_+^q))^(1/(q-p)), computed through logs so
        # astronomically weighted nodes cannot overflow the source integral
        q = nl.q1
        pos = np.maximum(u.values, 0.0)
        if nl.M <= 0.0 or not np.any(pos > 0.0):
            raise NoProjection("source term vanishes on the positive part")
        with np.errstate(divide="ignore"):
            log_terms = np.log(grid.quad_weights) + table.log_K + q * np.log(pos)
        log_s = math.log(nl.M) + float(logsumexp(log_terms[pos > 0.0]))
        return math.exp((math.log(q_norm) - log_s) / (q - p))

    def shifted(t):
        tu = t * u.values
        return float(np.dot(wk, f_eval(nl, tu, nonneg=True) * tu)) / t ** p

    lo = hi = 1.0
    for _ in range(300):
        if shifted(hi) >= q_norm:
            break
        hi *= 2.0
    else:
        raise NoProjection("scaled source never reaches the norm level")
    for _ in range(300):
        if shifted(lo) <= q_norm:
            break
        lo /= 2.0
    else:
        raise NoProjection("scaled source exceeds the norm level at any scale")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if shifted(mid) < q_norm:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * hi:
            break
    return 0.5 * (lo + hi)


def decay_slopes(u: RadialFunction, floor_ratio=1e-12):
    """Log-log slopes of |u| over the innermost and outermost supported decades."""
    r = u.grid.nodes
    v = np.abs(u.values)
    vmax = float(np.max(v))
    if vmax == 0.0:
        raise Degenerate("function is identically zero")
    mask = v > floor_ratio * vmax
    rs, vs = r[mask], v[mask]
    if rs[-1] / rs[0] < 10.0 or len(rs) < 6:
        raise Degenerate("support spans less than one decade")

    def fit(sel):
        if sel.sum() < 3:
            raise Degenerate("too few points in the end decade")
        return float(np.polyfit(np.log(rs[sel]), np.log(vs[sel]), 1)[0])

    slope_origin = fit(rs <= rs[0] * 10.0)
    slope_infinity = fit(rs >= rs[-1] / 10.0)
    return slope_origin, slope_infinity


def initial_bump(grid: RadialGrid) -> np.ndarray:
    """Positive bump centered at r = 1 with unit width in log r.

    Compact support (three widths) keeps the starting energy moderate even
    when V is strongly singular toward an endpoint; descent grows the tails
    back wherever they lower the energy."""
    s = np.log(grid.nodes)
    vals = np.where(np.abs(s) < 3.0, np.exp(-0.5 * s * s), 0.0)
    vals[-1] = 0.0
    return vals


def _solve_preconditioned(g, u, grid, table, eps, eps_u):
    """Solve the tridiagonal linearized-metric system P d = g on the free nodes.

    P is the second derivative of the quadratic part of the energy with the
    p-dependent weights lagged at the current iterate; eps and eps_u keep it
    positive definite for every p.
    """
    p = grid.dims.p
    du = np.diff(u) / grid.dr
    coef = (p - 1.0) * _a_cell(table) * (du * du + eps * eps) ** ((p - 2.0) / 2.0)
    stiff = coef * grid.cell_measure / grid.dr ** 2
    diag_v = (p - 1.0) * grid.quad_weights * table.values_V \
        * (u * u + eps_u * eps_u) ** ((p - 2.0) / 2.0)
    n = grid.n
    diag = diag_v.copy()
    diag[:-1] += stiff
    diag[1:] += stiff
    off = -stiff
    m = n - 1
    # absolute guard against exact-zero rows only: any value tied to the
    # diagonal scale would swamp rows whose own scale sits far below the
    # global maximum when V spans many orders of magnitude
    ab = np.zeros((3, m))
    ab[0, 1:] = off[: m - 1]
    ab[1, :] = diag[:m] + 1e-300
    ab[2, : m - 1] = off[: m - 1]
    d = np.zeros(n)
    d[:m] = solve_banded((1, 1), ab, g[:m])
    return d


def solve_ground_state(table: PotentialTable, nl: NonlinearitySpec,
                       grid: RadialGrid, tol: float = 1e-6,
                       max_iter: int = 20000,
                       asym_origin: Optional[EndpointAsymptotics] = None,
                       asym_infinity: Optional[EndpointAsymptotics] = None,
                       on_iterate=None):
    """Compute a nonnegative nontrivial critical point of the discrete energy.

    Descent on the Nehari-projected energy: preconditioned gradient step,
    positive-part clamp, re-projection, Armijo backtracking (contraction 0.5,
    slope parameter 1e-4).  Raises CollapsedToZero when only the trivial
    critical point is reachable and NotConverged when the iteration budget is
    exhausted above tolerance.
    """
    _check_alignment(grid, table)
    p = grid.dims.p
    u = initial_bump(grid)
    try:
        u = u * nehari_scale(RadialFunction(grid, u), table, nl)
    except NoProjection as exc:
        raise CollapsedToZero(f"initial projection failed: {exc}") from None

    hat_norms = _hat_norms(grid, table)
    i_cur = energy(RadialFunction(grid, u), table, nl)
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        eps = _eps_for(u, grid)
        eps_u = 1e-10 * float(np.max(np.abs(u)))
        g = _gradient_array(u, grid, table, nl, eps)
        # convergence is judged on the unregularized defect reported by
        # residual_weak_form; for p < 2 the two can differ near flat cells
        g0 = _gradient_array(u, grid, table, nl, eps=0.0)
        residual = float(np.max(np.abs(g0[:-1]) / hat_norms[:-1]))
        norm_p = _norm_p(u, grid, table)
        gap = abs(float(np.dot(g0, u))) / norm_p
        if residual <= tol and gap <= tol:
            converged = True
            break
        d = _solve_preconditioned(g, u, grid, table, eps, eps_u)
        slope = float(np.dot(g, d))
        if not math.isfinite(slope) or slope <= 0.0:
            d = g / np.max(hat_norms)  # fall back to a raw gradient step
            slope = float(np.dot(g, d))
        t = 1.0
        accepted = False
        while t > 1e-14:
            trial = np.maximum(u - t * d, 0.0)
            trial[-1] = 0.0
            if not np.any(trial > 0.0):
                t *= 0.5
                continue
            try:
                scale = nehari_scale(RadialFunction(grid, trial), table, nl)
            except NoProjection:
                t *= 0.5
                continue
            if not math.isfinite(scale) or scale <= 0.0:
                t *= 0.5
                continue
            trial *= scale
            i_new = energy(RadialFunction(grid, trial), table, nl)
            if math.isfinite(i_new) and i_new <= i_cur - 1e-4 * t * slope:
                u, i_cur = trial, i_new
                accepted = True
                break
            t *= 0.5
        if accepted and on_iterate is not None:
            on_iterate(iterations, i_cur)
        if not accepted:
            break
        if float(np.max(u)) < 1e-300:
            raise CollapsedToZero("iterate vanished under descent")

    uf = RadialFunction(grid, u)
    residual = residual_weak_form(uf, table, nl)
    norm_p = _norm_p(u, grid, table)
    g0 = _gradient_array(u, grid, table, nl, eps=0.0)
    gap = abs(float(np.dot(g0, u))) / norm_p
    if not converged and not (residual <= tol and gap <= tol):
        raise NotConverged(
            f"residual {residual:.3e}, gap {gap:.3e} after {iterations} iterations")
    try:
        slope0, slope_inf = decay_slopes(uf)
    except Degenerate:
        slope0, slope_inf = math.nan, math.nan
    nu0 = pointwise_decay_exponent(asym_origin.a, asym_origin.gamma, grid.dims) \
        if asym_origin is not None else math.nan
    nu_inf = pointwise_decay_exponent(asym_infinity.a, asym_infinity.gamma, grid.dims) \
        if asym_infinity is not None else math.nan
    report = SolveReport(
        energy=energy(uf, table, nl),
        norm_X_p=norm_p,
        residual=residual,
        nehari_gap=gap,
        iterations=iterations,
        decay_slope_origin=slope0,
        decay_slope_infinity=slope_inf,
        nu0_bound=float(nu0),
        nu_inf_bound=float(nu_inf),
    )
    return uf, report
