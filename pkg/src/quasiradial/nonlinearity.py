"""Model nonlinearities with double-power growth and their primitives.

Two families are provided: the pointwise minimum of two signed powers, and a
rational splice of the two powers.  Both have primitive F with F(0) = 0,
satisfy the superlinearity condition theta * F(t) <= f(t) * t for all t >= 0
(with theta = min(q1, q2), resp. q1), and collapse to the single power
|t|^(q-2) t when q1 = q2 = q.  In solver mode f is extended by zero on t < 0,
which makes nonpositive parts energetically inert and yields nonnegative
minimizers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

MIN_POWERS = "min_powers"
RATIONAL = "rational"
PURE_POWER = "pure_power"

_KINDS = (MIN_POWERS, RATIONAL, PURE_POWER)


@dataclass(frozen=True)
class NonlinearitySpec:
    """Parameters of one model nonlinearity.

    theta defaults to the family's superlinearity exponent; M scales the
    whole nonlinearity and doubles as the growth constant; t0 is the
    positivity witness (F(t0) > 0 whenever M > 0).
    """

    kind: str
    q1: float
    q2: float
    theta: float = None
    M: float = 1.0
    t0: float = 1.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown nonlinearity kind {self.kind!r}")
        if self.q1 <= 1 or self.q2 <= 1:
            raise ValueError("q1 and q2 must exceed 1")
        if self.kind == RATIONAL and self.q1 > self.q2:
            raise ValueError("rational family requires q1 <= q2")
        if self.kind == PURE_POWER and self.q1 != self.q2:
            raise ValueError("pure_power requires q1 == q2")
        if self.theta is None:
            theta = self.q1 if self.kind == RATIONAL else min(self.q1, self.q2)
            object.__setattr__(self, "theta", theta)

    def to_json(self):
        return {"kind": self.kind, "q1": self.q1, "q2": self.q2,
                "theta": self.theta, "M": self.M, "t0": self.t0}

    @staticmethod
    def from_json(obj):
        return NonlinearitySpec(
            kind=obj["kind"], q1=float(obj["q1"]), q2=float(obj["q2"]),
            theta=obj.get("theta"), M=float(obj.get("M", 1.0)),
            t0=float(obj.get("t0", 1.0)))


def pure_power(q, M=1.0):
    return NonlinearitySpec(kind=PURE_POWER, q1=q, q2=q, M=M)


def f_eval(spec: NonlinearitySpec, t, nonneg=False):
    """Evaluate f(t).  With nonneg=True, f is zero on t < 0 (solver mode)."""
    t = np.asarray(t, dtype=float)
    at = np.abs(t)
    if spec.kind == RATIONAL:
        with np.errstate(over="ignore", invalid="ignore"):
            vals = spec.M * at ** (spec.q2 - 1) / (1.0 + at ** (spec.q2 - spec.q1))
        vals = np.where(at == 0, 0.0, vals) * np.sign(t)
    else:
        # min of the signed powers; both equal |t|^(q-1) sign(t)
        v1 = at ** (spec.q1 - 1) * np.sign(t)
        v2 = at ** (spec.q2 - 1) * np.sign(t)
        vals = spec.M * np.minimum(v1, v2)
    if nonneg:
        vals = np.where(t < 0, 0.0, vals)
    if np.ndim(t) == 0:
        return float(vals)
    return vals


def _min_powers_primitive(q1, q2, u):
    """Antiderivative of min(s^(q1-1), s^(q2-1)) on s >= 0, evaluated at u >= 0."""
    q_hi = max(q1, q2)  # active power on (0, 1)
    q_lo = min(q1, q2)  # active power on (1, inf)
    small = u ** q_hi / q_hi
    large = 1.0 / q_hi - 1.0 / q_lo + u ** q_lo / q_lo
    return np.where(u <= 1.0, small, large)


def _max_powers_primitive(q1, q2, u):
    """Antiderivative of max(s^(q1-1), s^(q2-1)) on s >= 0, evaluated at u >= 0."""
    q_lo = min(q1, q2)
    q_hi = max(q1, q2)
    small = u ** q_lo / q_lo
    large = 1.0 / q_lo - 1.0 / q_hi + u ** q_hi / q_hi
    return np.where(u <= 1.0, small, large)


@lru_cache(maxsize=65536)
def _rational_primitive_scalar(q1, q2, u):
    if u == 0.0:
        return 0.0
    val, _ = quad(lambda s: s ** (q2 - 1) / (1.0 + s ** (q2 - q1)),
                  0.0, u, epsrel=1e-10, epsabs=0.0, limit=200)
    return val


def F_eval(spec: NonlinearitySpec, t, nonneg=False):
    """Primitive F(t) = integral of f from 0 to t; F(0) = 0.

    min_powers uses the piecewise closed form; the rational family uses
    cached adaptive quadrature.
    """
    t = np.asarray(t, dtype=float)
    at = np.abs(t)
    if spec.kind == RATIONAL:
        flat = np.round(at.ravel(), decimals=14)
        vals = np.array([_rational_primitive_scalar(spec.q1, spec.q2, float(u))
                         for u in flat]).reshape(at.shape) * spec.M
    else:
        # f is min of powers, so for t < 0 the integrand is -max of powers
        pos = _min_powers_primitive(spec.q1, spec.q2, at)
        neg = _max_powers_primitive(spec.q1, spec.q2, at)
        vals = spec.M * np.where(t >= 0, pos, neg)
    if nonneg:
        vals = np.where(t < 0, 0.0, vals)
    if np.ndim(t) == 0:
        return float(vals)
    return vals


def check_ar(spec: NonlinearitySpec, samples, slack=1e-12) -> bool:
    """Superlinearity check: theta * F(t) <= f(t) * t on the given samples."""
    t = np.asarray(samples, dtype=float)
    lhs = spec.theta * F_eval(spec, t)
    rhs = f_eval(spec, t) * t
    return bool(np.all(lhs <= rhs + slack))


def check_growth(spec: NonlinearitySpec, samples, slack=1e-12) -> bool:
    """Double-power growth: 0 <= f(t) <= M * min(t^(q1-1), t^(q2-1)) on t >= 0."""
    t = np.asarray(samples, dtype=float)
    if np.any(t < 0):
        raise ValueError("growth check expects nonnegative samples")
    f = f_eval(spec, t)
    bound = spec.M * np.minimum(t ** (spec.q1 - 1), t ** (spec.q2 - 1))
    return bool(np.all(f >= -slack) and np.all(f <= bound + slack))
