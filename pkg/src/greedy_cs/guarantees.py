"""Sufficient conditions for greedy recovery, evaluated on concrete instances.

Each check returns a :class:`GuaranteeReport` holding the two sides of the
deciding strict inequality and the metric values it used. When a restricted
isometry constant is too expensive to enumerate, its coherence upper bound
is substituted and the report is flagged ``conservative``: a conservative
"satisfied" is still a valid certificate, a conservative "not satisfied"
proves nothing.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from .coherence import (RIC_BUDGET, global_2_coherence, mutual_coherence,
                        ric_bounds, ric_count, ric_exact)
from .dictionary import (Dictionary, SparseVector, least_squares,
                         smallest_singular_value)
from .errors import (DegenerateDelta, DimensionMismatch, HypothesisViolated,
                     NotApplicable, OrderOutOfRange)
from .pursuit import RecoveryResult

BORDERLINE_TOL = 1e-12
LEMMA2_SLACK = 1e-10
ORTHO_TOL = 1e-10
ERROR_BOUND_SLACK = 1e-12


class Outcome(str, enum.Enum):
    EXACT_SUPPORT_RECOVERY = "ExactSupportRecovery"
    NO_GUARANTEE = "NoGuarantee"


@dataclass(frozen=True)
class MetricValue:
    value: float
    mode: str = "exact"  # exact | upper | lower

    def to_dict(self):
        return {"value": float(self.value), "mode": self.mode}


@dataclass
class GuaranteeReport:
    condition: str
    k: int
    rho: Optional[float]
    epsilon: Optional[float]
    lhs: float
    rhs: float
    satisfied: bool
    metrics: Dict[str, MetricValue] = field(default_factory=dict)
    a_min: Optional[float] = None
    a_norm: Optional[float] = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def conservative(self) -> bool:
        return any(m.mode != "exact" for m in self.metrics.values())

    @property
    def borderline(self) -> bool:
        return abs(self.lhs - self.rhs) <= BORDERLINE_TOL

    @property
    def predicted_outcome(self) -> Outcome:
        return Outcome.EXACT_SUPPORT_RECOVERY if self.satisfied else Outcome.NO_GUARANTEE

    @property
    def outcome(self) -> str:
        """``satisfied``, ``not_satisfied`` or ``inconclusive``."""
        if self.satisfied:
            return "satisfied"
        return "inconclusive" if self.conservative else "not_satisfied"

    def to_dict(self):
        return {
            "condition": self.condition,
            "k": int(self.k),
            "rho": self.rho,
            "epsilon": self.epsilon,
            "lhs": float(self.lhs),
            "rhs": float(self.rhs),
            "satisfied": bool(self.satisfied),
            "conservative": self.conservative,
            "borderline": self.borderline,
            "predicted_outcome": self.predicted_outcome.value,
            "outcome": self.outcome,
            "a_min": self.a_min,
            "a_norm": self.a_norm,
            "metrics": {k: v.to_dict() for k, v in self.metrics.items()},
            "diagnostics": _jsonable(self.diagnostics),
        }


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def delta_metric(phi: Dictionary, k: int, budget: int = RIC_BUDGET,
                 require_exact: bool = False) -> MetricValue:
    """``delta_k`` exactly if affordable, else its coherence upper bound."""
    if require_exact or ric_count(phi.d, k) <= budget:
        return MetricValue(ric_exact(phi, k, budget=budget), "exact")
    return MetricValue(ric_bounds(phi, k)[1], "upper")


def _nu(phi, k):
    # nu_0 is a maximum over empty sets
    return 0.0 if k == 0 else global_2_coherence(phi, k)


# ---------------------------------------------------------------- Lemma 2

@dataclass
class Lemma2Bounds:
    off_support_max: float
    on_support_max: float
    upper: float
    lower: float
    m: int
    k: int
    epsilon: float
    nu_k: float
    delta_k: float

    @property
    def upper_holds(self) -> bool:
        return self.off_support_max <= self.upper + LEMMA2_SLACK

    @property
    def lower_holds(self) -> bool:
        return self.on_support_max >= self.lower - LEMMA2_SLACK

    @property
    def holds(self) -> bool:
        return self.upper_holds and self.lower_holds


def lemma2_bounds(phi: Dictionary, a, w=None, omega: Optional[Sequence[int]] = None,
                  *, support: Optional[Sequence[int]] = None,
                  epsilon: Optional[float] = None, nu_k: Optional[float] = None,
                  delta_k: Optional[float] = None,
                  budget: int = RIC_BUDGET) -> Lemma2Bounds:
    """Correlation bounds for ``f = Phi a + w`` with ``supp(a) = support``.

    ``a`` is a :class:`SparseVector` or a dense length-``d`` array; for a
    dense array ``support`` defaults to its nonzeros. Atoms of the support
    outside ``omega`` (default: the whole support) must be orthogonal to
    ``Phi a``. ``epsilon`` defaults to ``||w||``.
    """
    if isinstance(a, SparseVector):
        a_dense = a.to_dense()
        support = a.support if support is None else support
    else:
        a_dense = np.asarray(a, dtype=float).ravel()
        if support is None:
            support = np.flatnonzero(a_dense)
    if a_dense.size != phi.d:
        raise DimensionMismatch(f"signal has dim {a_dense.size}, expected {phi.d}")
    support = sorted(int(i) for i in support)
    k = len(support)
    omega = support if omega is None else sorted(int(i) for i in omega)
    if not set(omega) <= set(support):
        raise ValueError("omega must be a subset of the support")
    w = np.zeros(phi.n) if w is None else np.asarray(w, dtype=float).ravel()
    if w.size != phi.n:
        raise DimensionMismatch(f"noise has length {w.size}, expected {phi.n}")
    eps = float(np.linalg.norm(w)) if epsilon is None else float(epsilon)

    clean = phi.sub(support) @ a_dense[support]
    clean_norm = float(np.linalg.norm(clean))
    c_clean = phi.matrix.T @ clean
    tol = ORTHO_TOL * max(1.0, clean_norm)
    for i in sorted(set(support) - set(omega)):
        if abs(c_clean[i]) > tol:
            raise HypothesisViolated(i, float(c_clean[i]))

    if nu_k is None:
        nu_k = global_2_coherence(phi, k)
    if delta_k is None:
        delta_k = ric_exact(phi, k, budget=budget)
    c = np.abs(phi.matrix.T @ (clean + w))
    off = np.ones(phi.d, dtype=bool)
    off[support] = False
    off_max = float(np.max(c[off])) if off.any() else 0.0
    on_max = float(np.max(c[support])) if support else 0.0
    m = len(omega)
    upper = nu_k * float(np.linalg.norm(a_dense[support])) + eps
    if m:
        lower = math.sqrt(max(0.0, 1.0 - delta_k)) / math.sqrt(m) * clean_norm - eps
    else:
        lower = -eps
    return Lemma2Bounds(off_max, on_max, upper, lower, m, k, eps, float(nu_k),
                        float(delta_k))


@dataclass
class ProjectedIterate:
    """Split ``r_s = Phi a_s + w_s`` of a WOMP residual.

    ``a_s`` agrees with ``a`` off the selected atoms and
    ``Phi a_s = (I - P_s) Phi a``, ``w_s = (I - P_s) w``.
    """
    s: int
    selected: tuple
    a_s: np.ndarray
    w_s: np.ndarray
    gap: float  # ||r_s - Phi a_s - w_s||


def projected_iterates(phi: Dictionary, a: SparseVector, w, result: RecoveryResult):
    """Decompose every recorded residual of ``result``.

    Only iterations whose selected atoms all lie in ``supp(a)`` are
    returned, since only those fit the two-part split.
    """
    if not result.residuals:
        raise ValueError("result was produced with record=False")
    w = np.zeros(phi.n) if w is None else np.asarray(w, dtype=float).ravel()
    a_dense = a.to_dense()
    clean = phi.sub(a.support) @ a.values
    out = []
    for s, r in enumerate(result.residuals):
        sel = tuple(result.support_trajectory[:s])
        if not set(sel) <= set(a.support):
            break
        a_s = a_dense.copy()
        if sel:
            z, clean_s = least_squares(phi, sel, clean)
            _, w_s = least_squares(phi, sel, w)
            a_s[list(sel)] -= z
        else:
            clean_s, w_s = clean, w.copy()
        gap = float(np.linalg.norm(r - clean_s - w_s))
        out.append(ProjectedIterate(s, sel, a_s, w_s, gap))
    return out


# -------------------------------------------------------------- Theorem 1

def _strict(lhs, rhs):
    return bool(lhs < rhs)


def theorem1_check(phi: Dictionary, a: SparseVector, rho: float, epsilon: float,
                   budget: int = RIC_BUDGET) -> GuaranteeReport:
    """Both WOMP conditions: ``sqrt(k) nu_k < rho (1 - delta_k)`` and
    ``epsilon < (rho (1 - delta_k) - sqrt(k) nu_k) / (1 + rho) |a_min|``.

    The reported ``lhs``/``rhs`` belong to the first condition if it fails,
    otherwise to the noise condition.
    """
    k = a.k
    if a.dim != phi.d:
        raise DimensionMismatch(f"signal has dim {a.dim}, expected {phi.d}")
    if not 0.0 < rho <= 1.0:
        raise ValueError(f"rho must lie in (0, 1], got {rho!r}")
    if k < 1 or k > phi.d - 1:
        raise OrderOutOfRange(f"sparsity must lie in [1, {phi.d - 1}], got {k}")
    nu = global_2_coherence(phi, k)
    delta = delta_metric(phi, k, budget)
    sk_nu = math.sqrt(k) * nu
    margin = rho * (1.0 - delta.value)
    threshold = (margin - sk_nu) / (1.0 + rho) * a.a_min
    cond1 = _strict(sk_nu, margin)
    cond2 = _strict(epsilon, threshold)

    sigma_min = smallest_singular_value(phi, a.support)
    one_minus = 1.0 - delta.value
    sqrt_one_minus = math.sqrt(max(0.0, one_minus))
    diagnostics = {
        "condition1": {"lhs": sk_nu, "rhs": margin, "satisfied": cond1},
        "condition2": {"lhs": float(epsilon), "rhs": threshold, "satisfied": cond2},
        "noise_threshold": threshold,
        "sigma_min": sigma_min,
        "sqrt_one_minus_delta": sqrt_one_minus,
        "one_minus_delta": one_minus,
        "sigma_min_check": bool(sigma_min >= sqrt_one_minus - BORDERLINE_TOL),
    }
    if cond1:
        lhs, rhs = float(epsilon), threshold
    else:
        lhs, rhs = sk_nu, margin
    return GuaranteeReport(
        condition="theorem1", k=k, rho=float(rho), epsilon=float(epsilon),
        lhs=lhs, rhs=rhs, satisfied=cond1 and cond2,
        metrics={"nu_k": MetricValue(nu), "delta_k": delta},
        a_min=a.a_min, a_norm=a.norm, diagnostics=diagnostics)


def theorem1_condition(phi: Dictionary, k: int, rho: float,
                       budget: int = RIC_BUDGET) -> GuaranteeReport:
    """Signal-independent part ``sqrt(k) nu_k < rho (1 - delta_k)``."""
    nu = global_2_coherence(phi, k)
    delta = delta_metric(phi, k, budget)
    lhs, rhs = math.sqrt(k) * nu, rho * (1.0 - delta.value)
    return GuaranteeReport(
        condition="theorem1_condition", k=int(k), rho=float(rho), epsilon=None,
        lhs=lhs, rhs=rhs, satisfied=_strict(lhs, rhs),
        metrics={"nu_k": MetricValue(nu), "delta_k": delta})


@dataclass
class ErrorBoundReport:
    lhs: float
    rhs: float
    holds: bool
    delta_k: float

    @property
    def ratio(self) -> Optional[float]:
        if self.rhs > 0:
            return self.lhs / self.rhs
        return None

    def to_dict(self):
        return {"lhs": self.lhs, "rhs": self.rhs, "holds": self.holds,
                "delta_k": self.delta_k}


def error_bound_check(phi: Dictionary, a: SparseVector, result: RecoveryResult,
                      epsilon: float, delta_k: Optional[float] = None,
                      budget: int = RIC_BUDGET) -> ErrorBoundReport:
    """``||a_hat - a||^2 <= epsilon^2 / (1 - delta_k)`` for a run that found
    the right support."""
    if tuple(sorted(result.support_trajectory)) != tuple(a.support):
        raise NotApplicable("recovered support differs from supp(a)")
    if delta_k is None:
        delta_k = ric_exact(phi, a.k, budget=budget)
    if delta_k >= 1.0:
        raise DegenerateDelta(f"delta_k = {delta_k!r} >= 1")
    lhs = float(np.sum((result.estimate - a.to_dense()) ** 2))
    rhs = float(epsilon) ** 2 / (1.0 - delta_k)
    return ErrorBoundReport(lhs, rhs, bool(lhs <= rhs + ERROR_BOUND_SLACK), float(delta_k))


# ------------------------------------------------------------ Corollaries

def corollary1_check(phi: Dictionary, k: int, rho: float,
                     budget: int = RIC_BUDGET):
    """Reports for the three coherence/RIC conditions, in order (a), (b), (c):

    (a) ``sqrt(k) delta_{k+1} < rho (1 - delta_k)``
    (b) ``sqrt(k) nu_k < rho (1 - sqrt(k-1) nu_{k-1})``
    (c) ``k M < rho (1 - (k-1) M)``
    """
    k = int(k)
    if k < 1 or k + 1 > phi.d:
        raise OrderOutOfRange(f"need 1 <= k <= d - 1, got k={k}")
    rho = float(rho)
    d_k = delta_metric(phi, k, budget)
    d_k1 = delta_metric(phi, k + 1, budget)
    nu_k = global_2_coherence(phi, k)
    nu_km1 = _nu(phi, k - 1)
    m = mutual_coherence(phi)
    sk = math.sqrt(k)

    lhs_a, rhs_a = sk * d_k1.value, rho * (1.0 - d_k.value)
    lhs_b, rhs_b = sk * nu_k, rho * (1.0 - nu_km1 * math.sqrt(k - 1))
    lhs_c, rhs_c = k * m, rho * (1.0 - (k - 1) * m)
    return (
        GuaranteeReport("corollary1a", k, rho, 0.0, lhs_a, rhs_a, _strict(lhs_a, rhs_a),
                        metrics={"delta_k": d_k, "delta_k1": d_k1}),
        GuaranteeReport("corollary1b", k, rho, 0.0, lhs_b, rhs_b, _strict(lhs_b, rhs_b),
                        metrics={"nu_k": MetricValue(nu_k), "nu_km1": MetricValue(nu_km1)}),
        GuaranteeReport("corollary1c", k, rho, 0.0, lhs_c, rhs_c, _strict(lhs_c, rhs_c),
                        metrics={"M": MetricValue(m)}),
    )


def corollary2_check(phi: Dictionary, k: int, budget: int = RIC_BUDGET) -> GuaranteeReport:
    """OMP condition ``delta_k + sqrt(k) delta_{k+1} < 1`` with exact deltas."""
    k = int(k)
    if k < 1 or k + 1 > phi.d:
        raise OrderOutOfRange(f"need 1 <= k <= d - 1, got k={k}")
    d_k = ric_exact(phi, k, budget=budget)
    d_k1 = ric_exact(phi, k + 1, budget=budget)
    lhs = d_k + math.sqrt(k) * d_k1
    return GuaranteeReport("corollary2", k, 1.0, 0.0, lhs, 1.0, _strict(lhs, 1.0),
                           metrics={"delta_k": MetricValue(d_k),
                                    "delta_k1": MetricValue(d_k1)})


@dataclass(frozen=True)
class PriorBoundComparison:
    k: int
    delta_k: float
    delta_k1: float
    new: bool
    prior: bool

    @property
    def separation(self) -> bool:
        return self.new and not self.prior

    def to_dict(self):
        return {"k": self.k, "delta_k": self.delta_k, "delta_k1": self.delta_k1,
                "new": self.new, "prior": self.prior, "separation": self.separation,
                "new_lhs": self.delta_k + math.sqrt(self.k) * self.delta_k1,
                "prior_threshold": 1.0 / (1.0 + math.sqrt(self.k))}


def compare_deltas(k: int, delta_k: float, delta_k1: float) -> PriorBoundComparison:
    new = delta_k + math.sqrt(k) * delta_k1 < 1.0
    prior = delta_k1 * (1.0 + math.sqrt(k)) < 1.0
    return PriorBoundComparison(int(k), float(delta_k), float(delta_k1),
                                bool(new), bool(prior))


def compare_with_prior_bound(phi: Dictionary, k: int,
                             budget: int = RIC_BUDGET) -> PriorBoundComparison:
    """Compare ``delta_k + sqrt(k) delta_{k+1} < 1`` with the older
    ``delta_{k+1} < 1 / (1 + sqrt(k))``."""
    k = int(k)
    if k < 1 or k + 1 > phi.d:
        raise OrderOutOfRange(f"need 1 <= k <= d - 1, got k={k}")
    return compare_deltas(k, ric_exact(phi, k, budget=budget),
                          ric_exact(phi, k + 1, budget=budget))
