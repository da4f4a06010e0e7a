"""Weak orthogonal matching pursuit (WOMP) and OMP.

At every step WOMP may take any unselected atom whose correlation with the
residual is at least ``rho`` times the largest one; the least-squares fit
on the enlarged support then gives the new residual. ``rho = 1`` with the
``MAX_CORRELATION`` policy is ordinary OMP.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .dictionary import (Dictionary, Observation, correlations,
                         least_squares)
from .errors import DimensionMismatch, RankDeficient

# relative floor on the stopping test, keeps eps = 0 runs finite under round-off
RESIDUAL_FLOOR = 1e-12
# correlations within this relative distance of a threshold count as equal
TIE_RTOL = 1e-12


class SelectionPolicy(str, enum.Enum):
    MAX_CORRELATION = "max"
    FIRST_ABOVE_THRESHOLD = "first"
    MIN_ABOVE_THRESHOLD = "min"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        aliases = {"maxcorrelation": "max", "firstabovethreshold": "first",
                   "minabovethreshold": "min"}
        key = str(value).strip().lower().replace("_", "").replace("-", "")
        return cls(aliases.get(key, key))


class StopReason(str, enum.Enum):
    RESIDUAL_BELOW_EPSILON = "ResidualBelowEpsilon"
    MAX_ITERATIONS = "MaxIterations"
    RANK_DEFICIENT = "RankDeficient"


@dataclass(frozen=True)
class PursuitConfig:
    rho: float = 1.0
    epsilon: float = 0.0
    max_iterations: Optional[int] = None
    selection_policy: SelectionPolicy = SelectionPolicy.MAX_CORRELATION

    def __post_init__(self):
        if not 0.0 < self.rho <= 1.0:
            raise ValueError(f"rho must lie in (0, 1], got {self.rho!r}")
        if not self.epsilon >= 0.0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon!r}")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ValueError("max_iterations must be a positive integer")
        object.__setattr__(self, "selection_policy",
                           SelectionPolicy.parse(self.selection_policy))


@dataclass
class RecoveryResult:
    support_trajectory: List[int]
    estimate: np.ndarray
    residual_norms: List[float]
    iterations: int
    stop_reason: StopReason
    residual_floor: float = 0.0
    # residual vectors r_0..r_S and coefficient vectors x_1..x_S
    residuals: List[np.ndarray] = field(default_factory=list, repr=False)
    coefficients: List[np.ndarray] = field(default_factory=list, repr=False)

    @property
    def support(self):
        return tuple(sorted(self.support_trajectory))

    def to_dict(self):
        """JSON-ready form; atom indices are 1-based."""
        return {
            "support_trajectory": [int(i) + 1 for i in self.support_trajectory],
            "estimate": [float(v) for v in self.estimate],
            "residual_norms": [float(v) for v in self.residual_norms],
            "iterations": int(self.iterations),
            "stop_reason": self.stop_reason.value,
            "residual_floor": float(self.residual_floor),
        }


def _select(c, selected, rho, policy):
    mags = np.abs(c)
    mask = np.ones(c.size, dtype=bool)
    mask[list(selected)] = False
    candidates = np.flatnonzero(mask)
    top = np.max(mags[candidates])
    if policy is SelectionPolicy.MAX_CORRELATION:
        threshold = top
    else:
        threshold = rho * top
    admissible = candidates[mags[candidates] >= threshold * (1.0 - TIE_RTOL)]
    assert admissible.size, "empty admissible set"
    if policy is SelectionPolicy.MIN_ABOVE_THRESHOLD:
        # weakest admissible atom; lowest index among equals
        return int(admissible[np.argmin(mags[admissible])])
    return int(admissible[0])


def womp(phi: Dictionary, obs, config: Optional[PursuitConfig] = None,
         record: bool = True) -> RecoveryResult:
    """Run WOMP on ``obs`` (an :class:`Observation` or a plain vector).

    The loop runs while ``||r_s|| > max(epsilon, 1e-12 ||f||)`` and fewer
    than ``max_iterations`` (default ``min(n, d)``) atoms are selected.

    ``MAX_CORRELATION`` takes the strongest atom whatever ``rho`` is,
    ``FIRST_ABOVE_THRESHOLD`` the lowest-indexed admissible atom and
    ``MIN_ABOVE_THRESHOLD`` the weakest admissible one. Ties go to the
    lowest index.
    """
    config = config or PursuitConfig()
    if not isinstance(obs, Observation):
        obs = Observation(np.asarray(obs, dtype=float), config.epsilon)
    f = obs.f
    if f.size != phi.n:
        raise DimensionMismatch(f"observation has length {f.size}, expected {phi.n}")
    max_iter = config.max_iterations or min(phi.n, phi.d)
    max_iter = min(max_iter, phi.d)
    f_norm = float(np.linalg.norm(f))
    floor = RESIDUAL_FLOOR * f_norm
    stop_level = max(config.epsilon, floor)

    support: List[int] = []
    x = np.zeros(0)
    r = f.copy()
    norms = [f_norm]
    residuals = [r.copy()] if record else []
    coefs = []
    reason = StopReason.RESIDUAL_BELOW_EPSILON
    while norms[-1] > stop_level:
        if len(support) >= max_iter:
            reason = StopReason.MAX_ITERATIONS
            break
        c = correlations(phi, r)
        i = _select(c, support, config.rho, config.selection_policy)
        try:
            x_new, r_new = least_squares(phi, support + [i], f)
        except RankDeficient:
            reason = StopReason.RANK_DEFICIENT
            break
        support.append(i)
        x, r = x_new, r_new
        norms.append(float(np.linalg.norm(r)))
        if record:
            residuals.append(r.copy())
            coefs.append(x.copy())

    estimate = np.zeros(phi.d)
    estimate[support] = x
    return RecoveryResult(
        support_trajectory=support,
        estimate=estimate,
        residual_norms=norms,
        iterations=len(support),
        stop_reason=reason,
        residual_floor=floor,
        residuals=residuals,
        coefficients=coefs,
    )


def omp(phi: Dictionary, obs, epsilon: Optional[float] = None,
        max_iterations: Optional[int] = None, record: bool = True) -> RecoveryResult:
    """Orthogonal matching pursuit, i.e. WOMP with ``rho = 1``.

    ``epsilon`` defaults to the observation's declared noise level.
    """
    if epsilon is None:
        epsilon = obs.epsilon if isinstance(obs, Observation) else 0.0
    cfg = PursuitConfig(rho=1.0, epsilon=float(epsilon), max_iterations=max_iterations,
                        selection_policy=SelectionPolicy.MAX_CORRELATION)
    return womp(phi, obs, cfg, record=record)
