"""Coherence indices and restricted isometry constants of a dictionary.

``nu_k`` (global 2-coherence) is, for the worst atom, the Euclidean norm of
its ``k`` largest inner products with other atoms; ``nu_1`` is the mutual
coherence. The restricted isometry constant ``delta_k`` is computed exactly
by enumerating every ``k``-column Gram matrix, which is practical only for
small ``d``; beyond the budget the coherence sandwich

    nu_{k-1} <= delta_k <= min(sqrt(k-1) nu_{k-1}, (k-1) M, Gershgorin)

is reported instead.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, Optional

import numpy as np

from .dictionary import Dictionary
from .errors import BudgetExceeded, EigenFailure, OrderOutOfRange

RIC_BUDGET = 200_000
NU_BRUTE_BUDGET = 10_000_000
CHAIN_SLACK = 1e-9
_CHUNK = 8192


def _subset_chunks(d, k, chunk=_CHUNK):
    """Yield all ``k``-subsets of ``range(d)`` as integer arrays of shape
    ``(m, k)``, in lexicographic order."""
    combos = itertools.combinations(range(d), k)
    while True:
        block = list(itertools.islice(combos, chunk))
        if not block:
            return
        yield np.array(block, dtype=np.intp).reshape(len(block), k)


def _batched_gram(gram, idx):
    return gram[idx[:, :, None], idx[:, None, :]]


def mutual_coherence(phi: Dictionary) -> float:
    """Largest ``|<phi_i, phi_j>|`` over distinct atoms."""
    g = np.abs(phi.gram_matrix)
    off = g[~np.eye(phi.d, dtype=bool)]
    return float(np.max(off))


def _squared_offdiag(phi):
    sq = phi.gram_matrix ** 2
    np.fill_diagonal(sq, 0.0)
    return sq


def global_2_coherence(phi: Dictionary, k: int) -> float:
    """``nu_k`` via the top-``k`` squared inner products of each atom.

    Every summand is nonnegative, so the best index set of size at most
    ``k`` for atom ``i`` is its ``k`` strongest neighbours.
    """
    k = int(k)
    if k < 1 or k > phi.d - 1:
        raise OrderOutOfRange(f"k must lie in [1, {phi.d - 1}], got {k}")
    sq = _squared_offdiag(phi)
    top = np.partition(sq, phi.d - k, axis=1)[:, phi.d - k:]
    top = np.sort(top, axis=1)[:, ::-1]
    return float(np.sqrt(np.max(np.sum(top, axis=1))))


def nu_sequence(phi: Dictionary, k_max: Optional[int] = None) -> Dict[int, float]:
    """``{k: nu_k}`` for ``k = 1..k_max`` (default ``d - 1``) in one sort."""
    k_max = phi.d - 1 if k_max is None else int(k_max)
    if k_max < 1 or k_max > phi.d - 1:
        raise OrderOutOfRange(f"k_max must lie in [1, {phi.d - 1}], got {k_max}")
    sq = np.sort(_squared_offdiag(phi), axis=1)[:, ::-1]
    partial = np.cumsum(sq, axis=1)
    return {k: float(np.sqrt(np.max(partial[:, k - 1]))) for k in range(1, k_max + 1)}


def nu_brute_count(d: int, k: int, method: str = "direct") -> int:
    if method == "direct":
        return d * sum(math.comb(d - 1, j) for j in range(1, k + 1))
    return sum(math.comb(d, j) for j in range(2, k + 2))


def global_2_coherence_brute(phi: Dictionary, k: int, method: str = "direct",
                             budget: int = NU_BRUTE_BUDGET) -> float:
    """Exhaustive ``nu_k``, used as an oracle for :func:`global_2_coherence`.

    ``method="direct"`` enumerates every atom ``i`` and every index set
    ``L`` of size ``1..k`` avoiding ``i``. ``method="gram"`` instead takes
    the largest row norm of ``G_L - I`` over every ``L`` of size ``2..k+1``.
    """
    k = int(k)
    d = phi.d
    if k < 1 or k > d - 1:
        raise OrderOutOfRange(f"k must lie in [1, {d - 1}], got {k}")
    if method not in ("direct", "gram"):
        raise ValueError(f"unknown method {method!r}")
    count = nu_brute_count(d, k, method)
    if count > budget:
        raise BudgetExceeded(count, budget)
    gram = phi.gram_matrix
    best = 0.0
    if method == "direct":
        sq = gram ** 2
        for i in range(d):
            others = [j for j in range(d) if j != i]
            row = sq[i, others]
            for size in range(1, k + 1):
                for idx in _subset_chunks(d - 1, size):
                    best = max(best, float(np.max(np.sum(row[idx], axis=1))))
        return math.sqrt(best)
    for size in range(2, k + 2):
        for idx in _subset_chunks(d, size):
            off = _batched_gram(gram, idx) - np.eye(size)
            rows = np.sqrt(np.sum(off ** 2, axis=2))
            best = max(best, float(np.max(rows)))
    return best


def _delta_from_eigs(eigs):
    return np.maximum(eigs[:, -1] - 1.0, 1.0 - eigs[:, 0])


def ric_count(d: int, k: int) -> int:
    return math.comb(d, k)


def ric_exact(phi: Dictionary, k: int, budget: int = RIC_BUDGET,
              return_support: bool = False):
    """Exact ``delta_k``: worst eigenvalue deviation from 1 over all
    ``k``-column Gram matrices.

    Index sets of size exactly ``k`` suffice since eigenvalues of a
    principal submatrix interlace those of the full one. The value is
    returned even when it is ``>= 1``.
    """
    k = int(k)
    if k < 1 or k > phi.d:
        raise OrderOutOfRange(f"k must lie in [1, {phi.d}], got {k}")
    count = ric_count(phi.d, k)
    if count > budget:
        raise BudgetExceeded(count, budget)
    gram = phi.gram_matrix
    best, arg = -1.0, None
    for idx in _subset_chunks(phi.d, k):
        try:
            eigs = np.linalg.eigvalsh(_batched_gram(gram, idx))
        except np.linalg.LinAlgError as exc:
            raise EigenFailure(str(exc)) from exc
        delta = _delta_from_eigs(eigs)
        j = int(np.argmax(delta))
        if delta[j] > best:
            best, arg = float(delta[j]), tuple(int(i) for i in idx[j])
    best = max(best, 0.0)
    return (best, arg) if return_support else best


def ric_gershgorin_upper(phi: Dictionary, k: int, brute: bool = False,
                         budget: int = RIC_BUDGET) -> float:
    """Largest Gershgorin radius ``sum_{j != i} |g_ij|`` over all ``k``-sets.

    The fast path sums the ``k - 1`` largest ``|<phi_i, phi_j>|`` per atom.
    """
    k = int(k)
    if k < 2 or k > phi.d:
        raise OrderOutOfRange(f"k must lie in [2, {phi.d}], got {k}")
    g = np.abs(phi.gram_matrix)
    np.fill_diagonal(g, 0.0)
    if not brute:
        top = np.partition(g, phi.d - (k - 1), axis=1)[:, phi.d - (k - 1):]
        return float(np.max(np.sum(np.sort(top, axis=1)[:, ::-1], axis=1)))
    count = ric_count(phi.d, k)
    if count > budget:
        raise BudgetExceeded(count, budget)
    best = 0.0
    for idx in _subset_chunks(phi.d, k):
        radii = np.sum(_batched_gram(g, idx), axis=2)
        best = max(best, float(np.max(radii)))
    return best


def ric_bounds(phi: Dictionary, k: int):
    """``(lower, upper)`` bounds on ``delta_k`` from the coherence sandwich."""
    k = int(k)
    if k < 1 or k > phi.d:
        raise OrderOutOfRange(f"k must lie in [1, {phi.d}], got {k}")
    if k == 1:
        # unit-norm atoms: every 1x1 Gram matrix is exactly [1]
        return 0.0, 0.0
    m = mutual_coherence(phi)
    nu = global_2_coherence(phi, k - 1)
    upper = min(math.sqrt(k - 1) * nu, (k - 1) * m, ric_gershgorin_upper(phi, k))
    return nu, upper


@dataclass(frozen=True)
class ChainReport:
    """Values of ``M <= nu_{k-1} <= delta_k <= sqrt(k-1) nu_{k-1} <= (k-1) M``."""
    k: int
    M: float
    nu_km1: float
    delta_k: float
    sqrt_bound: float
    M_bound: float
    holds: bool

    @property
    def values(self):
        return (self.M, self.nu_km1, self.delta_k, self.sqrt_bound, self.M_bound)

    def to_dict(self):
        return asdict(self)


def lemma1_chain(phi: Dictionary, k: int, slack: float = CHAIN_SLACK,
                 budget: int = RIC_BUDGET) -> ChainReport:
    k = int(k)
    if k < 2:
        raise OrderOutOfRange(f"the chain needs k >= 2, got {k}")
    m = mutual_coherence(phi)
    nu = global_2_coherence(phi, k - 1)
    delta = ric_exact(phi, k, budget=budget)
    vals = (m, nu, delta, math.sqrt(k - 1) * nu, (k - 1) * m)
    holds = all(a <= b + slack for a, b in zip(vals, vals[1:]))
    return ChainReport(k, *vals, holds=bool(holds))


@dataclass
class CoherenceProfile:
    """All coherence data of one dictionary up to order ``k_max``.

    ``delta_exact`` only holds orders whose enumeration fits the budget.
    """
    M: float
    nu: Dict[int, float]
    delta_exact: Dict[int, float] = field(default_factory=dict)
    delta_lower: Dict[int, float] = field(default_factory=dict)
    delta_upper_nu: Dict[int, float] = field(default_factory=dict)
    delta_upper_M: Dict[int, float] = field(default_factory=dict)
    gershgorin_radius_max: Dict[int, float] = field(default_factory=dict)

    def delta_interval(self, k):
        if k in self.delta_exact:
            return self.delta_exact[k], self.delta_exact[k]
        if k == 1:
            return 0.0, 0.0
        upper = min(self.delta_upper_nu[k], self.delta_upper_M[k],
                    self.gershgorin_radius_max[k])
        return self.delta_lower[k], upper


def coherence_profile(phi: Dictionary, k_max: Optional[int] = None,
                      budget: int = RIC_BUDGET) -> CoherenceProfile:
    k_max = min(phi.d - 1, 6) if k_max is None else int(k_max)
    nu = nu_sequence(phi, min(k_max, phi.d - 1))
    prof = CoherenceProfile(M=mutual_coherence(phi), nu=nu)
    for k in range(1, min(k_max + 1, phi.d) + 1):
        if ric_count(phi.d, k) <= budget:
            prof.delta_exact[k] = ric_exact(phi, k, budget=budget)
        if k >= 2:
            prof.delta_lower[k] = nu[k - 1]
            prof.delta_upper_nu[k] = math.sqrt(k - 1) * nu[k - 1]
            prof.delta_upper_M[k] = (k - 1) * prof.M
            prof.gershgorin_radius_max[k] = ric_gershgorin_upper(phi, k)
    return prof
