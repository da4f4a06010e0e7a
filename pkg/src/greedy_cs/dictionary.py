"""Dictionaries with unit-norm atoms, sparse coefficient vectors and the
small dense linear algebra the pursuit and metric code is built on.

Atom indices are 0-based throughout the Python API. Serialized output
(JSON, CSV, command line) uses 1-based indices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .errors import (DimensionMismatch, InvalidSparseVector, NonFinite,
                     NormViolation, RankDeficient, ZeroColumn)

NORM_TOL = 1e-12
ZERO_COLUMN_TOL = 1e-14
RANK_TOL = 1e-10


def _column_norms(x):
    # plain reduction instead of BLAS nrm2 so results are reproducible
    return np.sqrt(np.sum(x * x, axis=0))


def _readonly(x):
    x = np.array(x, dtype=float, copy=True)
    x.setflags(write=False)
    return x


class Dictionary:
    """An ``n x d`` real matrix whose columns (atoms) have unit norm.

    Construction validates the matrix and never rescales it; use
    :func:`normalize_columns` to build one from raw data.
    """

    def __init__(self, matrix, tol: float = NORM_TOL):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2:
            raise DimensionMismatch(f"expected a 2-D matrix, got shape {matrix.shape}")
        n, d = matrix.shape
        if n < 1 or d < 2:
            raise DimensionMismatch(f"need n >= 1 and d >= 2, got {n}x{d}")
        if not np.all(np.isfinite(matrix)):
            raise NonFinite("dictionary contains NaN or Inf entries")
        norms = _column_norms(matrix)
        bad = np.flatnonzero(np.abs(norms - 1.0) > tol)
        if bad.size:
            raise NormViolation(int(bad[0]), float(norms[bad[0]]))
        self._matrix = _readonly(matrix)
        self._gram = None

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def n(self) -> int:
        return self._matrix.shape[0]

    @property
    def d(self) -> int:
        return self._matrix.shape[1]

    @property
    def shape(self):
        return self._matrix.shape

    def atom(self, i: int) -> np.ndarray:
        return self._matrix[:, i]

    def sub(self, support: Sequence[int]) -> np.ndarray:
        """Columns indexed by ``support``, in the given order."""
        return self._matrix[:, list(support)]

    def gram(self, support: Optional[Sequence[int]] = None) -> "GramView":
        if self._gram is None:
            g = self._matrix.T @ self._matrix
            # exact symmetry and unit diagonal; both hold up to round-off anyway
            g = 0.5 * (g + g.T)
            np.fill_diagonal(g, 1.0)
            self._gram = _readonly(g)
        if support is None:
            support = range(self.d)
        support = tuple(int(i) for i in support)
        idx = np.asarray(support, dtype=int)
        return GramView(self, support, _readonly(self._gram[np.ix_(idx, idx)]))

    @property
    def gram_matrix(self) -> np.ndarray:
        """Full ``d x d`` Gram matrix, cached."""
        return self.gram().matrix

    def __eq__(self, other):
        if not isinstance(other, Dictionary):
            return NotImplemented
        return np.array_equal(self._matrix, other._matrix)

    def __hash__(self):
        return hash((self.shape, self._matrix.tobytes()))

    def __repr__(self):
        return f"Dictionary(n={self.n}, d={self.d})"


@dataclass(frozen=True)
class GramView:
    """``G = Phi_L^T Phi_L`` for an index set ``L`` of a dictionary."""
    source: Dictionary = field(repr=False, compare=False)
    support: tuple
    matrix: np.ndarray = field(repr=False, compare=False)

    @property
    def off_diagonal(self) -> np.ndarray:
        return self.matrix - np.eye(len(self.support))


@dataclass(frozen=True, eq=False)
class SparseVector:
    """A coefficient vector of length ``dim`` stored on its support.

    ``support`` is strictly increasing and ``values`` holds the matching
    nonzero coefficients.
    """
    dim: int
    support: tuple
    values: np.ndarray

    def __post_init__(self):
        support = tuple(int(i) for i in self.support)
        values = _readonly(np.atleast_1d(self.values))
        if values.ndim != 1 or values.size != len(support):
            raise InvalidSparseVector("support and values differ in length")
        if any(b <= a for a, b in zip(support, support[1:])):
            raise InvalidSparseVector("support must be strictly increasing")
        if support and (support[0] < 0 or support[-1] >= self.dim):
            raise InvalidSparseVector(f"support index out of range [0, {self.dim})")
        if np.any(values == 0.0):
            raise InvalidSparseVector("stored coefficients must be nonzero")
        if not np.all(np.isfinite(values)):
            raise NonFinite("coefficients must be finite")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_dense(cls, x, atol: float = 0.0) -> "SparseVector":
        x = np.asarray(x, dtype=float).ravel()
        idx = np.flatnonzero(np.abs(x) > atol)
        return cls(x.size, tuple(idx.tolist()), x[idx])

    @classmethod
    def from_pairs(cls, dim: int, pairs: Iterable) -> "SparseVector":
        pairs = sorted((int(i), float(v)) for i, v in pairs)
        return cls(dim, tuple(i for i, _ in pairs), np.array([v for _, v in pairs]))

    @property
    def k(self) -> int:
        return len(self.support)

    @property
    def a_min(self) -> float:
        """Smallest nonzero magnitude."""
        if not self.support:
            raise InvalidSparseVector("zero vector has no a_min")
        return float(np.min(np.abs(self.values)))

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def to_dense(self) -> np.ndarray:
        x = np.zeros(self.dim)
        x[list(self.support)] = self.values
        return x

    def __eq__(self, other):
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (self.dim == other.dim and self.support == other.support
                and np.array_equal(self.values, other.values))

    def __hash__(self):
        return hash((self.dim, self.support, self.values.tobytes()))


@dataclass(frozen=True, eq=False)
class Observation:
    """Measurement ``f = Phi a + w`` with declared noise level ``epsilon``.

    ``noise`` keeps ``w`` when the observation was synthesized here.
    """
    f: np.ndarray
    epsilon: float = 0.0
    noise: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        f = _readonly(np.ravel(self.f))
        if not np.all(np.isfinite(f)):
            raise NonFinite("observation contains NaN or Inf")
        eps = float(self.epsilon)
        if not eps >= 0.0:
            raise ValueError(f"epsilon must be >= 0, got {self.epsilon!r}")
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "epsilon", eps)
        if self.noise is not None:
            object.__setattr__(self, "noise", _readonly(np.ravel(self.noise)))

    @property
    def n(self) -> int:
        return self.f.size


def normalize_columns(raw) -> Dictionary:
    """Scale every column of ``raw`` to unit Euclidean norm."""
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 2:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {raw.shape}")
    if not np.all(np.isfinite(raw)):
        raise NonFinite("matrix contains NaN or Inf entries")
    norms = _column_norms(raw)
    small = np.flatnonzero(norms <= ZERO_COLUMN_TOL)
    if small.size:
        raise ZeroColumn(int(small[0]))
    return Dictionary(raw / norms)


def synthesize(phi: Dictionary, a: SparseVector, w=None) -> Observation:
    """Return the observation ``f = Phi a + w`` with ``epsilon = ||w||``."""
    if a.dim != phi.d:
        raise DimensionMismatch(f"signal has dim {a.dim}, dictionary has {phi.d} atoms")
    f = phi.sub(a.support) @ a.values if a.k else np.zeros(phi.n)
    if w is None:
        return Observation(f, 0.0)
    w = np.asarray(w, dtype=float).ravel()
    if w.size != phi.n:
        raise DimensionMismatch(f"noise has length {w.size}, expected {phi.n}")
    return Observation(f + w, float(np.linalg.norm(w)), noise=w)


def least_squares(phi: Dictionary, support: Sequence[int], f):
    """Minimize ``||f - Phi_L z||`` over ``z`` using a Householder QR.

    Returns the coefficients ``z`` (ordered like ``support``) and the
    residual ``f - Phi_L z``. Raises :class:`RankDeficient` when the
    smallest singular value of ``Phi_L`` is at most 1e-10.
    """
    f = np.asarray(f, dtype=float).ravel()
    if f.size != phi.n:
        raise DimensionMismatch(f"f has length {f.size}, expected {phi.n}")
    support = [int(i) for i in support]
    if not support:
        return np.zeros(0), f.copy()
    if len(support) > phi.n:
        raise RankDeficient(support, 0.0)
    A = phi.sub(support)
    q, r = np.linalg.qr(A, mode="reduced")
    sigma_min = float(np.linalg.svd(r, compute_uv=False)[-1])
    if sigma_min <= RANK_TOL:
        raise RankDeficient(support, sigma_min)
    z = solve_triangular(r, q.T @ f)
    # residual from the projection, then one refinement pass against A
    res = f - A @ z
    dz = solve_triangular(r, q.T @ res)
    z = z + dz
    res = f - A @ z
    return z, res


def correlations(phi: Dictionary, r) -> np.ndarray:
    """Inner products ``<r, phi_i>`` for every atom, in atom order."""
    r = np.asarray(r, dtype=float).ravel()
    if r.size != phi.n:
        raise DimensionMismatch(f"vector has length {r.size}, expected {phi.n}")
    return phi.matrix.T @ r


def smallest_singular_value(phi: Dictionary, support: Sequence[int]) -> float:
    if not len(support):
        return float("inf")
    return float(np.linalg.svd(phi.sub(support), compute_uv=False)[-1])
