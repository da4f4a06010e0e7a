"""Seeded random dictionaries and sparse signals.

All randomness comes from numpy's PCG64 bit generator wrapped in
``numpy.random.Generator``; normal variates use its ziggurat sampler.
Per-trial seeds are derived with ``numpy.random.SeedSequence`` so that
trial ``t`` of a sweep does not depend on any other trial.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..dictionary import Dictionary, SparseVector, normalize_columns
from ..errors import InvalidSparsity
from ..io import load_dictionary

PRNG_NAME = "numpy.random.PCG64"

_UINT64_MASK = (1 << 64) - 1


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed) & _UINT64_MASK))


def derive_seed(master: int, *path: int) -> int:
    """64-bit seed for the stream named by ``(master, *path)``."""
    ss = np.random.SeedSequence([int(master) & _UINT64_MASK, *(int(p) for p in path)])
    return int(ss.generate_state(1, np.uint64)[0])


class EnsembleKind(str, enum.Enum):
    GAUSSIAN = "gaussian"
    PERTURBED_IDENTITY = "perturbed-identity"
    FROM_FILE = "file"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"gaussiannormalized": "gaussian",
                   "partialidentityperturbed": "perturbed-identity",
                   "fromfile": "file"}
        return cls(aliases.get(key.replace("-", ""), key))


@dataclass(frozen=True)
class EnsembleSpec:
    kind: EnsembleKind
    n: int = 0
    d: int = 0
    perturbation_scale: float = 0.0
    seed: int = 0
    path: Optional[str] = None
    renormalize: bool = False

    def __post_init__(self):
        object.__setattr__(self, "kind", EnsembleKind.parse(self.kind))
        if self.kind is EnsembleKind.FROM_FILE:
            if not self.path:
                raise ValueError("file ensemble needs a path")
            return
        if self.n < 1 or self.d < 2:
            raise ValueError(f"need n >= 1 and d >= 2, got n={self.n}, d={self.d}")
        if self.perturbation_scale < 0:
            raise ValueError("perturbation_scale must be >= 0")


def generate_dictionary(spec: EnsembleSpec) -> Dictionary:
    """Build the dictionary described by ``spec``.

    ``gaussian``: i.i.d. N(0, 1) entries, columns normalized.
    ``perturbed-identity``: the first ``min(n, d)`` columns are identity
    columns plus ``scale`` times Gaussian noise; any columns beyond ``n``
    are plain Gaussian. Columns are normalized.
    ``file``: read and validated with :func:`greedy_cs.io.load_dictionary`.
    """
    if spec.kind is EnsembleKind.FROM_FILE:
        return load_dictionary(spec.path, renormalize=spec.renormalize)
    rng = make_rng(spec.seed)
    noise = rng.standard_normal((spec.n, spec.d))
    if spec.kind is EnsembleKind.GAUSSIAN:
        return normalize_columns(noise)
    m = min(spec.n, spec.d)
    raw = noise.copy()
    raw[:, :m] = np.eye(spec.n, m) + spec.perturbation_scale * noise[:, :m]
    return normalize_columns(raw)


class ValueModel(str, enum.Enum):
    UNIT_SIGNS = "unit"
    GAUSSIAN_MAGNITUDES = "gaussian"
    MIN_MAGNITUDE = "min"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "").replace("-", "")
        aliases = {"unitsigns": "unit", "gaussianmagnitudes": "gaussian",
                   "minmagnitude": "min"}
        return cls(aliases.get(key, key))


def generate_sparse_signal(d: int, k: int, seed=None, value_model="unit",
                           a_min: float = 1.0, rng=None) -> SparseVector:
    """Random ``k``-sparse vector of length ``d`` with a uniform support.

    ``unit``: random signs, all magnitudes 1. ``gaussian``: N(0, 1)
    values. ``min``: random signs, magnitudes ``a_min * (1 + Exp(1))``
    with one entry pinned to exactly ``a_min``.
    """
    if not 0 <= k <= d:
        raise InvalidSparsity(f"need 0 <= k <= d, got k={k}, d={d}")
    model = ValueModel.parse(value_model)
    if rng is None:
        rng = make_rng(0 if seed is None else seed)
    support = np.sort(rng.choice(d, size=k, replace=False))
    signs = np.where(rng.random(k) < 0.5, -1.0, 1.0)
    if model is ValueModel.UNIT_SIGNS:
        values = signs
    elif model is ValueModel.GAUSSIAN_MAGNITUDES:
        values = rng.standard_normal(k)
        while np.any(values == 0.0):
            zero = values == 0.0
            values[zero] = rng.standard_normal(int(zero.sum()))
    else:
        if a_min <= 0:
            raise ValueError("a_min must be positive")
        mags = a_min * (1.0 + rng.exponential(size=k))
        if k:
            mags[rng.integers(k)] = a_min
        values = signs * mags
    return SparseVector(d, tuple(support.tolist()), values)


def random_noise(n: int, norm: float, rng) -> np.ndarray:
    """Uniformly oriented vector of length ``n`` with Euclidean norm ``norm``."""
    if norm == 0:
        return np.zeros(n)
    v = rng.standard_normal(n)
    return v * (norm / np.linalg.norm(v))
