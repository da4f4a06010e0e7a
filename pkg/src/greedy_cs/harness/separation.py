"""Search for dictionaries where the OMP condition
``delta_k + sqrt(k) delta_{k+1} < 1`` holds but the older
``delta_{k+1} < 1 / (1 + sqrt(k))`` does not.

Gaussian dictionaries rarely get there: ``delta_{k+1}`` has to be much
larger than ``delta_k``. A cluster of ``k + 1`` atoms with common pairwise
inner product ``c`` inside an otherwise orthonormal set has
``delta_k = (k - 1) c`` and ``delta_{k+1} = k c``, which lands in the gap for

    1 / (k (1 + sqrt(k))) <= c < 1 / (k - 1 + k sqrt(k)).

The search alternates seeded random candidates with small random
perturbations of such clusters, so the first hit is deterministic.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..coherence import ric_exact
from ..dictionary import Dictionary, normalize_columns
from ..guarantees import compare_deltas
from ..io import load_dictionary, write_matrix
from .ensembles import EnsembleSpec, derive_seed, generate_dictionary, make_rng


def coherence_window(k: int):
    """Interval of cluster coherences ``c`` that separate the two bounds."""
    lo = 1.0 / (k * (1.0 + math.sqrt(k)))
    hi = 1.0 / (k - 1 + k * math.sqrt(k))
    return lo, hi


def planted_cluster(n: int, d: int, k: int, c: float, scale: float = 0.0,
                    seed: int = 0) -> Dictionary:
    """``d`` atoms in ``R^n``: ``k + 1`` of them pairwise at inner product
    ``c``, the rest identity columns; then a Gaussian perturbation of size
    ``scale`` and renormalization. Needs ``d + 1 <= n``."""
    if d + 1 > n:
        raise ValueError(f"need d + 1 <= n, got n={n}, d={d}")
    if not k + 1 <= d:
        raise ValueError("cluster does not fit")
    raw = np.eye(n, d)
    shared = np.zeros(n)
    shared[n - 1] = 1.0
    for i in range(k + 1):
        raw[:, i] = math.sqrt(1.0 - c) * raw[:, i] + math.sqrt(c) * shared
    if scale:
        raw = raw + scale * make_rng(seed).standard_normal((n, d))
    return normalize_columns(raw)


@dataclass
class SeparationInstance:
    k: int
    delta_k: float
    delta_k1: float
    dictionary: Dictionary
    generator: dict

    @property
    def comparison(self):
        return compare_deltas(self.k, self.delta_k, self.delta_k1)


def find_separation_instance(k: int = 2, n: int = 8, d: int = 7,
                             master_seed: int = 2014, max_attempts: int = 2000,
                             scale: float = 0.02) -> Optional[SeparationInstance]:
    """Return the first separating dictionary found, or ``None``.

    Even attempts draw a Gaussian or perturbed-identity dictionary, odd
    attempts perturb a planted cluster with ``c`` uniform in the window.
    """
    lo, hi = coherence_window(k)
    for t in range(max_attempts):
        seed = derive_seed(master_seed, t)
        if t % 2 == 0:
            kind = "gaussian" if t % 4 == 0 else "perturbed-identity"
            gen = {"kind": kind, "n": n, "d": d, "scale": 0.3, "seed": seed}
            phi = generate_dictionary(EnsembleSpec(kind, n, d, 0.3, seed))
        else:
            c = float(make_rng(seed).uniform(lo, hi))
            gen = {"kind": "planted-cluster", "n": n, "d": d, "k": k, "c": c,
                   "scale": scale, "seed": seed}
            phi = planted_cluster(n, d, k, c, scale, seed)
        dk, dk1 = ric_exact(phi, k), ric_exact(phi, k + 1)
        if compare_deltas(k, dk, dk1).separation:
            gen["attempt"] = t
            return SeparationInstance(k, dk, dk1, phi, gen)
    return None


def save_instance(inst: SeparationInstance, stem) -> None:
    """Write ``<stem>.csv`` (matrix) and ``<stem>.json`` (metadata)."""
    stem = os.fspath(stem)
    write_matrix(stem + ".csv", inst.dictionary.matrix,
                 header=f"separation instance, k={inst.k}")
    meta = {"k": inst.k, "delta_k": inst.delta_k, "delta_k1": inst.delta_k1,
            "generator": inst.generator, **inst.comparison.to_dict()}
    with open(stem + ".json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_instance(stem) -> SeparationInstance:
    stem = os.fspath(stem)
    with open(stem + ".json") as fh:
        meta = json.load(fh)
    phi = load_dictionary(stem + ".csv")
    return SeparationInstance(meta["k"], meta["delta_k"], meta["delta_k1"], phi,
                              meta["generator"])
