"""Coherence, global 2-coherence and restricted isometry constants of a
small dictionary, and how they bound one another.

Run: python demos/coherence_metrics.py
"""
import numpy as np

from greedy_cs import (Dictionary, lemma1_chain, mutual_coherence, nu_sequence,
                       ric_bounds, ric_exact)

s = 1 / np.sqrt(2)
phi = Dictionary(np.array([[1.0, 0.0, s],
                           [0.0, 1.0, s],
                           [0.0, 0.0, 0.0]]))

print("mutual coherence M =", mutual_coherence(phi))
print("nu_k by k:", nu_sequence(phi))
for k in (2, 3):
    print(f"delta_{k} = {ric_exact(phi, k):.6f}, bounds {ric_bounds(phi, k)}")

# M <= nu_{k-1} <= delta_k <= sqrt(k-1) nu_{k-1} <= (k-1) M on a random dictionary
rng = np.random.default_rng(3)
raw = rng.standard_normal((8, 12))
gauss = Dictionary(raw / np.linalg.norm(raw, axis=0))
for k in range(2, 5):
    rep = lemma1_chain(gauss, k)
    print(f"k={k}: " + " <= ".join(f"{v:.4f}" for v in rep.values),
          "holds" if rep.holds else "VIOLATED")
