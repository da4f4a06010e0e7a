"""Weak orthogonal matching pursuit on a noisy observation, comparing the
three rules for picking among admissible atoms.

Run: python demos/womp_recovery.py
"""
import numpy as np

from greedy_cs import PursuitConfig, SparseVector, synthesize, womp
from greedy_cs.harness import EnsembleSpec, generate_dictionary

phi = generate_dictionary(EnsembleSpec("perturbed-identity", 20, 20, 0.03, seed=11))
a = SparseVector.from_pairs(20, [(2, 1.5), (7, -1.0), (13, 0.8)])
noise = 0.01 * np.random.default_rng(5).standard_normal(20)
obs = synthesize(phi, a, noise)
print(f"true support {a.support}, ||w|| = {np.linalg.norm(noise):.4f}")

for policy in ("max", "first", "min"):
    res = womp(phi, obs, PursuitConfig(rho=0.7, epsilon=obs.epsilon, selection_policy=policy))
    err = np.linalg.norm(res.estimate - a.to_dense())
    print(f"{policy:>5}: picked {res.support_trajectory}, {res.iterations} iterations, "
          f"stop={res.stop_reason.value}, error {err:.4f}")
