"""Check whether the sufficient conditions certify recovery before running
the pursuit, then confirm the certificate and the error bound.

Run: python demos/certify_recovery.py
"""
import numpy as np

from greedy_cs import (PursuitConfig, SparseVector, corollary2_check,
                       synthesize, theorem1_check, womp)
from greedy_cs.guarantees import error_bound_check
from greedy_cs.harness import EnsembleSpec, generate_dictionary, random_noise

phi = generate_dictionary(EnsembleSpec("perturbed-identity", 12, 12, 0.01, seed=4))
a = SparseVector.from_pairs(12, [(1, 1.0), (5, -2.0), (9, 1.2)])
rho = 0.8

# noise threshold first, then a noise level safely below it
probe = theorem1_check(phi, a, rho, 0.0)
eps = 0.5 * probe.diagnostics["noise_threshold"]
print(f"noise threshold {probe.diagnostics['noise_threshold']:.4f}, using eps = {eps:.4f}")

rep = theorem1_check(phi, a, rho, eps)
print(f"certificate: lhs={rep.lhs:.4f} rhs={rep.rhs:.4f} -> {rep.outcome}")

w = random_noise(12, eps, np.random.default_rng(0))
obs = synthesize(phi, a, w)
res = womp(phi, obs, PursuitConfig(rho=rho, epsilon=eps))
print(f"recovered support {res.support} in {res.iterations} iterations")
eb = error_bound_check(phi, a, res, eps)
print(f"||x - a||^2 = {eb.lhs:.3e} <= {eb.rhs:.3e}: {eb.holds}")

c2 = corollary2_check(phi, 3)
print(f"noiseless OMP condition for k=3: lhs={c2.lhs:.4f} < 1 -> {c2.satisfied}")
