"""A small randomized sweep: how often does each selection rule recover the
support, and how often was recovery certified in advance?

Run: python demos/recovery_sweep.py
"""
from greedy_cs.harness import SweepConfig, run_sweep, summarize

cfg = SweepConfig.from_mapping({
    "trials": 40, "seed": 1, "kind": "perturbed-identity", "n": 10, "d": 10,
    "scale": 0.1, "k": [2, 4], "rho": [0.5, 1.0], "epsilon": 0.01,
    "noise": 0.01, "value_model": "min", "policies": ["max", "first", "min"],
})
records = run_sweep(cfg)
summary = summarize(records)
print(f"{summary['records']} runs, {summary['violations']} violated guarantees")
for policy, entry in summary["policies"].items():
    cert = entry["conditioned"]["theorem1"]
    rate = cert["success_rate"]
    print(f"{policy:>5}: success {entry['success_rate']:.2f}; certified in "
          f"{cert['count']} runs, success there {rate if rate is None else f'{rate:.2f}'}")
