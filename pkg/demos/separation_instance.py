"""Find a dictionary where the improved OMP condition holds but the older
bound on delta_{k+1} alone does not.

Run: python demos/separation_instance.py [output-stem]
"""
import math
import sys

from greedy_cs.harness import coherence_window, find_separation_instance, save_instance

k = 2
lo, hi = coherence_window(k)
print(f"planted clusters separate the bounds for coherence in [{lo:.4f}, {hi:.4f})")

inst = find_separation_instance(k=k)
if inst is None:
    sys.exit("no instance found")
cmp = inst.comparison
print(f"attempt {inst.generator['attempt']} ({inst.generator['kind']}): "
      f"delta_{k}={inst.delta_k:.4f}, delta_{k + 1}={inst.delta_k1:.4f}")
print(f"  delta_k + sqrt(k) delta_k+1 = {inst.delta_k + math.sqrt(k) * inst.delta_k1:.4f} < 1: {cmp.new}")
print(f"  delta_k+1 < {1 / (1 + math.sqrt(k)):.4f}: {cmp.prior}")

if len(sys.argv) > 1:
    save_instance(inst, sys.argv[1])
    print("saved to", sys.argv[1] + ".csv/.json")
