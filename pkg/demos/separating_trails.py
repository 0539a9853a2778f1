"""How often does a random box contain a long trail crossing mostly AF bonds?

Systems at different p share one uniform per bond, so they are nested and the
hit counts can only grow with p.
"""
from __future__ import annotations

from frustrata.separating import (lemma1_experiment, search_separating, separating_tail_probability,
                                  trail_count)
from frustrata.lattice import gen_random

print("trails with k steps from the origin:", [trail_count(k) for k in range(1, 8)])
t = separating_tail_probability(8, 0.1)
print(f"P(mu > 4 of 8 bonds) at p=0.1: {float(t.exact):.2e} <= {t.bound:.2e}")

system = gen_random(0.15, 10, 10, seed=11)
res = search_separating(system, (0, 0, 9, 9), min_len=6)
print("witness in a 10x10 box at p=0.15:", res.witness.sites if res.found else None)

for row in lemma1_experiment([0.005, 0.02, 0.05, 0.1], n=12, kappa=0.5, trials=100, seed=1):
    print(f"p={row.p:<6} L={row.L} hits {row.hits:3d}/{row.trials}  union bound {row.union_bound:.3g}")
