"""Counting bad periodic cells, and the analytic bound that controls the ratio."""
from __future__ import annotations

from fractions import Fraction

from frustrata.census import CensusParams, census, lemma_g_check, stima_bound, theta_and_bounds

exact = census(CensusParams(2, 2, Fraction(1, 2)))
print(f"N=2, two AF bonds: {exact.bad} of {exact.total} cells are bad")

sampled = census(CensusParams.from_p(6, 0.05, Fraction(1, 2)), "sample", seed=4, trials=400)
print(f"N=6, p=0.05: sampled ratio {float(sampled.ratio):.3f}, 95% interval "
      f"({sampled.ci[0]:.3f}, {sampled.ci[1]:.3f})")

t = theta_and_bounds(0.01)
print(f"theta(0.01) = {t.theta:.4f}, 3 theta = {t.three_theta:.4f}")
rows = lemma_g_check(range(2, 13), [0.05, 0.2])
print(f"g_p bound checked on {len(rows)} tuples, all pass: {all(r.passes for r in rows)}")
for N in (100, 200, 400):
    print(f"census bound at N={N}, p=0.001: {stima_bound(N, 0.001, 0.5):.3g}")
