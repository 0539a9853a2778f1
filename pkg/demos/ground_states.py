"""Exact ground states of a random ±1 system and the shape of their interfaces.

At small p the minimiser is one big majority phase with a few short minority
islands; at p = 0.2 the islands grow and merge.
"""
from __future__ import annotations

from frustrata import Domain, components, dp_ground, euler_circuit, gen_random, interface, mu
from frustrata.interface import majority_report


def show(spins):
    for row in spins[::-1]:
        print("".join("#" if s < 0 else "." for s in row))


for p in (0.02, 0.2):
    system = gen_random(p, 16, 24, seed=3)
    D = Domain.rect(16, 24)
    ground = dp_ground(system, D)
    rep = majority_report(ground.config)
    print(f"p={p}: energy {ground.energy}, majority fraction {rep.majority_fraction:.3f}, "
          f"longest minority boundary {rep.max_boundary_length}")
    show(ground.config.spins)
    # every closed interface piece of a minimiser crosses at least half AF bonds
    for comp in components(interface(ground.config), D):
        if comp.kind == "closed":
            eta = euler_circuit(comp)
            print(f"  closed loop of length {eta.length} crossing {mu(eta, system)} AF bonds")
    print()
