"""Random ferromagnetic/antiferromagnetic spin systems on the square lattice.

Ground states at desk scale, the geometry of their interfaces, and exact
or empirical checks of the separating-trail estimates that control them.
"""
from __future__ import annotations

from .census import (CensusParams, CensusResult, census, cell_is_bad, decompose_trail, f_p, g_p,
                     globale_check, lemma_g_check, stima_bound, theta, theta_and_bounds)
from .errors import (CapacityError, ColoringError, ConcatenationError, DomainError,
                     FrustrataError, LatticeRangeError, NotEulerianError, ParameterError,
                     PreconditionError)
from .ground_state import (GroundStateResult, brute_force_ground, dp_ground, local_search_ground,
                           solve)
from .interface import (InterfaceGraph, InterfaceSet, MajorityReport, components, euler_circuit,
                        flip_inside, interface, majority_report, q_of, two_color)
from .lattice import (Bond, Domain, PeriodCell, SpinConfig, SpinSystem, Trail, concat,
                      crossed_bond, energy, gen_periodic, gen_random, mu)
from .separating import (is_separating, lemma1_experiment, proof_chain_holds, search_separating,
                         separating_tail_probability, threshold, trail_count, union_bound)

__version__ = "0.1.0"
