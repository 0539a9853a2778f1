from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frustrata import io as fio
from frustrata.errors import ConcatenationError, DomainError, LatticeRangeError, ParameterError
from frustrata.lattice import (Bond, Domain, PeriodCell, SpinConfig, SpinSystem, Trail,
                               bond_uniforms, concat, crossed_bond, energy, gen_periodic,
                               gen_random, mu)

from oracles import coupling_of_pair, crossed_pair, energy_pairs


def test_gen_random_extremes():
    assert np.all(gen_random(0.0, 5, 4, 9).h == 1) and np.all(gen_random(0.0, 5, 4, 9).v == 1)
    s = gen_random(1.0, 5, 4, 9)
    assert np.all(s.h == -1) and np.all(s.v == -1)


def test_gen_random_replay():
    a = gen_random(0.5, 4, 4, 42)
    b = gen_random(0.5, 4, 4, 42)
    assert a == b
    # replay: redraw the same Philox stream by hand
    u = np.random.Generator(np.random.Philox(key=42)).random(a.n_bonds)
    assert a.af_count == int((u < 0.5).sum())
    assert a.provenance == {"kind": "random", "p": 0.5, "seed": 42}


def test_bond_uniforms_slices_match_one_shot():
    full = bond_uniforms(7, 0, 50)
    for start in (0, 1, 3, 4, 5, 17, 33):
        assert np.array_equal(bond_uniforms(7, start, 50 - start), full[start:])


def test_gen_random_nested_in_p():
    lo, hi = gen_random(0.1, 9, 9, 3), gen_random(0.4, 9, 9, 3)
    assert np.all((lo.h == -1) <= (hi.h == -1)) and np.all((lo.v == -1) <= (hi.v == -1))


@pytest.mark.parametrize("args", [(-0.1, 4, 4), (1.5, 4, 4), (0.5, 1, 4), (0.5, 4, 1)])
def test_gen_random_rejects(args):
    with pytest.raises(ParameterError):
        gen_random(*args, seed=1)


def test_gen_periodic_examples():
    assert gen_periodic(PeriodCell.ferro(3), 7, 5).af_count == 0
    one = PeriodCell(1, [[-1]], [[-1]])
    s = gen_periodic(one, 4, 4)
    assert s.af_count == s.n_bonds
    # h[0, 0] and v[0, 0]: each class occurs 3 x 3 times in a 6x6 window
    cell = PeriodCell.from_af_indices(2, [0, 4])
    s6 = gen_periodic(cell, 6, 6)
    direct = sum(cell.h[y % 2, x % 2] == -1 for y in range(6) for x in range(5))
    direct += sum(cell.v[y % 2, x % 2] == -1 for y in range(5) for x in range(6))
    assert s6.af_count == direct == 18


def test_gen_periodic_tile_count_full_periods():
    cell = PeriodCell.from_af_indices(2, [0, 5])
    s = gen_periodic(cell, 6, 6)
    assert s.af_count == int((s.h == -1).sum() + (s.v == -1).sum())
    # translation invariance wherever the translate stays in the window
    assert np.array_equal(s.h[:, :3], s.h[:, 2:5]) and np.array_equal(s.v[:3, :], s.v[2:5, :])


def test_gen_periodic_too_small():
    with pytest.raises(ParameterError):
        gen_periodic(PeriodCell.ferro(5), 4, 8)


@pytest.mark.parametrize("i,j", [((0, 0), (1, 0)), ((0, 0), (0, 1)), ((3, 2), (2, 2)),
                                 ((-1, 4), (-1, 3))])
def test_crossed_bond_matches_square_intersection(i, j):
    assert set(crossed_bond(i, j).endpoints) == crossed_pair(i, j)


def test_crossed_bond_examples():
    assert crossed_bond((0, 0), (1, 0)) == Bond.between((1, 0), (1, 1))
    assert crossed_bond((0, 0), (0, 1)) == Bond.between((0, 1), (1, 1))
    assert crossed_bond((1, 0), (0, 0)) == crossed_bond((0, 0), (1, 0))
    with pytest.raises(ParameterError):
        crossed_bond((0, 0), (1, 1))


def test_crossed_bond_injective():
    segs = {frozenset(((x, y), (x + dx, y + dy))) for x in range(-3, 4) for y in range(-3, 4)
            for dx, dy in ((1, 0), (0, 1))}
    bonds = {crossed_bond(*sorted(s)) for s in segs}
    assert len(bonds) == len(segs)


def test_mu_examples():
    t = Trail(((0, 0), (1, 0), (2, 0), (2, 1), (1, 1)))
    assert mu(t, SpinSystem.uniform(4, 4)) == 0
    assert mu(t, SpinSystem.uniform(4, 4, -1)) == t.length
    s = SpinSystem.uniform(4, 4)
    v = s.v.copy()
    v[0, 1] = -1  # bond (1,0)-(1,1)
    s1 = SpinSystem(4, 4, s.h, v)
    assert mu(Trail(((0, 0), (1, 0), (2, 0))), s1) == 1


def test_mu_out_of_window():
    with pytest.raises(LatticeRangeError):
        mu(Trail(((3, 0), (4, 0))), SpinSystem.uniform(4, 4))


def test_trail_validation():
    t = Trail(((0, 0), (1, 0), (1, 1), (0, 1), (0, 0), (-1, 0)))
    assert t.length == 5 and not t.closed
    assert Trail(((0, 0), (1, 0), (1, 1), (0, 1), (0, 0))).closed
    with pytest.raises(ParameterError):
        Trail(((0, 0), (1, 0), (0, 0)))
    with pytest.raises(ParameterError):
        Trail(((0, 0), (2, 0)))


def test_concat():
    g = Trail(((0, 0), (1, 0)))
    assert concat(g, Trail(((1, 0), (2, 0)))).length == 2
    with pytest.raises(ConcatenationError):
        concat(g, Trail(((1, 0), (0, 0))))
    with pytest.raises(ConcatenationError):
        concat(g, Trail(((2, 0), (3, 0))))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 8), st.integers(1, 8))
def test_concat_additivity(seed, k1, k2):
    from frustrata.census import random_trail
    rng = np.random.default_rng(seed)
    whole = random_trail(rng, k1 + k2, (17, 17))
    g, d = Trail(whole.sites[: k1 + 1]), Trail(whole.sites[k1:])
    joined = concat(g, d)
    system = gen_random(0.4, 36, 36, seed)
    assert joined == whole and joined.length == k1 + k2
    assert mu(joined, system) == mu(g, system) + mu(d, system)


def test_energy_examples():
    D = Domain.rect(2, 2)
    ferro, af = SpinSystem.uniform(2, 2), SpinSystem.uniform(2, 2, -1)
    assert energy(SpinConfig.constant(D), ferro) == -4
    checker = SpinConfig(D, [[1, -1], [-1, 1]])
    assert energy(checker, af) == -4
    assert energy(SpinConfig(D, [[-1, 1], [1, 1]]), ferro) == 0


def test_energy_missing_spin():
    u = SpinConfig.constant(Domain.rect(2, 2))
    with pytest.raises(DomainError):
        energy(u, SpinSystem.uniform(4, 4), Domain.rect(3, 3))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32), st.integers(2, 6), st.integers(2, 6), st.floats(0, 1))
def test_energy_properties(seed, w, h, p):
    system = gen_random(p, w + 1, h + 1, seed)
    rng = np.random.default_rng(seed)
    mask = rng.random((h, w)) < 0.8
    if not mask.any():
        mask[0, 0] = True
    D = Domain(mask, (1, 0))
    spins = rng.choice([-1, 1], size=D.mask.shape)
    u = SpinConfig(D, np.where(D.mask, spins, 0))
    e = energy(u, system)
    values = {s: u[s] for s in D.sites()}
    assert e == energy_pairs(system.h, system.v, values)
    assert e == energy(-u, system)
    assert -D.n_bonds <= e <= D.n_bonds
    site = D.sites()[int(rng.integers(D.n_sites))]
    assert energy(u.flipped([site]), system.gauge(site)) == e


def test_domain_basics():
    D = Domain.from_sites([(2, 3), (3, 3), (2, 4)])
    assert D.origin == (2, 3) and D.n_sites == 3 and D.n_bonds == 2
    assert (3, 4) not in D and (2, 4) in D
    assert Domain.rect(3, 2).sites()[:3] == [(0, 0), (0, 1), (1, 0)]  # wide: column-major
    assert Domain.rect(2, 3).sites()[:3] == [(0, 0), (1, 0), (0, 1)]  # tall: row-major
    with pytest.raises(ParameterError):
        Domain(np.zeros((2, 2), bool))


def test_system_json_round_trip():
    s = gen_random(0.37, 7, 5, 2**63 + 11)
    text = fio.dumps_system(s)
    back = fio.loads_system(text)
    assert back == s and fio.dumps_system(back) == text
    d = fio.system_to_dict(s)
    assert len(d["h"]) == 5 and len(d["h"][0]) == 6 and len(d["v"]) == 4 and len(d["v"][0]) == 7
    cell = PeriodCell.from_af_indices(3, [0, 4, 11])
    assert fio.loads_cell(fio.dumps_cell(cell)) == cell


def test_system_rejects_bad_couplings():
    with pytest.raises(ParameterError):
        SpinSystem(3, 3, np.zeros((3, 2)), np.ones((2, 3)))
    with pytest.raises(ParameterError):
        SpinSystem(3, 3, np.ones((2, 2)), np.ones((2, 3)))
