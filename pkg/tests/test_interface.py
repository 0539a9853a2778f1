from __future__ import annotations

import numpy as np
import pytest

from frustrata.errors import ColoringError, NotEulerianError
from frustrata.ground_state import dp_ground
from frustrata.interface import (MajorityReport, components, dual_segment, euler_circuit,
                                 flip_inside, interface, majority_report, q_of, two_color)
from frustrata.lattice import Domain, SpinConfig, SpinSystem, Trail, crossed_bond, gen_random, mu

from oracles import perimeter


def square(x, y, size=1):
    """Closed dual curve around the ``size x size`` block of sites with corner ``(x, y)``."""
    a, b = x - 1, y - 1
    pts = [(a + i, b) for i in range(size)] + [(a + size, b + j) for j in range(size)]
    pts += [(a + size - i, b + size) for i in range(size)] + [(a, b + size - j) for j in range(size)]
    return Trail(tuple(pts + [(a, b)]))


def config_with(D, minus_sites):
    return SpinConfig.constant(D).flipped(minus_sites)


def test_dual_segment_is_inverse_of_crossed_bond():
    D = Domain.rect(4, 4)
    for bond in D.bonds():
        assert crossed_bond(*dual_segment(bond)) == bond


def test_interface_examples():
    D = Domain.rect(3, 3)
    assert len(interface(SpinConfig.constant(D))) == 0
    checker = SpinConfig(D, [[1, -1, 1], [-1, 1, -1], [1, -1, 1]])
    assert len(interface(checker)) == 12
    sigma = interface(config_with(D, [(1, 1)]))
    assert len(sigma) == 4
    assert set(sigma.segments) == set(square(1, 1).segments())
    assert sorted(sigma.half_integer_segments())[0] == (0.5, 0.5, 0.5, 1.5)
    assert sigma.to_csv().splitlines()[0] == "x1,y1,x2,y2"


def test_interface_double_counting():
    rng = np.random.default_rng(0)
    for _ in range(20):
        D = Domain.rect(6, 5, (1, 2))
        u = SpinConfig(D, rng.choice([-1, 1], size=(5, 6)))
        direct = sum(u[i] != u[j] for i, j in (b.endpoints for b in D.bonds()))
        assert len(interface(u)) == direct


def test_q_of_examples():
    assert q_of(Domain.from_sites([(0, 0)])).boundary_length == 4
    assert q_of(Domain.rect(2, 1)).boundary_length == 6
    assert q_of(Domain.from_sites([(0, 0), (1, 0), (0, 1)])).boundary_length == 8


def test_components_examples():
    D = Domain.rect(8, 8)
    comps = components(interface(config_with(D, [(1, 1), (5, 5)])), D)
    assert [c.length for c in comps] == [4, 4] and all(c.kind == "closed" for c in comps)
    assert components(interface(SpinConfig.constant(D)), D) == []
    block = components(interface(config_with(D, [(2, 2), (3, 2), (2, 3), (3, 3)])), D)
    assert len(block) == 1 and block[0].length == 8 and block[0].kind == "closed"
    assert not block[0].touches_boundary


def test_components_anchored():
    D = Domain.rect(5, 5)
    comps = components(interface(config_with(D, [(0, 2), (1, 2), (2, 2), (3, 2), (4, 2)])), D)
    assert len(comps) == 2
    for c in comps:
        assert c.kind == "anchored" and c.touches_boundary
        boundary = q_of(D).boundary_vertices()
        assert set(c.odd_vertices()) <= boundary


def test_euler_examples():
    assert euler_circuit(square(3, 3)).length == 4
    eight = list(square(1, 1).segments()) + list(square(2, 2).segments())
    circ = euler_circuit(eight)
    assert circ.closed and circ.length == 8 and set(circ.segments()) == set(eight)
    block = square(2, 2, size=2)
    assert euler_circuit(block).length == 8
    with pytest.raises(NotEulerianError):
        euler_circuit([((0, 0), (1, 0))])


def test_euler_covers_random_components():
    rng = np.random.default_rng(2)
    D = Domain.rect(10, 10)
    for _ in range(20):
        mask = rng.random((8, 8)) < 0.4
        u = SpinConfig(D, np.pad(np.where(mask, -1, 1), 1, constant_values=1))
        for comp in components(interface(u), D):
            circ = euler_circuit(comp)
            assert circ.closed and circ.length == comp.length
            assert set(circ.segments()) == set(comp.segments)


def test_two_color_examples():
    assert two_color(square(4, 4)) == {(4, 4)}
    assert two_color(square(2, 2, size=2)) == {(2, 2), (3, 2), (2, 3), (3, 3)}
    nested = list(square(5, 5).segments()) + list(square(4, 4, size=3).segments())
    inside = two_color(nested)
    ring = {(x, y) for x in range(4, 7) for y in range(4, 7)} - {(5, 5)}
    # one crossing to reach the ring, two to reach the centre
    assert inside == ring
    with pytest.raises(ColoringError):
        two_color([((0, 0), (1, 0)), ((1, 0), (1, 1))])


def test_two_color_corner_touching():
    eight = list(square(1, 1).segments()) + list(square(2, 2).segments())
    assert two_color(eight) == {(1, 1), (2, 2)}


def test_flip_examples():
    system = SpinSystem.uniform(5, 5)
    D = Domain.rect(5, 5)
    u = SpinConfig.constant(D)
    r = flip_inside(u, square(2, 2), system)
    assert r.delta_direct == r.delta_formula == -8
    v = config_with(D, [(2, 2)])
    r = flip_inside(v, square(2, 2), system)
    assert r.delta_direct == r.delta_formula == 2 * 4
    assert r.config == u


def test_flip_identity_and_involution():
    rng = np.random.default_rng(4)
    for seed in range(30):
        system = gen_random(0.4, 7, 7, seed)
        D = Domain.rect(7, 7)
        u = SpinConfig(D, rng.choice([-1, 1], size=(7, 7)))
        x, y = (int(t) for t in rng.integers(0, 5, size=2))
        curve = square(x, y, size=int(rng.integers(1, 4)))
        r = flip_inside(u, curve, system)
        assert r.delta_direct == r.delta_formula
        assert flip_inside(r.config, curve, system).config == u


def test_ground_state_interfaces_not_improvable():
    for seed in range(20):
        system = gen_random(0.3, 6, 6, seed)
        D = Domain.rect(6, 6)
        u = dp_ground(system, D).config
        for comp in components(interface(u), D):
            if comp.kind == "closed":
                eta = euler_circuit(comp)
                assert 2 * mu(eta, system) >= eta.length


def test_majority_examples():
    D = Domain.rect(6, 6)
    rep = majority_report(SpinConfig.constant(D))
    assert rep.majority_value == 1 and rep.majority_fraction == 1 and rep.minority_components == []
    assert majority_report(config_with(D, [(3, 3)])).max_boundary_length == 4
    block = [(x, y) for x in range(1, 3) for y in range(1, 4)]
    rep = majority_report(config_with(D, block))
    assert rep.minority_components == [(6, 10)]
    assert majority_report(-SpinConfig.constant(D)).majority_value == -1
    tie = SpinConfig(Domain.rect(2, 1), [[1, -1]])
    assert majority_report(tie).majority_value == 1


def test_majority_consistency():
    rng = np.random.default_rng(9)
    for _ in range(30):
        D = Domain.rect(7, 5)
        u = SpinConfig(D, rng.choice([-1, 1], size=(5, 7), p=[0.3, 0.7]))
        rep = majority_report(u)
        minority = {s for s in D.sites() if u[s] == -rep.majority_value}
        assert rep.majority_fraction >= 0.5
        assert sum(n for n, _ in rep.minority_components) == len(minority)
        assert sum(b for _, b in rep.minority_components) == sum(
            perimeter(c) for c in _four_components(minority))
        assert MajorityReport.from_dict(rep.to_dict()) == rep


def _four_components(sites):
    sites, out = set(sites), []
    while sites:
        stack = [sites.pop()]
        comp = set(stack)
        while stack:
            x, y = stack.pop()
            for nb in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if nb in sites:
                    sites.remove(nb)
                    comp.add(nb)
                    stack.append(nb)
        out.append(comp)
    return out
