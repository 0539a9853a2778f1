"""Slow, independent reference implementations used by the tests.

Nothing here imports the algorithms under test: energies are summed pair
by pair, trails are enumerated without pruning, and crossed bonds come from
intersecting unit squares.
"""
from __future__ import annotations

import itertools
from fractions import Fraction

STEPS = ((1, 0), (0, 1), (-1, 0), (0, -1))


def crossed_pair(i, j):
    """Sites whose bond is the common edge of the unit squares ``i + [0,1]^2`` and ``j + [0,1]^2``."""
    def corners(s):
        return {(s[0] + a, s[1] + b) for a in (0, 1) for b in (0, 1)}
    common = corners(i) & corners(j)
    assert len(common) == 2
    return frozenset(common)


def coupling_of_pair(h, v, pair):
    a, b = sorted(pair)
    if a[1] == b[1]:
        return int(h[a[1]][a[0]])
    return int(v[a[1]][a[0]])


def energy_pairs(h, v, spins: dict) -> int:
    """``-sum c u_i u_j`` over every neighbouring pair of sites in ``spins``."""
    total = 0
    for (x, y), s in spins.items():
        for nb in ((x + 1, y), (x, y + 1)):
            if nb in spins:
                total -= coupling_of_pair(h, v, {(x, y), nb}) * s * spins[nb]
    return total


def all_configs_min(h, v, sites):
    best = None
    for bits in itertools.product((-1, 1), repeat=len(sites)):
        e = energy_pairs(h, v, dict(zip(sites, bits)))
        best = e if best is None else min(best, e)
    return best


def enumerate_trails(x0, y0, w, h, max_len, min_len=1):
    """Every edge-distinct walk with all sites in the rectangle, as site tuples."""
    inside = {(x, y) for x in range(x0, x0 + w) for y in range(y0, y0 + h)}
    out = []

    def grow(path, used):
        if len(path) - 1 >= min_len:
            out.append(tuple(path))
        if len(path) - 1 == max_len:
            return
        x, y = path[-1]
        for dx, dy in STEPS:
            nb = (x + dx, y + dy)
            seg = frozenset((path[-1], nb))
            if nb in inside and seg not in used:
                used.add(seg)
                path.append(nb)
                grow(path, used)
                path.pop()
                used.discard(seg)

    for s in sorted(inside):
        grow([s], set())
    return out


def count_trails_by_steps(k: int) -> int:
    """Walks of ``k`` unit steps from the origin with no repeated segment."""
    n = 0
    for steps in itertools.product(STEPS, repeat=k):
        pos, segs = (0, 0), set()
        ok = True
        for dx, dy in steps:
            nxt = (pos[0] + dx, pos[1] + dy)
            seg = frozenset((pos, nxt))
            if seg in segs:
                ok = False
                break
            segs.add(seg)
            pos = nxt
        n += ok
    return n


def tail_by_outcomes(k: int, p: Fraction) -> Fraction:
    """``P(more than k/2 of k independent crossings are antiferromagnetic)`` by summing all 2^k outcomes."""
    total = Fraction(0)
    for outcome in itertools.product((0, 1), repeat=k):
        j = sum(outcome)
        if 2 * j > k:
            total += p**j * (1 - p) ** (k - j)
    return total


def bond_class(pair, N):
    """Canonical periodic index of the bond between two neighbouring sites."""
    a, b = sorted(pair)
    if a[1] == b[1]:
        return (a[1] % N) * N + (a[0] % N)
    return N * N + (a[1] % N) * N + (a[0] % N)


def census_oracle(N: int, m: int, min_len: int, translate: bool) -> int:
    """Cells with ``m`` antiferromagnetic bonds admitting a separating trail, by full enumeration."""
    trails = enumerate_trails(0, 0, N + 1, N + 1, max_len=2 * N * (N + 1))
    shifts = [(zx, zy) for zx in range(N) for zy in range(N)] if translate else [(0, 0)]
    crossings = set()
    for t in trails:
        if len(t) - 1 < min_len:
            continue
        for zx, zy in shifts:
            crossings.add(tuple(bond_class(crossed_pair((a[0] + zx, a[1] + zy), (b[0] + zx, b[1] + zy)), N)
                                for a, b in zip(t, t[1:])))
    bad = 0
    for af in itertools.combinations(range(2 * N * N), m):
        afs = set(af)
        if any(2 * sum(c in afs for c in cr) > len(cr) for cr in crossings):
            bad += 1
    return bad


def perimeter(cells) -> int:
    """Unit edges of the union of closed unit cells around ``cells``."""
    cells = set(cells)
    return sum((x + dx, y + dy) not in cells for x, y in cells for dx, dy in STEPS)
