"""Interfaces of spin configurations and the flip construction.

Dual segments are stored in trail coordinates: the pair of lattice sites
``((a, b), (a', b'))`` stands for the unit segment between the half-integer
points ``(a + 1/2, b + 1/2)`` and ``(a' + 1/2, b' + 1/2)``. With this
convention a closed component of an interface is literally a closed
:class:`~frustrata.lattice.Trail`, and the bond a segment separates is
:func:`~frustrata.lattice.crossed_bond` of its endpoints.
"""
from __future__ import annotations

import csv
import io
import json
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Union

import numpy as np
from scipy import ndimage

from .errors import ColoringError, NotEulerianError
from .lattice import (HORIZONTAL, STEPS, Bond, Domain, Site, SpinConfig, SpinSystem, Trail,
                      crossed_bond, energy)

Segment = tuple[Site, Site]


def dual_segment(bond: Bond) -> Segment:
    """The unit segment shared by the closed cells of the two endpoints of ``bond``."""
    x, y, axis = bond
    if axis == HORIZONTAL:
        return (x, y - 1), (x, y)
    return (x - 1, y), (x, y)


def _norm(seg) -> Segment:
    a, b = (tuple(map(int, seg[0])), tuple(map(int, seg[1])))
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class InterfaceSet:
    """Bonds ``{i, j}`` of the domain with ``u_i u_j = -1`` and their dual segments."""

    bonds: frozenset

    @property
    def segments(self) -> list[Segment]:
        return sorted(dual_segment(b) for b in self.bonds)

    def half_integer_segments(self) -> list[tuple[float, float, float, float]]:
        return [(a[0] + 0.5, a[1] + 0.5, b[0] + 0.5, b[1] + 0.5) for a, b in self.segments]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["x1", "y1", "x2", "y2"])
        writer.writerows(self.half_integer_segments())
        return buf.getvalue()

    def __len__(self):
        return len(self.bonds)


def interface(u: SpinConfig, D: Domain | None = None) -> InterfaceSet:
    if D is not None and D != u.domain:
        u = _restrict(u, D)
    dom = u.domain
    s = u.spins.astype(np.int64)
    x0, y0 = dom.origin
    bonds = [Bond(int(x) + x0, int(y) + y0, 0) for y, x in zip(*np.nonzero(s[:, :-1] * s[:, 1:] == -1))]
    bonds += [Bond(int(x) + x0, int(y) + y0, 1) for y, x in zip(*np.nonzero(s[:-1, :] * s[1:, :] == -1))]
    return InterfaceSet(frozenset(bonds))


def _restrict(u: SpinConfig, D: Domain) -> SpinConfig:
    return SpinConfig.from_dict(D, {s: u[s] for s in D.sites()})


@dataclass(frozen=True)
class CellRegion:
    """``q(D)``: interior of the union of closed unit cells centred at domain sites."""

    cells: frozenset
    boundary: frozenset  # dual segments of the polygonal boundary

    @property
    def boundary_length(self) -> int:
        return len(self.boundary)

    def boundary_vertices(self) -> set[Site]:
        return {p for seg in self.boundary for p in seg}


def q_of(D: Domain) -> CellRegion:
    cells = D.sites()
    boundary = set()
    for x, y in cells:
        for dx, dy in STEPS:
            nb = (x + dx, y + dy)
            if nb not in D:
                boundary.add(dual_segment(Bond.between((x, y), nb)))
    return CellRegion(frozenset(cells), frozenset(boundary))


@dataclass(frozen=True)
class InterfaceGraph:
    """Connected embedded graph made of unit dual segments.

    ``kind`` is ``"closed"`` when every vertex has even order and
    ``"anchored"`` otherwise (its odd vertices then lie on ``boundary q(D)``).
    ``touches_boundary`` records contact with ``boundary q(D)`` when the
    domain is known.
    """

    segments: frozenset
    kind: str
    touches_boundary: bool = False

    @property
    def length(self) -> int:
        return len(self.segments)

    def degrees(self) -> dict[Site, int]:
        return _degrees(self.segments)

    def odd_vertices(self) -> list[Site]:
        return sorted(v for v, d in self.degrees().items() if d % 2)


def _degrees(segments) -> dict[Site, int]:
    deg: dict[Site, int] = defaultdict(int)
    for a, b in segments:
        deg[a] += 1
        deg[b] += 1
    return deg


def _adjacency(segments) -> dict[Site, list[Site]]:
    adj: dict[Site, list[Site]] = defaultdict(list)
    for a, b in segments:
        adj[a].append(b)
        adj[b].append(a)
    return adj


CurveLike = Union[Trail, InterfaceGraph, InterfaceSet, Iterable[Segment]]


def _segments_of(curve: CurveLike) -> frozenset:
    if isinstance(curve, Trail):
        return frozenset(curve.segments())
    if isinstance(curve, InterfaceGraph):
        return curve.segments
    if isinstance(curve, InterfaceSet):
        return frozenset(curve.segments)
    return frozenset(_norm(s) for s in curve)


def components(sigma: CurveLike, D: Domain | None = None) -> list[InterfaceGraph]:
    """Split a segment set into connected components (sorted by smallest segment)."""
    segs = _segments_of(sigma)
    adj = _adjacency(segs)
    on_boundary = q_of(D).boundary_vertices() if D is not None else set()
    seen: set[Site] = set()
    out = []
    for start in sorted(adj):
        if start in seen:
            continue
        stack, comp = [start], {start}
        seen.add(start)
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    comp.add(w)
                    stack.append(w)
        cs = frozenset(s for s in segs if s[0] in comp)
        even = all(d % 2 == 0 for d in _degrees(cs).values())
        out.append(InterfaceGraph(cs, "closed" if even else "anchored",
                                  bool(comp & on_boundary)))
    out.sort(key=lambda g: min(g.segments))
    return out


def euler_circuit(C: CurveLike) -> Trail:
    """Closed trail traversing every segment of ``C`` exactly once (Hierholzer)."""
    segs = _segments_of(C)
    if not segs:
        raise NotEulerianError("empty graph")
    deg = _degrees(segs)
    odd = [v for v, d in deg.items() if d % 2]
    if odd:
        raise NotEulerianError(f"vertex {min(odd)} has odd order")
    if len(components(segs)) != 1:
        raise NotEulerianError("graph is not connected")

    def order(v, w):
        return STEPS.index((w[0] - v[0], w[1] - v[1]))

    adj = {v: sorted(ws, key=lambda w, v=v: order(v, w), reverse=True)
           for v, ws in _adjacency(segs).items()}
    used: set[Segment] = set()
    start = min(adj)
    stack, circuit = [start], []
    while stack:
        v = stack[-1]
        nbrs = adj[v]
        while nbrs and _norm((v, nbrs[-1])) in used:
            nbrs.pop()
        if nbrs:
            w = nbrs.pop()
            used.add(_norm((v, w)))
            stack.append(w)
        else:
            circuit.append(stack.pop())
    return Trail(tuple(reversed(circuit)))


def two_color(curve: CurveLike) -> frozenset:
    """Lattice sites enclosed by a closed dual curve, by ray-crossing parity.

    From each site a ray runs in the ``+x`` direction through cell centres,
    so it meets dual segments only at their midpoints and never at a vertex.
    A site is inside when the ray crosses the curve an odd number of times.
    Every vertex must have even order, which makes the parity independent
    of the ray direction.
    """
    segs = _segments_of(curve)
    deg = _degrees(segs)
    odd = [v for v, d in deg.items() if d % 2]
    if odd:
        raise ColoringError(f"curve is open at {min(odd)}")
    # vertical segment (a, b)-(a, b+1) separates sites (a, b+1) and (a+1, b+1)
    rows: dict[int, list[int]] = defaultdict(list)
    for (a, b), (c, d) in segs:
        if a == c:
            rows[b + 1].append(a)
    inside = set()
    for y, cols in rows.items():
        cols.sort()
        for k in range(0, len(cols), 2):
            # crossings at columns cols[k] < cols[k+1]: sites strictly between
            # have an odd number of segments to their right
            inside.update((x, y) for x in range(cols[k] + 1, cols[k + 1] + 1))
    return frozenset(inside)


class FlipResult(NamedTuple):
    config: SpinConfig
    delta_direct: int
    delta_formula: int
    inside: frozenset


def flip_inside(u: SpinConfig, curve: CurveLike, system: SpinSystem,
                D: Domain | None = None) -> FlipResult:
    """Flip ``u`` on the sites enclosed by ``curve`` and report ``F(u) - F(u~)``.

    ``delta_direct`` is the difference of two energy evaluations.
    ``delta_formula`` only looks at the curve: each crossed bond of the
    domain lying on the interface contributes ``+2`` if ferromagnetic and
    ``-2`` if antiferromagnetic, so a piece of the interface of length ``l``
    crossing ``mu`` antiferromagnetic bonds contributes ``2 (l - 2 mu)``;
    crossed bonds off the interface contribute with the opposite sign.
    """
    if D is not None and D != u.domain:
        u = _restrict(u, D)
    dom = u.domain
    segs = _segments_of(curve)
    inside = two_color(segs)
    flipped = u.flipped(s for s in inside if s in dom)
    direct = energy(u, system) - energy(flipped, system)

    l_in = mu_in = l_out = mu_out = 0
    for seg in segs:
        bond = crossed_bond(*seg)
        i, j = bond.endpoints
        if i not in dom or j not in dom:
            continue
        af = system.coupling(bond) == -1
        if u[i] != u[j]:
            l_in += 1
            mu_in += af
        else:
            l_out += 1
            mu_out += af
    formula = 2 * (l_in - 2 * mu_in) - 2 * (l_out - 2 * mu_out)
    return FlipResult(flipped, direct, formula, inside)


@dataclass(frozen=True)
class MajorityReport:
    majority_value: int
    minority_components: list  # (site count, boundary length) per 4-connected component
    max_boundary_length: int
    majority_fraction: float

    def to_dict(self) -> dict:
        return {
            "majority_value": self.majority_value,
            "minority_components": [list(c) for c in self.minority_components],
            "max_boundary_length": self.max_boundary_length,
            "majority_fraction": self.majority_fraction,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> MajorityReport:
        return cls(int(d["majority_value"]), [tuple(c) for c in d["minority_components"]],
                   int(d["max_boundary_length"]), float(d["majority_fraction"]))


_FOUR = ndimage.generate_binary_structure(2, 1)


def majority_report(u: SpinConfig, D: Domain | None = None) -> MajorityReport:
    """Majority value (ties go to +1) and the minority's 4-connected components.

    The boundary length of a component is the number of unit segments on
    the boundary of the union of its closed cells.
    """
    if D is not None and D != u.domain:
        u = _restrict(u, D)
    s = u.spins
    n = u.domain.n_sites
    n_plus = int((s == 1).sum())
    majority = 1 if 2 * n_plus >= n else -1
    minority = s == -majority
    labels, count = ndimage.label(minority, structure=_FOUR)
    cells = np.bincount(labels.ravel(), minlength=count + 1)
    same_h = (labels[:, :-1] == labels[:, 1:]) & (labels[:, :-1] > 0)
    same_v = (labels[:-1, :] == labels[1:, :]) & (labels[:-1, :] > 0)
    pairs = (np.bincount(labels[:, :-1][same_h], minlength=count + 1)
             + np.bincount(labels[:-1, :][same_v], minlength=count + 1))
    comps = [(int(cells[k]), int(4 * cells[k] - 2 * pairs[k])) for k in range(1, count + 1)]
    n_major = n_plus if majority == 1 else n - n_plus
    return MajorityReport(majority, comps, max((b for _, b in comps), default=0), n_major / n)
