"""Square-lattice geometry, coupling generation, trails and the energy.

Conventions
-----------
A coupling window of ``width x height`` sites has origin ``(0, 0)``.
Horizontal couplings ``h[y, x]`` belong to the bond ``(x, y)-(x+1, y)`` and
vertical couplings ``v[y, x]`` to ``(x, y)-(x, y+1)``; both arrays are
row-major and hold ``+1`` (ferromagnetic) or ``-1`` (antiferromagnetic).

A trail is a walk on the lattice that never reuses a unit segment (sites may
repeat). Shifted by ``(1/2, 1/2)`` it becomes a curve on the dual lattice,
and each step crosses exactly one primal bond, see :func:`crossed_bond`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

import numpy as np

from .errors import ConcatenationError, DomainError, LatticeRangeError, ParameterError

Site = tuple[int, int]

HORIZONTAL = 0
VERTICAL = 1

# unit steps on the lattice, in the fixed order used by all searches
STEPS: tuple[Site, ...] = ((1, 0), (0, 1), (-1, 0), (0, -1))


class Bond(NamedTuple):
    """Nearest-neighbour pair, stored as its lower-left endpoint plus an axis.

    ``Bond(x, y, HORIZONTAL)`` is ``{(x, y), (x+1, y)}`` and
    ``Bond(x, y, VERTICAL)`` is ``{(x, y), (x, y+1)}``.
    """

    x: int
    y: int
    axis: int

    @classmethod
    def between(cls, i: Site, j: Site) -> Bond:
        (xi, yi), (xj, yj) = i, j
        if abs(xi - xj) + abs(yi - yj) != 1:
            raise ParameterError(f"{i} and {j} are not nearest neighbours")
        a, b = min(i, j), max(i, j)
        return cls(a[0], a[1], HORIZONTAL if a[1] == b[1] else VERTICAL)

    @property
    def endpoints(self) -> tuple[Site, Site]:
        if self.axis == HORIZONTAL:
            return (self.x, self.y), (self.x + 1, self.y)
        return (self.x, self.y), (self.x, self.y + 1)


def crossed_bond(i: Site, j: Site) -> Bond:
    """Primal bond whose segment is the common edge of the squares ``i + [0,1]^2``
    and ``j + [0,1]^2``.

    A horizontal step from ``(x, y)`` crosses ``{(x+1, y), (x+1, y+1)}``; a
    vertical step from ``(x, y)`` crosses ``{(x, y+1), (x+1, y+1)}``. The
    result does not depend on the direction of the step.
    """
    (xi, yi), (xj, yj) = i, j
    if abs(xi - xj) + abs(yi - yj) != 1:
        raise ParameterError(f"step {i} -> {j} is not a unit step")
    if yi == yj:
        return Bond(max(xi, xj), yi, VERTICAL)
    return Bond(xi, max(yi, yj), HORIZONTAL)


def _segment(i: Site, j: Site) -> tuple[Site, Site]:
    return (i, j) if i <= j else (j, i)


# ---------------------------------------------------------------------------
# couplings

@dataclass(frozen=True, eq=False)
class PeriodCell:
    """Couplings of one period of an N-periodic system.

    ``h[y, x]`` is the bond ``(x, y)-(x+1, y)`` and ``v[y, x]`` the bond
    ``(x, y)-(x, y+1)`` for ``0 <= x, y < N``; translates by multiples of N
    in either axis carry the same coupling. The canonical bond index runs
    over the ``N*N`` horizontal bonds row-major, then the vertical ones.
    """

    N: int
    h: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        if self.N < 1:
            raise ParameterError("period must be >= 1")
        h = _coupling_array(self.h, (self.N, self.N), "h")
        v = _coupling_array(self.v, (self.N, self.N), "v")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "v", v)

    @classmethod
    def ferro(cls, N: int) -> PeriodCell:
        return cls(N, np.ones((N, N), np.int8), np.ones((N, N), np.int8))

    @classmethod
    def from_af_indices(cls, N: int, indices: Iterable[int]) -> PeriodCell:
        flat = np.ones(2 * N * N, np.int8)
        idx = np.fromiter(indices, dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= 2 * N * N):
            raise ParameterError("bond index out of range")
        flat[idx] = -1
        return cls(N, flat[: N * N].reshape(N, N), flat[N * N:].reshape(N, N))

    @property
    def couplings(self) -> np.ndarray:
        """All ``2 N^2`` couplings in canonical bond order."""
        return np.concatenate([self.h.ravel(), self.v.ravel()])

    @property
    def af_count(self) -> int:
        return int(np.count_nonzero(self.couplings == -1))

    @property
    def cell_id(self) -> int:
        """Integer whose binary digits mark the antiferromagnetic bonds."""
        return sum(1 << int(b) for b in np.flatnonzero(self.couplings == -1))

    def __eq__(self, other):
        if not isinstance(other, PeriodCell):
            return NotImplemented
        return (self.N == other.N and np.array_equal(self.h, other.h)
                and np.array_equal(self.v, other.v))

    __hash__ = None


def _coupling_array(a, shape, name) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    if arr.size != shape[0] * shape[1]:
        raise ParameterError(f"{name} couplings must have shape {shape}")
    arr = arr.reshape(shape)
    if not np.all(np.abs(arr) == 1):
        raise ParameterError(f"{name} couplings must be +1 or -1")
    arr = arr.astype(np.int8)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SpinSystem:
    """Couplings on a finite ``width x height`` window of the square lattice."""

    width: int
    height: int
    h: np.ndarray
    v: np.ndarray
    provenance: dict = field(default_factory=lambda: {"kind": "explicit"})

    def __post_init__(self):
        if self.width < 2 or self.height < 2:
            raise ParameterError("window must be at least 2x2 sites")
        object.__setattr__(self, "h", _coupling_array(self.h, (self.height, self.width - 1), "h"))
        object.__setattr__(self, "v", _coupling_array(self.v, (self.height - 1, self.width), "v"))

    @classmethod
    def uniform(cls, width: int, height: int, value: int = 1) -> SpinSystem:
        return cls(width, height,
                   np.full((height, width - 1), value, np.int8),
                   np.full((height - 1, width), value, np.int8))

    @property
    def n_bonds(self) -> int:
        return self.h.size + self.v.size

    @property
    def af_count(self) -> int:
        return int(np.count_nonzero(self.h == -1) + np.count_nonzero(self.v == -1))

    def has_bond(self, bond: Bond) -> bool:
        x, y, axis = bond
        if axis == HORIZONTAL:
            return 0 <= x < self.width - 1 and 0 <= y < self.height
        return 0 <= x < self.width and 0 <= y < self.height - 1

    def coupling(self, bond: Bond) -> int:
        if not self.has_bond(bond):
            raise LatticeRangeError(f"bond {bond} lies outside the {self.width}x{self.height} window")
        x, y, axis = bond
        return int(self.h[y, x] if axis == HORIZONTAL else self.v[y, x])

    def gauge(self, site: Site) -> SpinSystem:
        """System with the sign of every bond incident to ``site`` reversed."""
        x, y = site
        h, v = self.h.copy(), self.v.copy()
        if x > 0:
            h[y, x - 1] *= -1
        if x < self.width - 1:
            h[y, x] *= -1
        if y > 0:
            v[y - 1, x] *= -1
        if y < self.height - 1:
            v[y, x] *= -1
        return SpinSystem(self.width, self.height, h, v, {"kind": "explicit"})

    def __eq__(self, other):
        if not isinstance(other, SpinSystem):
            return NotImplemented
        return (self.width == other.width and self.height == other.height
                and np.array_equal(self.h, other.h) and np.array_equal(self.v, other.v)
                and self.provenance == other.provenance)

    __hash__ = None


def bond_uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Uniform variates for bond indices ``start .. start+count-1``.

    The variate of bond ``b`` is output ``b`` of a Philox stream keyed by
    ``seed``. Philox is counter based, so any slice can be produced without
    drawing the ones before it and chunked generation equals one-shot
    generation.
    """
    if not 0 <= seed < 2**64:
        raise ParameterError("seed must be a 64-bit unsigned integer")
    bit_gen = np.random.Philox(key=seed)
    # Philox emits blocks of four 64-bit words; advance() counts blocks
    bit_gen.advance(start // 4)
    skip = start % 4
    return np.random.Generator(bit_gen).random(skip + count)[skip:]


def gen_random(p: float, width: int, height: int, seed: int) -> SpinSystem:
    """Bernoulli couplings: each bond is antiferromagnetic with probability ``p``.

    Bond indices enumerate the horizontal bonds row-major, then the vertical
    ones; bond ``b`` is antiferromagnetic iff its uniform variate is ``< p``.
    Systems drawn with the same seed are therefore nested in ``p``.
    """
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p={p} is not a probability")
    if width < 2 or height < 2:
        raise ParameterError("window must be at least 2x2 sites")
    n_h = (width - 1) * height
    n_v = width * (height - 1)
    u = bond_uniforms(seed, 0, n_h + n_v)
    c = np.where(u < p, -1, 1).astype(np.int8)
    return SpinSystem(width, height, c[:n_h].reshape(height, width - 1),
                      c[n_h:].reshape(height - 1, width),
                      {"kind": "random", "p": float(p), "seed": int(seed)})


def gen_periodic(cell: PeriodCell, width: int, height: int) -> SpinSystem:
    """Tile a window with the couplings of ``cell``."""
    N = cell.N
    if width < N or height < N or width < 2 or height < 2:
        raise ParameterError(f"window {width}x{height} is smaller than the period {N}")
    ys, xs = np.arange(height) % N, np.arange(width) % N
    h = cell.h[np.ix_(ys, xs[: width - 1])]
    v = cell.v[np.ix_(ys[: height - 1], xs)]
    return SpinSystem(width, height, h, v,
                      {"kind": "periodic", "N": N, "cell_id": cell.cell_id})


# ---------------------------------------------------------------------------
# trails

@dataclass(frozen=True)
class Trail:
    """Edge-distinct lattice walk ``(i_0, ..., i_k)``."""

    sites: tuple[Site, ...]

    def __post_init__(self):
        sites = tuple((int(x), int(y)) for x, y in self.sites)
        if not sites:
            raise ParameterError("a trail needs at least one site")
        seen = set()
        for a, b in zip(sites, sites[1:]):
            if abs(a[0] - b[0]) + abs(a[1] - b[1]) != 1:
                raise ParameterError(f"{a} -> {b} is not a unit step")
            seg = _segment(a, b)
            if seg in seen:
                raise ParameterError(f"segment {seg} is used twice")
            seen.add(seg)
        object.__setattr__(self, "sites", sites)

    @property
    def length(self) -> int:
        return len(self.sites) - 1

    @property
    def closed(self) -> bool:
        return self.length > 0 and self.sites[0] == self.sites[-1]

    @property
    def start(self) -> Site:
        return self.sites[0]

    @property
    def end(self) -> Site:
        return self.sites[-1]

    def segments(self) -> list[tuple[Site, Site]]:
        return [_segment(a, b) for a, b in zip(self.sites, self.sites[1:])]

    def crossed_bonds(self) -> list[Bond]:
        return [crossed_bond(a, b) for a, b in zip(self.sites, self.sites[1:])]

    def dual_points(self) -> list[tuple[float, float]]:
        """Vertices of the dual curve (the trail shifted by (1/2, 1/2))."""
        return [(x + 0.5, y + 0.5) for x, y in self.sites]

    def __len__(self):
        return self.length


def mu(trail: Trail, system: SpinSystem) -> int:
    """Number of antiferromagnetic bonds crossed by the dual curve of ``trail``."""
    return sum(1 for b in trail.crossed_bonds() if system.coupling(b) == -1)


def concat(g: Trail, d: Trail) -> Trail:
    if g.end != d.start:
        raise ConcatenationError(f"{g.end} != {d.start}")
    try:
        return Trail(g.sites + d.sites[1:])
    except ParameterError as exc:
        raise ConcatenationError(str(exc)) from None


# ---------------------------------------------------------------------------
# domains and spin configurations

@dataclass(frozen=True, eq=False)
class Domain:
    """Finite set of sites, stored as a boolean mask over its bounding box.

    ``mask[y, x]`` marks site ``(origin[0] + x, origin[1] + y)``.
    """

    mask: np.ndarray
    origin: Site = (0, 0)

    def __post_init__(self):
        mask = np.array(self.mask, dtype=bool)
        if mask.ndim != 2 or not mask.any():
            raise ParameterError("a domain must be a nonempty 2-D site mask")
        # shrink to the bounding box so equal site sets compare equal
        rows, cols = np.flatnonzero(mask.any(axis=1)), np.flatnonzero(mask.any(axis=0))
        mask = mask[rows[0]: rows[-1] + 1, cols[0]: cols[-1] + 1].copy()
        mask.setflags(write=False)
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "origin", (int(self.origin[0]) + int(cols[0]),
                                            int(self.origin[1]) + int(rows[0])))

    @classmethod
    def rect(cls, width: int, height: int, origin: Site = (0, 0)) -> Domain:
        if width < 1 or height < 1:
            raise ParameterError("rectangle must have positive size")
        return cls(np.ones((height, width), bool), origin)

    @classmethod
    def from_sites(cls, sites: Iterable[Site]) -> Domain:
        sites = list(sites)
        if not sites:
            raise ParameterError("a domain must be nonempty")
        xs, ys = zip(*sites)
        x0, y0 = min(xs), min(ys)
        mask = np.zeros((max(ys) - y0 + 1, max(xs) - x0 + 1), bool)
        for x, y in sites:
            mask[y - y0, x - x0] = True
        return cls(mask, (x0, y0))

    @property
    def width(self) -> int:
        return self.mask.shape[1]

    @property
    def height(self) -> int:
        return self.mask.shape[0]

    @property
    def is_rect(self) -> bool:
        return bool(self.mask.all())

    @property
    def n_sites(self) -> int:
        return int(self.mask.sum())

    @property
    def row_major(self) -> bool:
        """Canonical scan direction: rows for tall or square boxes, columns for wide ones."""
        return self.width <= self.height

    def sites(self) -> list[Site]:
        """Domain sites in canonical order.

        The order scans along the short side of the bounding box, so it is
        row-major ``(y, x)`` when ``width <= height`` and column-major
        otherwise. Ground-state tie-breaks are defined in this order.
        """
        x0, y0 = self.origin
        ys, xs = np.nonzero(self.mask)
        pts = [(int(x) + x0, int(y) + y0) for x, y in zip(xs, ys)]
        if self.row_major:
            return pts  # np.nonzero is already row-major
        return sorted(pts)

    def __contains__(self, site) -> bool:
        x, y = site[0] - self.origin[0], site[1] - self.origin[1]
        return 0 <= x < self.width and 0 <= y < self.height and bool(self.mask[y, x])

    def bonds(self) -> list[Bond]:
        """Nearest-neighbour pairs with both endpoints in the domain."""
        x0, y0 = self.origin
        m = self.mask
        out = [Bond(int(x) + x0, int(y) + y0, HORIZONTAL)
               for y, x in zip(*np.nonzero(m[:, :-1] & m[:, 1:]))]
        out += [Bond(int(x) + x0, int(y) + y0, VERTICAL)
                for y, x in zip(*np.nonzero(m[:-1, :] & m[1:, :]))]
        return out

    @property
    def n_bonds(self) -> int:
        m = self.mask
        return int((m[:, :-1] & m[:, 1:]).sum() + (m[:-1, :] & m[1:, :]).sum())

    def check_inside(self, system: SpinSystem) -> None:
        x0, y0 = self.origin
        if x0 < 0 or y0 < 0 or x0 + self.width > system.width or y0 + self.height > system.height:
            raise LatticeRangeError("domain does not fit in the coupling window")

    def window_couplings(self, system: SpinSystem) -> tuple[np.ndarray, np.ndarray]:
        """Couplings restricted to the bounding box, zeroed on bonds leaving the domain."""
        self.check_inside(system)
        x0, y0 = self.origin
        w, hgt = self.width, self.height
        m = self.mask
        h = system.h[y0: y0 + hgt, x0: x0 + w - 1].astype(np.int64) * (m[:, :-1] & m[:, 1:])
        v = system.v[y0: y0 + hgt - 1, x0: x0 + w].astype(np.int64) * (m[:-1, :] & m[1:, :])
        return h, v

    def __eq__(self, other):
        if not isinstance(other, Domain):
            return NotImplemented
        return self.origin == other.origin and np.array_equal(self.mask, other.mask)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class SpinConfig:
    """Spins ``+-1`` on the sites of a domain.

    ``spins`` has the shape of ``domain.mask``; entries off the mask are 0.
    """

    domain: Domain
    spins: np.ndarray

    def __post_init__(self):
        s = np.array(self.spins, dtype=np.int8)
        if s.shape != self.domain.mask.shape:
            raise DomainError(f"spin array shape {s.shape} does not match domain {self.domain.mask.shape}")
        m = self.domain.mask
        if not np.all(np.abs(s[m]) == 1):
            raise DomainError("every domain site needs a spin of +1 or -1")
        s = np.where(m, s, 0).astype(np.int8)
        s.setflags(write=False)
        object.__setattr__(self, "spins", s)

    @classmethod
    def constant(cls, domain: Domain, value: int = 1) -> SpinConfig:
        return cls(domain, np.where(domain.mask, value, 0))

    @classmethod
    def from_dict(cls, domain: Domain, values: dict) -> SpinConfig:
        s = np.zeros(domain.mask.shape, np.int8)
        x0, y0 = domain.origin
        for (x, y), val in values.items():
            s[y - y0, x - x0] = val
        return cls(domain, s)

    def __getitem__(self, site: Site) -> int:
        if site not in self.domain:
            raise DomainError(f"{site} is not a domain site")
        return int(self.spins[site[1] - self.domain.origin[1], site[0] - self.domain.origin[0]])

    def __neg__(self) -> SpinConfig:
        return SpinConfig(self.domain, -self.spins)

    def flipped(self, sites: Iterable[Site]) -> SpinConfig:
        s = self.spins.copy()
        x0, y0 = self.domain.origin
        for x, y in sites:
            if (x, y) in self.domain:
                s[y - y0, x - x0] *= -1
        return SpinConfig(self.domain, s)

    def __eq__(self, other):
        if not isinstance(other, SpinConfig):
            return NotImplemented
        return self.domain == other.domain and np.array_equal(self.spins, other.spins)

    __hash__ = None


def energy(u: SpinConfig, system: SpinSystem, D: Domain | None = None) -> int:
    """``F(u, D) = -sum c_ij u_i u_j`` over bonds with both endpoints in ``D``.

    ``D`` defaults to the domain of ``u``; otherwise every site of ``D``
    must carry a spin of ``u``.
    """
    if D is None:
        D = u.domain
    elif D != u.domain:
        missing = [s for s in D.sites() if s not in u.domain]
        if missing:
            raise DomainError(f"u is undefined on {missing[0]}")
        x0, y0 = D.origin
        ux, uy = u.domain.origin
        spins = np.zeros(D.mask.shape, np.int8)
        for (x, y) in D.sites():
            spins[y - y0, x - x0] = u.spins[y - uy, x - ux]
        u = SpinConfig(D, spins)
    h, v = D.window_couplings(system)
    s = u.spins.astype(np.int64)
    return -int((h * s[:, :-1] * s[:, 1:]).sum() + (v * s[:-1, :] * s[1:, :]).sum())


def dual_edges_in(x0: int, y0: int, width: int, height: int) -> list[tuple[Site, Site]]:
    """All unit segments with both endpoints in the site rectangle."""
    out = []
    for y in range(y0, y0 + height):
        for x in range(x0, x0 + width):
            if x + 1 < x0 + width:
                out.append(((x, y), (x + 1, y)))
            if y + 1 < y0 + height:
                out.append(((x, y), (x, y + 1)))
    return out

