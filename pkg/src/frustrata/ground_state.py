"""Minimisation of ``F(., D)`` over spin configurations.

Three solvers share one result type:

* :func:`brute_force_ground` scans every configuration (small domains);
* :func:`dp_ground` is a site-by-site profile dynamic program whose state is
  the last ``m`` spins of the scan, ``m`` being the short side of the
  domain's bounding box;
* :func:`local_search_ground` is simulated annealing over single-site and
  cluster flips, for domains too large for the exact methods.

The exact solvers return the same canonical minimiser: scanning sites in
:meth:`Domain.sites` order, the first site carries ``+1`` and the rest of
the string is lexicographically smallest with ``-1 < +1``. Ground states
come in ``+-`` pairs, so such a minimiser always exists.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

import numpy as np

from .caps import get_cap
from .errors import CapacityError
from .lattice import Domain, SpinConfig, SpinSystem, energy

METHODS = ("brute", "dp", "local")


@dataclass(frozen=True)
class GroundStateResult:
    config: SpinConfig
    energy: int
    method: str
    optimal: bool

    def to_dict(self) -> dict:
        return {
            "energy": int(self.energy),
            "optimal": bool(self.optimal),
            "method": self.method,
            "spins": self.config.spins.astype(int).tolist(),
            "origin": list(self.config.domain.origin),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> GroundStateResult:
        spins = np.array(d["spins"], dtype=np.int8)
        domain = Domain(spins != 0, tuple(d.get("origin", (0, 0))))
        config = SpinConfig(domain, spins[_bbox(spins != 0)])
        return cls(config, int(d["energy"]), d["method"], bool(d["optimal"]))


def _bbox(mask):
    rows, cols = np.flatnonzero(mask.any(axis=1)), np.flatnonzero(mask.any(axis=0))
    return slice(rows[0], rows[-1] + 1), slice(cols[0], cols[-1] + 1)


def _site_graph(system: SpinSystem, D: Domain):
    """Canonical site list, index map and the in-domain bonds as index pairs."""
    D.check_inside(system)
    sites = D.sites()
    index = {s: k for k, s in enumerate(sites)}
    a, b, c = [], [], []
    for bond in D.bonds():
        i, j = bond.endpoints
        a.append(index[i])
        b.append(index[j])
        c.append(system.coupling(bond))
    return sites, index, np.array(a, np.int64), np.array(b, np.int64), np.array(c, np.int64)


def _config_from_bits(D: Domain, sites, bits) -> SpinConfig:
    x0, y0 = D.origin
    spins = np.zeros(D.mask.shape, np.int8)
    for (x, y), bit in zip(sites, bits):
        spins[y - y0, x - x0] = 1 if bit else -1
    return SpinConfig(D, spins)


def _half_table(n_bits: int, local: list[tuple[int, int, int]]):
    """Spins (``2**n_bits x n_bits``, bit 1 = +1, first site = MSB) and the
    energy of the bonds inside the half for every assignment."""
    k = np.arange(1 << n_bits, dtype=np.int64)
    shifts = n_bits - 1 - np.arange(n_bits)
    spins = np.where((k[:, None] >> shifts) & 1, 1.0, -1.0) if n_bits else np.ones((1, 0))
    e = np.zeros(len(k))
    for i, j, c in local:
        e -= c * spins[:, i] * spins[:, j]
    return spins, e


def brute_force_ground(system: SpinSystem, D: Domain, cap: int | None = None,
                       chunk: int = 1 << 22) -> GroundStateResult:
    """Exhaustive minimisation over all ``2**n`` configurations.

    Configuration ``k`` gives site ``j`` (canonical order) the bit
    ``(k >> (n-1-j)) & 1``, bit 1 meaning ``+1``, so among minimisers with a
    leading ``+1`` the smallest ``k`` is the canonical one. The sites are
    split into a leading and a trailing half; the energies of both halves
    are tabulated once and every pair is scored through one matrix product
    for the bonds between the halves, ``chunk`` configurations at a time.
    """
    cap = get_cap("brute_sites") if cap is None else cap
    n = D.n_sites
    if n > cap:
        raise CapacityError(f"brute force needs {n} sites <= brute_sites cap {cap}",
                            "brute_sites", cap)
    sites, _, a, b, c = _site_graph(system, D)
    na = (n + 1) // 2
    nb = n - na
    in_a, in_b, cross = [], [], []
    for i, j, cc in zip(a.tolist(), b.tolist(), c.tolist()):
        i, j = min(i, j), max(i, j)
        if j < na:
            in_a.append((i, j, cc))
        elif i >= na:
            in_b.append((i - na, j - na, cc))
        else:
            cross.append((i, j - na, cc))
    spins_a, e_a = _half_table(na, in_a)
    spins_b, e_b = _half_table(nb, in_b)
    ia = [i for i, _, _ in cross]
    jb = [j for _, j, _ in cross]
    cc = np.array([x for _, _, x in cross], dtype=float)
    left = spins_a[:, ia] * -cc
    right = spins_b[:, jb].T

    # only the upper half of the A table has a leading +1
    lo_a, hi_a = (1 << na) >> 1, 1 << na
    rows = max(1, chunk >> nb)
    best_e, best_k = None, None
    for r0 in range(lo_a, hi_a, rows):
        r1 = min(hi_a, r0 + rows)
        block = e_a[r0:r1, None] + e_b[None, :] + left[r0:r1] @ right
        pos = int(np.argmin(block))
        e_min = int(round(block.flat[pos]))
        if best_e is None or e_min < best_e:
            best_e, best_k = e_min, ((r0 + pos // (1 << nb)) << nb) | (pos % (1 << nb))
    bits = [(best_k >> (n - 1 - j)) & 1 for j in range(n)]
    config = _config_from_bits(D, sites, bits)
    assert energy(config, system) == best_e
    return GroundStateResult(config, best_e, "brute", True)


def _frame(system: SpinSystem, D: Domain):
    """Mask and couplings in the scan frame (transposed for wide domains)."""
    h, v = D.window_couplings(system)
    if D.row_major:
        return D.mask, h, v
    return D.mask.T, v.T, h.T


def dp_ground(system: SpinSystem, D: Domain, cap: int | None = None) -> GroundStateResult:
    """Exact minimisation by a profile dynamic program.

    Sites are scanned in canonical order. Before site ``(x, y)`` of the scan
    frame is assigned, bit ``x`` of the profile holds the spin above it and
    bit ``x - 1`` the spin to its left. A backward pass computes, for every
    site and profile, the optimal cost of the remaining sites and whether
    ``-1`` is an optimal choice; the forward pass then reads off the
    canonical minimiser. Cost is ``O(n_sites * 2**m)`` time and
    ``n_sites * 2**m`` bits of memory.
    """
    cap = get_cap("dp_width") if cap is None else cap
    m = min(D.width, D.height)
    if m > cap:
        raise CapacityError(f"dp needs short side {m} <= dp_width cap {cap}", "dp_width", cap)
    D.check_inside(system)
    mask, h, v = _frame(system, D)
    rows, width = mask.shape
    n_states = 1 << width
    spin_of_bit = np.array([-1, 1], np.int64)

    value = np.zeros(n_states, np.int64)
    minus_ok: list[np.ndarray | None] = [None] * (rows * width)
    for s in range(rows * width - 1, -1, -1):
        y, x = divmod(s, width)
        hi, lo = n_states >> (x + 1), 1 << x
        nxt = value.reshape(hi, 2, lo)
        if not mask[y, x]:
            value = np.broadcast_to(nxt[:, :1, :], (hi, 2, lo)).reshape(-1).copy()
            continue
        field = np.zeros((1, 2, lo), np.int64)
        if y > 0 and v[y - 1, x]:
            field += v[y - 1, x] * spin_of_bit[None, :, None]
        if x > 0 and h[y, x - 1]:
            left = spin_of_bit[(np.arange(lo) >> (x - 1)) & 1]
            field += h[y, x - 1] * left[None, None, :]
        # choosing spin s costs -s * field
        cand_minus = field + nxt[:, None, 0, :]
        cand_plus = -field + nxt[:, None, 1, :]
        minus_ok[s] = np.packbits((cand_minus <= cand_plus).reshape(-1))
        value = np.minimum(cand_minus, cand_plus).reshape(-1)
    best = int(value[0])

    spins = np.zeros(mask.shape, np.int8)
    profile = 0
    first = True
    for s in range(rows * width):
        y, x = divmod(s, width)
        if not mask[y, x]:
            profile &= ~(1 << x)
            continue
        if first:
            spin, first = 1, False
        else:
            byte = minus_ok[s][profile >> 3]
            spin = -1 if (byte >> (7 - (profile & 7))) & 1 else 1
        spins[y, x] = spin
        profile = profile | (1 << x) if spin == 1 else profile & ~(1 << x)
    if not D.row_major:
        spins = spins.T
    config = SpinConfig(D, spins)
    e = energy(config, system)
    assert e == best, (e, best)
    return GroundStateResult(config, best, "dp", True)


def local_search_ground(system: SpinSystem, D: Domain, seed: int, steps: int | None = None,
                        t_start: float = 3.0, t_end: float = 0.05,
                        cluster_rate: float = 0.2) -> GroundStateResult:
    """Simulated annealing from the constant configuration.

    Proposals are single-site flips or, with probability ``cluster_rate``,
    the flip of the 4-connected equal-spin cluster containing a random site
    (only when the cluster holds at most half of the domain). Temperatures
    decay geometrically from ``t_start`` to ``t_end``. ``steps`` defaults to
    ``1e5`` proposals per 256 sites (at least 2000). The best configuration
    seen is returned, so the energy never exceeds that of ``u = +1``.
    """
    sites, index, a, b, c = _site_graph(system, D)
    n = len(sites)
    nbrs: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for i, j, cc in zip(a.tolist(), b.tolist(), c.tolist()):
        nbrs[i].append((j, cc))
        nbrs[j].append((i, cc))
    if steps is None:
        steps = max(2000, round(1e5 * n / 256))

    rng = np.random.default_rng(seed)
    picks = rng.integers(0, n, size=steps).tolist()
    coins = rng.random(steps).tolist()
    accept = rng.random(steps).tolist()
    ratio = (t_end / t_start) ** (1.0 / max(1, steps - 1))

    s = [1] * n
    e = -int(c.sum())
    best_e, best_s = e, s[:]
    temp = t_start
    for t in range(steps):
        i = picks[t]
        if coins[t] < cluster_rate:
            cluster = _cluster(i, s, nbrs)
            if 2 * len(cluster) > n:
                temp *= ratio
                continue
            de = 0
            for k in cluster:
                for j, cc in nbrs[k]:
                    if j not in cluster:
                        de += 2 * cc * s[k] * s[j]
        else:
            cluster = (i,)
            de = 2 * s[i] * sum(cc * s[j] for j, cc in nbrs[i])
        if de <= 0 or accept[t] < np.exp(-de / temp):
            for k in cluster:
                s[k] = -s[k]
            e += de
            if e < best_e:
                best_e, best_s = e, s[:]
        temp *= ratio

    config = _config_from_bits(D, sites, [x > 0 for x in best_s])
    return GroundStateResult(config, best_e, "local", False)


def _cluster(i: int, s: list[int], nbrs) -> set[int]:
    seen = {i}
    queue = deque([i])
    while queue:
        k = queue.popleft()
        for j, _ in nbrs[k]:
            if j not in seen and s[j] == s[i]:
                seen.add(j)
                queue.append(j)
    return seen


def solve(system: SpinSystem, D: Domain, method: str = "dp", seed: int = 0,
          steps: int | None = None) -> GroundStateResult:
    if method == "brute":
        return brute_force_ground(system, D)
    if method == "dp":
        return dp_ground(system, D)
    if method == "local":
        return local_search_ground(system, D, seed, steps)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
