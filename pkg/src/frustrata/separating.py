"""Separating trails: detection, search, counting and tail estimates.

A trail of length ``k`` is separating when its dual curve crosses more
than ``k/2`` antiferromagnetic bonds (strictly). All logarithms are
natural.
"""
from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .caps import get_cap
from .errors import CapacityError, LatticeRangeError, ParameterError
from .lattice import STEPS, Site, SpinSystem, Trail, crossed_bond, gen_random, mu

LOG_BASE = math.e


def is_separating(trail: Trail, system: SpinSystem) -> bool:
    return 2 * mu(trail, system) > trail.length


@dataclass(frozen=True)
class SeparatingSearchResult:
    found: bool
    witness: Trail | None
    explored: int
    mode: str
    complete: bool


class _DualGraph:
    """Unit segments of a site rectangle with their crossed couplings."""

    def __init__(self, system: SpinSystem, window: tuple[int, int, int, int]):
        x0, y0, w, h = window
        if w < 1 or h < 1:
            raise ParameterError("empty search window")
        self.sites = [(x, y) for y in range(y0, y0 + h) for x in range(x0, x0 + w)]
        index = {s: k for k, s in enumerate(self.sites)}
        self.adj: list[list[tuple[int, int, int]]] = [[] for _ in self.sites]
        self.n_edges = 0
        self.n_af = 0
        for k, (x, y) in enumerate(self.sites):
            for dx, dy in STEPS:
                nb = (x + dx, y + dy)
                j = index.get(nb)
                if j is None or j < k:
                    continue
                bond = crossed_bond((x, y), nb)
                if not system.has_bond(bond):
                    raise LatticeRangeError(
                        f"window {window} crosses bond {bond} outside the coupling window")
                af = int(system.coupling(bond) == -1)
                e = self.n_edges
                self.adj[k].append((j, e, af))
                self.adj[j].append((k, e, af))
                self.n_edges += 1
                self.n_af += af
        # keep the neighbour order of STEPS for reproducible witnesses
        for k, (x, y) in enumerate(self.sites):
            self.adj[k].sort(key=lambda t, x=x, y=y: STEPS.index(
                (self.sites[t[0]][0] - x, self.sites[t[0]][1] - y)))


def search_separating(system: SpinSystem, window: tuple[int, int, int, int], min_len: int,
                      mode: str = "exhaustive", cap: int | None = None,
                      seed: int = 0, restarts: int = 200) -> SeparatingSearchResult:
    """Look for a separating trail with every site in ``window`` and length ``>= min_len``.

    ``window`` is ``(x0, y0, width, height)`` in sites. The exhaustive mode
    enumerates edge-distinct walks up to length ``cap`` by depth-first
    search and is complete up to that length. A branch is cut when no
    completion of length ``L`` with ``max(depth, min_len) <= L <= cap`` can
    satisfy ``2 mu > L``; since ``mu`` can grow by at most one per step and
    never beyond the number ``A`` of antiferromagnetic bonds crossed by the
    window's segments, this needs ``2 * ferro_so_far < L < 2 * A``. A
    trail longer than ``min_len`` that starts with a ferromagnetic crossing
    stays separating without that step, so such branches stop at
    ``min_len``.

    The heuristic mode runs randomised greedy walks that prefer
    antiferromagnetic crossings. A witness it returns is genuine, but
    ``found=False`` proves nothing.
    """
    if min_len < 1:
        raise ParameterError("min_len must be >= 1")
    graph = _DualGraph(system, window)
    if mode == "heuristic":
        return _heuristic(graph, min_len, cap or max(min_len, 2 * min_len), seed, restarts)
    if mode != "exhaustive":
        raise ParameterError(f"unknown search mode {mode!r}")
    cap = get_cap("search_len") if cap is None else cap
    if min_len > cap:
        raise CapacityError(f"min_len {min_len} exceeds search_len cap {cap}", "search_len", cap)

    hi = min(cap, 2 * graph.n_af - 1)
    adj = graph.adj
    used = bytearray(graph.n_edges)
    path: list[int] = []
    explored = 0

    def dfs(v: int, depth: int, n_af: int, top: int) -> bool:
        nonlocal explored
        explored += 1
        path.append(v)
        if depth >= min_len and 2 * n_af > depth:
            return True
        if depth < top:
            for w, e, af in adj[v]:
                if used[e]:
                    continue
                d1, a1 = depth + 1, n_af + af
                # dropping a leading ferromagnetic step keeps a trail separating,
                # so such trails only matter at the minimal length
                t1 = top if depth or af else min(top, max(min_len, 1))
                if max(d1, min_len, 2 * (d1 - a1) + 1) > t1:
                    continue
                used[e] = 1
                if dfs(w, d1, a1, t1):
                    return True
                used[e] = 0
        path.pop()
        return False

    if max(min_len, 1) <= hi:
        for start in range(len(graph.sites)):
            if dfs(start, 0, 0, hi):
                witness = Trail(tuple(graph.sites[k] for k in path))
                return SeparatingSearchResult(True, witness, explored, "exhaustive", True)
    return SeparatingSearchResult(False, None, explored, "exhaustive", True)


def _heuristic(graph: _DualGraph, min_len: int, max_len: int, seed: int,
               restarts: int) -> SeparatingSearchResult:
    rng = np.random.default_rng(seed)
    explored = 0
    for _ in range(restarts):
        v = int(rng.integers(len(graph.sites)))
        used: set[int] = set()
        path, n_af = [v], 0
        while len(path) - 1 < max_len:
            options = [(w, e, af) for w, e, af in graph.adj[v] if e not in used]
            if not options:
                break
            af_opts = [o for o in options if o[2]]
            pool = af_opts if af_opts and rng.random() < 0.9 else options
            w, e, af = pool[int(rng.integers(len(pool)))]
            used.add(e)
            path.append(w)
            n_af += af
            v = w
            explored += 1
            k = len(path) - 1
            if k >= min_len and 2 * n_af > k:
                witness = Trail(tuple(graph.sites[i] for i in path))
                return SeparatingSearchResult(True, witness, explored, "heuristic", False)
    return SeparatingSearchResult(False, None, explored, "heuristic", False)


# ---------------------------------------------------------------------------
# probabilities and counts

def _as_fraction(p) -> Fraction:
    if isinstance(p, Fraction):
        return p
    if isinstance(p, float):
        return Fraction(repr(p))  # decimal literal, so 0.1 means 1/10
    return Fraction(p)


@dataclass(frozen=True)
class TailProbability:
    k: int
    p: Fraction
    exact: Fraction
    bound: float
    holds: bool  # exact <= p**(k/2) * 2**k, decided in rational arithmetic


def separating_tail_probability(k: int, p) -> TailProbability:
    """``P(mu > k/2)`` for ``k`` independent bonds, next to the bound ``p^(k/2) 2^k``.

    ``mu`` is Binomial(k, p); the tail is summed exactly over rationals.
    The comparison with the bound squares both sides so it stays exact for
    odd ``k``.
    """
    if k < 1:
        raise ParameterError("k must be >= 1")
    q = _as_fraction(p)
    if not 0 <= q <= 1:
        raise ParameterError(f"p={p} is not a probability")
    exact = sum((math.comb(k, j) * q**j * (1 - q) ** (k - j) for j in range(k // 2 + 1, k + 1)),
                Fraction(0))
    holds = exact * exact <= q**k * 4**k
    return TailProbability(k, q, exact, float(q) ** (k / 2) * 2.0**k, holds)


def proof_chain_holds(p, k: int) -> bool:
    """``p^(k/2) 2^k 3^k <= 2^-k``, exactly (squared: ``p^k 36^k 4^k <= 1``)."""
    q = _as_fraction(p)
    return q**k * 144**k <= 1


def trail_count(k: int, cap: int | None = None) -> int:
    """Number of edge-distinct walks of length ``k`` from the origin of Z^2."""
    cap = get_cap("trail_count_len") if cap is None else cap
    if k < 0:
        raise ParameterError("k must be >= 0")
    if k > cap:
        raise CapacityError(f"trail_count({k}) exceeds trail_count_len cap {cap}",
                            "trail_count_len", cap)
    used: set[tuple[Site, Site]] = set()

    def count(v: Site, left: int) -> int:
        if left == 0:
            return 1
        total = 0
        for dx, dy in STEPS:
            w = (v[0] + dx, v[1] + dy)
            seg = (v, w) if v <= w else (w, v)
            if seg in used:
                continue
            used.add(seg)
            total += count(w, left - 1)
            used.discard(seg)
        return total

    # the four first steps are equivalent under rotation
    used.add(((0, 0), (1, 0)))
    n = count((1, 0), k - 1) if k else 1
    return 4 * n if k else 1


def threshold(n: float, kappa: float) -> int:
    """Minimal separating-trail length ``ceil((log n)^(1 + kappa))`` tested in a box of side n."""
    if n < 2:
        raise ParameterError("n must be >= 2")
    if kappa < 0:
        raise ParameterError("kappa must be > 0")
    return math.ceil(math.log(n) ** (1 + kappa))


def union_bound(p: float, n: int, L: int) -> float:
    """Upper bound on P(separating trail of length >= L starts in [0, n]^2).

    Sums ``(n+1)^2 * 4 * 3^(k-1) * p^(k/2) * 2^k`` over ``k >= L``: start
    sites times trails per start times the per-trail tail bound.
    """
    r = 6.0 * math.sqrt(p)
    if p == 0:
        return 0.0
    if r >= 1:
        return math.inf
    return (n + 1) ** 2 * (4.0 / 3.0) * r**L / (1 - r)


# ---------------------------------------------------------------------------
# the Monte Carlo experiment

@dataclass(frozen=True)
class Lemma1Row:
    p: float
    n: int
    kappa: float
    L: int
    trials: int
    hits: int
    frequency: float
    union_bound: float
    mode: str

    def as_dict(self) -> dict:
        return asdict(self)


LEMMA1_COLUMNS = ["p", "n", "kappa", "L", "trials", "hits", "frequency", "union_bound", "mode"]


def trial_seed(seed: int, trial: int) -> int:
    """Independent 64-bit seed for one trial, derived from ``(seed, trial)``."""
    return int(np.random.SeedSequence([seed, trial]).generate_state(1, np.uint64)[0])


def _one_trial(args) -> tuple[bool, bool]:
    p, n, L, seed, t, cap, mode = args
    system = gen_random(p, n + 2, n + 2, trial_seed(seed, t))
    window = (0, 0, n + 1, n + 1)
    if mode == "exhaustive":
        res = search_separating(system, window, L, "exhaustive", cap)
    else:
        res = search_separating(system, window, L, "heuristic", cap, seed=trial_seed(seed, t))
    return res.found, res.complete


def lemma1_experiment(p: float | Sequence[float], n: int, kappa: float, trials: int, seed: int,
                      cap: int | None = None, min_len: int | None = None,
                      workers: int = 1) -> list[Lemma1Row]:
    """Frequency of separating trails of length ``>= threshold(n, kappa)`` in ``Q_n``.

    Each trial draws Bernoulli couplings on the ``(n+2) x (n+2)`` window
    that holds every bond crossed by trails with sites in ``[0, n]^2``. Trial
    ``t`` uses the seed :func:`trial_seed` ``(seed, t)`` for every ``p``, so
    systems at smaller ``p`` have a subset of the antiferromagnetic bonds of
    those at larger ``p`` and hits are monotone in ``p``.

    The search is exhaustive up to length ``cap``; if the threshold exceeds
    the cap the greedy heuristic is used instead and the row is flagged
    ``mode="heuristic"`` (its frequency is then only a lower bound).
    """
    ps = [p] if np.isscalar(p) else list(p)
    cap = get_cap("search_len") if cap is None else cap
    L = threshold(n, kappa) if min_len is None else min_len
    mode = "exhaustive" if L <= cap else "heuristic"
    rows = []
    for pv in ps:
        if not 0 <= pv <= 1:
            raise ParameterError(f"p={pv} is not a probability")
        jobs = [(pv, n, L, seed, t, cap, mode) for t in range(trials)]
        if workers > 1:
            with ProcessPoolExecutor(workers) as pool:
                results = list(pool.map(_one_trial, jobs, chunksize=max(1, trials // (4 * workers))))
        else:
            results = [_one_trial(j) for j in jobs]
        hits = sum(found for found, _ in results)
        rows.append(Lemma1Row(float(pv), n, float(kappa), L, trials, hits,
                              hits / trials if trials else 0.0, union_bound(pv, n, L), mode))
    return rows


def rows_to_csv(rows: Iterable, columns: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        d = r.as_dict() if hasattr(r, "as_dict") else dict(r)
        writer.writerow({c: d[c] for c in columns})
    return buf.getvalue()
