"""Combinatorics of N-periodic systems with a fixed number of antiferromagnetic bonds.

``C_p(N)`` is the set of period cells with ``m = floor(2 p N^2)``
antiferromagnetic bonds among the ``2 N^2`` bonds of a period, and
``B^lambda_p(N)`` the subset admitting a separating trail of length at
least ``lambda N`` with all sites in the period square ``[0, N]^2`` (or in
some translate of it, for the ``translate`` variant). The module counts
both sets exactly or by sampling, evaluates the counting bound chain
(``f_p``, ``g_p``, ``theta``) and implements the decomposition of long
trails into pieces that each fit in a period square.
"""
from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

import mpmath
import numpy as np
from scipy import stats

from .caps import get_cap
from .errors import CapacityError, DomainError, ParameterError, PreconditionError
from .lattice import STEPS, PeriodCell, Site, Trail, gen_periodic, mu
from .separating import _as_fraction, search_separating, trial_seed


# ---------------------------------------------------------------------------
# census

@dataclass(frozen=True)
class CensusParams:
    N: int
    m: int
    lam: Fraction
    translate: bool = False
    p: Fraction | None = None

    def __post_init__(self):
        if self.N < 1:
            raise ParameterError("N must be >= 1")
        if not 0 <= self.m <= 2 * self.N**2:
            raise ParameterError(f"m={self.m} outside [0, 2N^2]")
        lam = _as_fraction(self.lam)
        if not 0 < lam < 1:
            raise ParameterError("lambda must lie in (0, 1)")
        object.__setattr__(self, "lam", lam)

    @classmethod
    def from_p(cls, N: int, p, lam, translate: bool = False) -> CensusParams:
        q = _as_fraction(p)
        if not 0 <= q <= 1:
            raise ParameterError(f"p={p} is not a probability")
        return cls(N, math.floor(2 * q * N * N), lam, translate, q)

    @property
    def n_bonds(self) -> int:
        return 2 * self.N**2

    @property
    def p_N(self) -> Fraction:
        return Fraction(self.m, self.n_bonds)

    @property
    def min_len(self) -> int:
        """Smallest integer length ``k >= lambda N``."""
        return max(1, math.ceil(self.lam * self.N))


@dataclass(frozen=True)
class CensusResult:
    params: CensusParams
    mode: str
    total: int
    bad: int | float
    ratio: Fraction | float
    bound_value: float
    trials: int = 0
    ci: tuple[float, float] | None = None

    def as_dict(self) -> dict:
        P = self.params
        return {
            "N": P.N, "m": P.m, "p": float(P.p) if P.p is not None else float(P.p_N),
            "lambda": float(P.lam), "strict": True, "translate": P.translate,
            "total": self.total, "bad": self.bad, "ratio": float(self.ratio),
            "bound": self.bound_value, "mode": self.mode, "trials": self.trials,
            "ci_low": self.ci[0] if self.ci else "", "ci_high": self.ci[1] if self.ci else "",
        }


CENSUS_COLUMNS = ["N", "m", "p", "lambda", "strict", "translate", "total", "bad", "ratio",
                  "bound", "mode", "trials", "ci_low", "ci_high"]


def _windows(N: int, translate: bool) -> list[tuple[int, int, int, int]]:
    if not translate:
        return [(0, 0, N + 1, N + 1)]
    return [(zx, zy, N + 1, N + 1) for zy in range(N) for zx in range(N)]


def cell_is_bad(cell: PeriodCell, min_len: int, translate: bool = False) -> bool:
    """Whether the periodic system of ``cell`` has a (strictly) separating trail of
    length ``>= min_len`` inside ``[0, N]^2`` or, with ``translate``, inside
    some ``z + [0, N]^2``.

    The search is exhaustive over all trail lengths (a trail in a period
    square has at most ``2 N (N + 1)`` segments).
    """
    N = cell.N
    side = 2 * N + 2 if translate else N + 2
    system = gen_periodic(cell, side, side)
    cap = 2 * N * (N + 1)
    if min_len > cap:
        return False
    return any(search_separating(system, w, min_len, "exhaustive", cap).found
               for w in _windows(N, translate))


def _bad_for_subset(args) -> bool:
    N, indices, min_len, translate = args
    return cell_is_bad(PeriodCell.from_af_indices(N, indices), min_len, translate)


def _sample_subset(args) -> bool:
    N, m, min_len, translate, seed, t = args
    rng = np.random.default_rng(trial_seed(seed, t))
    indices = rng.choice(2 * N * N, size=m, replace=False)
    return cell_is_bad(PeriodCell.from_af_indices(N, indices.tolist()), min_len, translate)


def census(params: CensusParams, mode: str = "exact", seed: int = 0, trials: int = 0,
           workers: int = 1, confidence: float = 0.95) -> CensusResult:
    """Count (``mode="exact"``) or estimate (``mode="sample"``) ``#B / #C``."""
    N, m = params.N, params.m
    total = math.comb(params.n_bonds, m)
    bound = stima_bound(N, float(params.p if params.p is not None else params.p_N),
                        float(params.lam))
    if mode == "exact":
        cap = get_cap("census_exact")
        if total > cap:
            raise CapacityError(f"exact census needs C({params.n_bonds},{m})={total} cells "
                                f"<= census_exact cap {cap}", "census_exact", cap)
        jobs = ((N, idx, params.min_len, params.translate)
                for idx in itertools.combinations(range(params.n_bonds), m))
        bad = sum(_map(_bad_for_subset, jobs, workers))
        return CensusResult(params, "exact", total, bad, Fraction(bad, total), bound)
    if mode == "sample":
        if trials < 1:
            raise ParameterError("sampled census needs trials >= 1")
        jobs = [(N, m, params.min_len, params.translate, seed, t) for t in range(trials)]
        hits = sum(_map(_sample_subset, jobs, workers))
        ci = stats.binomtest(hits, trials).proportion_ci(confidence, method="exact")
        ratio = hits / trials
        return CensusResult(params, "sample", total, ratio * total, ratio, bound, trials,
                            (float(ci.low), float(ci.high)))
    raise ParameterError(f"unknown census mode {mode!r}")


def _map(fn, jobs, workers: int):
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(fn, jobs, chunksize=64))
    return [fn(j) for j in jobs]


# ---------------------------------------------------------------------------
# counting bounds

def f_p(k: int, N: int, m: int, strict: bool = False) -> int:
    """Number of cells with ``m`` antiferromagnetic bonds for which a fixed trail of
    ``k`` distinct bonds has at least ``j0`` antiferromagnetic crossings.

    ``j0 = ceil(k/2)`` by default, so for even ``k`` the tie ``mu = k/2`` is
    included; ``strict=True`` uses ``j0 = floor(k/2) + 1``, the separating
    condition proper.
    """
    M = 2 * N * N
    if not 0 <= k <= M:
        raise ParameterError(f"k={k} outside [0, 2N^2]")
    j0 = k // 2 + 1 if strict else (k + 1) // 2
    return sum(math.comb(k, j) * math.comb(M - k, m - j) for j in range(j0, min(k, m) + 1))


def g_p(k: int, N: int, m: int) -> Fraction:
    """``C(m, k/2) C(2N^2 - m, k/2) / C(2N^2, k)`` for even ``k``."""
    M = 2 * N * N
    if k % 2:
        raise DomainError("g_p is defined for even k only")
    if not 0 <= k <= min(2 * m, M):
        raise DomainError(f"k={k} outside [0, min(2m, 2N^2)]")
    return Fraction(math.comb(m, k // 2) * math.comb(M - m, k // 2), math.comb(M, k))


def theta(p: float) -> float:
    return 2 * math.e * math.sqrt(p * (1 - p))


class ThetaBounds(NamedTuple):
    theta: float
    C_of_p: float
    three_theta: float


def theta_and_bounds(p: float) -> ThetaBounds:
    """``theta(p) = 2e sqrt(p(1-p))``, ``C(p) = 32 p^2 (1-p) / e`` and ``3 theta(p)``."""
    if not 0 < p < 0.5:
        raise DomainError("p must lie in (0, 1/2)")
    t = theta(p)
    return ThetaBounds(t, 32 * p * p * (1 - p) / math.e, 3 * t)


@dataclass(frozen=True)
class LemmaGRow:
    N: int
    p: float
    m: int
    k: int
    g: Fraction
    bound: mpmath.mpf
    passes: bool
    slack: float  # bound / g
    endpoint: bool  # k == 4 p_N N^2 = 2m


def lemma_g_check(N_range: Iterable[int], p_grid: Iterable[float], dps: int = 50) -> list[LemmaGRow]:
    """Compare exact ``g_p(k, N)`` with ``C(p) N^8 theta(p)^k`` for all even ``k <= 4 p_N N^2``."""
    rows = []
    p_grid = list(p_grid)
    with mpmath.workdps(dps):
        for N in N_range:
            for p in p_grid:
                if not 0 < p < 0.5:
                    raise DomainError("p must lie in (0, 1/2)")
                q = _as_fraction(p)
                m = math.floor(2 * q * N * N)
                pm = mpmath.mpf(q.numerator) / q.denominator
                th = 2 * mpmath.e * mpmath.sqrt(pm * (1 - pm))
                coef = 32 * pm**2 * (1 - pm) / mpmath.e * mpmath.mpf(N) ** 8
                for k in range(0, min(2 * m, 2 * N * N) + 1, 2):
                    g = g_p(k, N, m)
                    bound = coef * th**k
                    gv = mpmath.mpf(g.numerator) / g.denominator
                    rows.append(LemmaGRow(N, float(p), m, k, g, bound, bool(gv <= bound),
                                          float(bound / gv) if gv else math.inf, k == 2 * m))
    return rows


def m_lambda(lam: float) -> int:
    return math.floor(math.log2(lam)) - 1


def stima_bound(N: int, p: float, lam: float) -> float:
    """``2 C(p) N^12 ((3 theta(p))^(2^m(lambda)))^N`` with ``m(lambda) = floor(log2 lambda) - 1``.

    Returns ``inf`` when ``3 theta(p) >= 1`` (the bound is vacuous there)
    and 0 for ``p = 0``.
    """
    if not 0 < lam < 1:
        raise ParameterError("lambda must lie in (0, 1)")
    if p == 0:
        return 0.0
    if not 0 < p < 0.5:
        return math.inf
    t3 = 3 * theta(p)
    if t3 >= 1:
        return math.inf
    C = 32 * p * p * (1 - p) / math.e
    with mpmath.workdps(30):
        val = 2 * C * mpmath.mpf(N) ** 12 * mpmath.mpf(t3) ** (mpmath.mpf(2) ** m_lambda(lam) * N)
    return float(val)


# ---------------------------------------------------------------------------
# decomposition of long trails

class Piece(NamedTuple):
    trail: Trail
    origin: Site  # the piece lies in origin + [0, N]^2
    standard_anchor: bool  # False when the default anchor missed and the box was re-anchored


def _inside(trail: Trail, z: Site, N: int) -> bool:
    return all(z[0] <= x <= z[0] + N and z[1] <= y <= z[1] + N for x, y in trail.sites)


def decompose_trail(trail: Trail, N: int) -> list[Piece]:
    """Cut a trail of length ``k >= N/2`` into consecutive pieces of length ``>= N/2``,
    each contained in a translate of ``[0, N]^2``.

    For even ``N`` the cuts fall every ``N/2`` steps and there are
    ``q = floor(2k/N)`` pieces, the last one absorbing the remainder; for odd
    ``N`` cuts fall every ``(N+1)/2`` steps and ``q = floor(2k/(N+1))``.
    A piece is anchored by subtracting ``(N/2, N/2)`` (even ``N``) or
    ``((N-1)/2, (N-1)/2)`` (odd ``N``) from its first site, the last piece
    from the site at the final cut (even) or just before it (odd). For odd
    ``N`` that box can miss a piece that runs backwards; the piece is then
    anchored at the lower-left corner of its bounding box, which always
    fits because no piece spans more than ``N`` in either axis.
    """
    k = trail.length
    if N < 1 or 2 * k < N:
        raise ParameterError(f"trail length {k} is shorter than N/2 = {N / 2}")
    step = N // 2 if N % 2 == 0 else (N + 1) // 2
    shift = N // 2 if N % 2 == 0 else (N - 1) // 2
    q = k // step
    cuts = [t * step for t in range(q + 1)]
    sites = trail.sites
    pieces = []
    for t in range(1, q + 1):
        end = cuts[t] if t < q else k
        piece = Trail(sites[cuts[t - 1]: end + 1])
        if t < q:
            ref = sites[cuts[t - 1]]
        else:
            ref = sites[cuts[q]] if N % 2 == 0 else sites[cuts[q] - 1]
        z = (ref[0] - shift, ref[1] - shift)
        standard = _inside(piece, z, N)
        if not standard:
            z = (min(x for x, _ in piece.sites), min(y for _, y in piece.sites))
            assert _inside(piece, z, N)
        pieces.append(Piece(piece, z, standard))
    return pieces


def random_trail(rng: np.random.Generator, length: int, start: Site = (0, 0),
                 attempts: int = 1000) -> Trail:
    """Uniformly stepping edge-distinct walk, restarted when it gets stuck."""
    for _ in range(attempts):
        sites = [start]
        used = set()
        for _ in range(length):
            x, y = sites[-1]
            opts = []
            for dx, dy in STEPS:
                w = (x + dx, y + dy)
                seg = (sites[-1], w) if sites[-1] <= w else (w, sites[-1])
                if seg not in used:
                    opts.append((w, seg))
            if not opts:
                break
            w, seg = opts[int(rng.integers(len(opts)))]
            used.add(seg)
            sites.append(w)
        if len(sites) == length + 1:
            return Trail(tuple(sites))
    raise RuntimeError("could not draw a trail")


@dataclass(frozen=True)
class GlobaleVerdict:
    found: bool  # a separating trail longer than N/2 exists in the window
    witness: Trail | None
    explored: int
    sampled: int  # random trails run through the decomposition check
    decomposition_ok: bool

    def as_dict(self) -> dict:
        d = asdict(self)
        d["witness"] = list(self.witness.sites) if self.witness else None
        return d


def globale_check(cell: PeriodCell, window: tuple[int, int] = (8, 8), cap: int = 10,
                  samples: int = 100, seed: int = 0) -> GlobaleVerdict:
    """Confirm that a cell with no separating trail of length ``>= N/2`` in any
    translate of the period square has none longer than ``N/2`` anywhere.

    The premise is established by the exact census test (all translates,
    all lengths). The window of ``width x height`` sites is then searched
    exhaustively for separating trails of length in ``(N/2, cap]``, and
    ``samples`` random trails of the window are decomposed to check that
    the piecewise inequality ``mu <= l/2`` carries over to the whole trail.
    """
    N = cell.N
    half_len = math.ceil(N / 2)
    if cell_is_bad(cell, half_len, translate=True):
        raise PreconditionError("cell admits a separating trail of length >= N/2 "
                                "in a translate of the period square")
    w, h = window
    system = gen_periodic(cell, max(w + 1, N), max(h + 1, N))
    res = search_separating(system, (0, 0, w, h), N // 2 + 1, "exhaustive", cap)

    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(samples):
        length = int(rng.integers(half_len, max(half_len, cap) + 1))
        start = (int(rng.integers(w)), int(rng.integers(h)))
        tr = random_trail(rng, length, start)
        # evaluate mu on a periodic system large enough for the drawn trail
        xs = [x for x, _ in tr.sites]
        ys = [y for _, y in tr.sites]
        shift = (-(min(xs) // N) * N + N, -(min(ys) // N) * N + N)
        tr = Trail(tuple((x + shift[0], y + shift[1]) for x, y in tr.sites))
        big = gen_periodic(cell, max(xs) - min(xs) + 3 * N + 2, max(ys) - min(ys) + 3 * N + 2)
        pieces = decompose_trail(tr, N)
        piece_ok = all(2 * mu(pc.trail, big) <= pc.trail.length for pc in pieces)
        whole_ok = 2 * mu(tr, big) <= tr.length
        ok &= piece_ok and whole_ok
    return GlobaleVerdict(res.found, res.witness, res.explored, samples, ok)
