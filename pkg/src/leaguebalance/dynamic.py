"""Between-seasons competitive-balance indices and their bi-dimensional averages.

Pairwise indices score ranking persistence across two consecutive seasons
(1 = the tracked places are frozen, 0 = maximal turnover).  The windowed G
index scores how few distinct teams enter the top K over a multi-season
window relative to the expectation under per-season random rankings.
"""

from __future__ import annotations

import math
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .catalog import BIDIMENSIONAL_PAIRS, IndexValue
from .errors import InputError, NumericalError
from .panel import LeagueSeason
from .seasonal import WeightScheme


@dataclass(frozen=True)
class SeasonPair:
    """Two consecutive seasons of the same league."""

    prev: LeagueSeason
    curr: LeagueSeason

    def __post_init__(self) -> None:
        if self.prev.country != self.curr.country:
            raise InputError(
                f"season pair mixes countries {self.prev.country!r} and {self.curr.country!r}"
            )
        if self.curr.season != self.prev.season + 1:
            raise InputError(
                f"({self.curr.country}): seasons {self.prev.season} and {self.curr.season} "
                "are not consecutive"
            )

    def prev_rank(self, team: str) -> int | None:
        """Previous-season rank of ``team``, or None if it was absent."""
        return self.prev.rank_of().get(team)


@dataclass(frozen=True)
class TopKWindow:
    """T consecutive seasons of one league, tracked at the top K places."""

    seasons: tuple[LeagueSeason, ...]
    K: int

    def __post_init__(self) -> None:
        if len(self.seasons) < 2:
            raise InputError("top-K window needs at least 2 seasons")
        country = self.seasons[0].country
        for a, b in zip(self.seasons, self.seasons[1:]):
            if b.country != country:
                raise InputError("top-K window mixes countries")
            if b.season != a.season + 1:
                raise InputError(
                    f"({country}): window seasons {a.season} and {b.season} are not consecutive"
                )
        if any(self.K >= s.n for s in self.seasons):
            raise InputError(f"K={self.K} not below every season size in the window")
        if self.K < 1:
            raise InputError("K must be >= 1")

    @property
    def country(self) -> str:
        return self.seasons[0].country

    @property
    def end_season(self) -> int:
        return self.seasons[-1].season


def kendall_tau_b(x, y) -> float:
    """Kendall tau-b by integer pair counts (exact at the +/-1 endpoints)."""
    n = len(x)
    if n != len(y) or n < 2:
        raise InputError("tau-b needs two equally long sequences of length >= 2")
    conc = disc = ties_x = ties_y = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = x[i] - x[j]
            dy = y[i] - y[j]
            if dx == 0:
                ties_x += 1
            if dy == 0:
                ties_y += 1
            if dx == 0 or dy == 0:
                continue
            if (dx > 0) == (dy > 0):
                conc += 1
            else:
                disc += 1
    n0 = n * (n - 1) // 2
    if ties_x == n0 or ties_y == n0:
        raise InputError("tau-b undefined: one ranking is entirely tied")
    if ties_x == 0 and ties_y == 0:
        return (conc - disc) / n0
    return (conc - disc) / math.sqrt((n0 - ties_x) * (n0 - ties_y))


def tau_rescaled(pair: SeasonPair) -> float:
    """Rank correlation of consecutive-season standings, rescaled to [0, 1].

    Kendall tau-b over the teams present in both seasons, mapped through
    (1 + tau) / 2 so that 1 means identical ordering (imbalance) and 0 a
    fully reversed one.
    """
    prev_ranks = pair.prev.rank_of()
    curr_ranks = pair.curr.rank_of()
    common = sorted(set(prev_ranks) & set(curr_ranks))
    if len(common) < 2:
        raise InputError(
            f"({pair.curr.country}, {pair.curr.season}): fewer than 2 teams present in "
            "both seasons"
        )
    x = [prev_ranks[t] for t in common]
    y = [curr_ranks[t] for t in common]
    return (1.0 + kendall_tau_b(x, y)) / 2.0


def _persistence(prev_rank: int | None, rank: int, n_prev: int) -> float:
    """Rank persistence in [0, 1]: 1 = same place, 0 = absent or maximally moved."""
    if prev_rank is None:
        return 0.0
    return 1.0 - min(abs(prev_rank - rank), n_prev - 1) / (n_prev - 1.0)


def dn_champion(pair: SeasonPair) -> float:
    """Champion persistence across two seasons; 1 iff the champion repeats.

    A champion promoted from outside the league counts as previous rank
    n_prev + 1 and the value clamps at 0.
    """
    champion = pair.curr.records[0].team
    n_prev = pair.prev.n
    p = pair.prev_rank(champion)
    if p is None:
        p = n_prev + 1
    return max(0.0, 1.0 - (p - 1.0) / (n_prev - 1.0))


def adn_top(pair: SeasonPair, K: int) -> float:
    """Weighted persistence of the current top K places (weights K+1-r)."""
    if not (1 <= K < pair.curr.n):
        raise InputError(f"K={K} out of range for n={pair.curr.n}")
    n_prev = pair.prev.n
    num = 0.0
    den = 0.0
    for r in range(1, K + 1):
        team = pair.curr.records[r - 1].team
        v = K + 1.0 - r
        num += v * _persistence(pair.prev_rank(team), r, n_prev)
        den += v
    return num / den


def dn_relegation(pair: SeasonPair, I: int) -> float:
    """Mean persistence of the current relegation-zone places."""
    n = pair.curr.n
    if not (1 <= I < n):
        raise InputError(f"I={I} out of range for n={n}")
    n_prev = pair.prev.n
    values = [
        _persistence(pair.prev_rank(pair.curr.records[r - 1].team), r, n_prev)
        for r in range(n - I + 1, n + 1)
    ]
    return float(np.mean(values))


def sdn(pair: SeasonPair, K: int, I: int) -> float:
    """Weighted persistence over top-K and relegation places, using the same
    rank weights as the seasonal three-level concentration ratio."""
    n = pair.curr.n
    scheme = WeightScheme.for_league(K, I, n)
    n_prev = pair.prev.n
    num = 0.0
    den = 0.0
    for r in list(range(1, K + 1)) + list(range(n - I + 1, n + 1)):
        team = pair.curr.records[r - 1].team
        w = scheme.weights[r - 1]
        num += w * _persistence(pair.prev_rank(team), r, n_prev)
        den += w
    return num / den


@dataclass(frozen=True)
class GIndexResult:
    """G index value plus the Monte Carlo bookkeeping behind it."""

    value: float
    observed: int
    expected: float
    mc_se: float
    mc_reps: int
    seed: int


def _window_rng_seed(seed: int, country: str, end_season: int) -> list[int]:
    # stable across worker counts and country orderings
    return [seed, zlib.crc32(country.encode("utf-8")), end_season]


def g_index_detail(
    window: TopKWindow,
    mc_reps: int = 10_000,
    seed: int = 0,
    workers: int = 1,
) -> GIndexResult:
    """G index: scarcity of distinct top-K entrants over the window.

    Let A be the observed number of distinct teams entering the top K and E
    its Monte Carlo expectation under uniformly random rankings per season,
    keeping each season's roster as observed.  Returns
    clamp_0^1((E - A) / (E - K)): 1 when the same K teams hold the top K
    every season, about 0 when turnover matches the balanced expectation.

    Replication r draws from a generator seeded by (seed, r), so E is
    bit-identical for any worker count: per-replication counts are integers
    and their sum does not depend on summation order.
    """
    if mc_reps < 1:
        raise InputError("mc_reps must be >= 1")
    K = window.K
    rosters = [tuple(rec.team for rec in s.records) for s in window.seasons]
    observed = len({team for s in window.seasons for team in (rec.team for rec in s.records[:K])})

    base = [int(seed)] if isinstance(seed, (int, np.integer)) else [int(s) for s in seed]

    def count_one(rep: int) -> int:
        rng = np.random.default_rng(base + [rep])
        distinct: set[str] = set()
        for roster in rosters:
            perm = rng.permutation(len(roster))
            distinct.update(roster[j] for j in perm[:K])
        return len(distinct)

    def count_range(lo: int, hi: int) -> tuple[int, int]:
        s = sq = 0
        for rep in range(lo, hi):
            c = count_one(rep)
            s += c
            sq += c * c
        return s, sq

    if workers > 1:
        bounds = np.linspace(0, mc_reps, workers + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda ab: count_range(*ab), zip(bounds[:-1], bounds[1:])))
        total = sum(p[0] for p in parts)
        total_sq = sum(p[1] for p in parts)
    else:
        total, total_sq = count_range(0, mc_reps)

    expected = total / mc_reps
    if mc_reps > 1:
        var = (total_sq - total * total / mc_reps) / (mc_reps - 1)
        mc_se = math.sqrt(max(var, 0.0) / mc_reps)
    else:
        mc_se = float("nan")
    if expected <= K:
        raise NumericalError(
            f"({window.country}, ..{window.end_season}): degenerate window, "
            f"expected distinct top-{K} count {expected:.3f} <= K"
        )
    raw = (expected - observed) / (expected - K)
    return GIndexResult(
        value=float(min(1.0, max(0.0, raw))),
        observed=observed,
        expected=expected,
        mc_se=mc_se,
        mc_reps=mc_reps,
        seed=int(base[0]),
    )


def g_index(window: TopKWindow, mc_reps: int = 10_000, seed: int = 0) -> float:
    """G index value only; see :func:`g_index_detail`."""
    return g_index_detail(window, mc_reps=mc_reps, seed=seed).value


def combine_bidimensional(seasonal: IndexValue, dynamic: IndexValue) -> IndexValue:
    """Average a seasonal index with its dynamic counterpart.

    Valid pairings: (ncr1, dn1) -> dc1, (acr_k, adn_k) -> adc_k,
    (ncr_i, dn_i) -> dc_i, (scr_ki, sdn_ki) -> sdc_ki.
    """
    for name, (s_name, d_name) in BIDIMENSIONAL_PAIRS.items():
        if (seasonal.name, dynamic.name) == (s_name, d_name):
            break
    else:
        raise InputError(
            f"cannot pair seasonal index {seasonal.name!r} with dynamic index {dynamic.name!r}"
        )
    if (seasonal.country, seasonal.season) != (dynamic.country, dynamic.season):
        raise InputError(
            f"pairing error: {seasonal.name} is for ({seasonal.country}, {seasonal.season}) "
            f"but {dynamic.name} is for ({dynamic.country}, {dynamic.season})"
        )
    return IndexValue(
        name=name,
        country=seasonal.country,
        season=seasonal.season,
        value=(seasonal.value + dynamic.value) / 2.0,
    )
