"""Shared builders for synthetic league tables and fits used across the test suite."""

from __future__ import annotations

import numpy as np

from leaguebalance.econometrics import FitResult
from leaguebalance.panel import LeagueSeason, TeamSeasonRecord

HOME, DRAW, AWAY = 0, 1, 2


def drr_matches(n: int) -> list[tuple[int, int]]:
    """Ordered (home, away) pairs of a double round robin: each pair twice."""
    return [(i, j) for i in range(n) for j in range(n) if i != j]


def season_from_outcomes(
    outcomes,
    country: str = "SIM",
    season: int = 2000,
    K: int = 1,
    I: int = 1,
    promoted=frozenset(),
) -> LeagueSeason:
    """League season implied by one outcome assignment of a double round robin.

    ``outcomes[m]`` is 0 (home win), 1 (draw) or 2 (away win) for the m-th
    match of :func:`drr_matches`.  Teams are ranked by win points (2-1-0),
    ties broken by team id.
    """
    outcomes = list(outcomes)
    n = round((1 + (1 + 4 * len(outcomes)) ** 0.5) / 2)
    assert n * (n - 1) == len(outcomes)
    wins = [0] * n
    draws = [0] * n
    losses = [0] * n
    for (home, away), res in zip(drr_matches(n), outcomes):
        if res == HOME:
            wins[home] += 1
            losses[away] += 1
        elif res == AWAY:
            wins[away] += 1
            losses[home] += 1
        else:
            draws[home] += 1
            draws[away] += 1
    order = sorted(range(n), key=lambda i: (-(2 * wins[i] + draws[i]), i))
    records = tuple(
        TeamSeasonRecord(
            team=f"T{i}",
            rank=r + 1,
            wins=wins[i],
            draws=draws[i],
            losses=losses[i],
            points=2 * wins[i] + draws[i],
        )
        for r, i in enumerate(order)
    )
    return LeagueSeason(
        country=country, season=season, records=records, K=K, I=I, promoted=frozenset(promoted)
    )


def all_draw_season(n: int, country: str = "SIM", season: int = 2000, K: int = 1, I: int = 1):
    """Complete double round robin in which every match is drawn."""
    g = 2 * (n - 1)
    records = tuple(
        TeamSeasonRecord(team=f"T{i}", rank=i + 1, wins=0, draws=g, losses=0, points=g)
        for i in range(n)
    )
    return LeagueSeason(country=country, season=season, records=records, K=K, I=I)


def cu_season(n: int, country: str = "SIM", season: int = 2000, K: int = 1, I: int = 1):
    """Completely unbalanced season: rank i beats all lower-ranked teams twice."""
    records = tuple(
        TeamSeasonRecord(
            team=f"T{i}",
            rank=i + 1,
            wins=2 * (n - 1 - i),
            draws=0,
            losses=2 * i,
            points=4 * (n - 1 - i),
        )
        for i in range(n)
    )
    return LeagueSeason(country=country, season=season, records=records, K=K, I=I)


def relabel(season: LeagueSeason, mapping) -> LeagueSeason:
    """Same table with team ids renamed through ``mapping``."""
    records = tuple(
        TeamSeasonRecord(
            team=mapping[r.team],
            rank=r.rank,
            wins=r.wins,
            draws=r.draws,
            losses=r.losses,
            points=r.points,
        )
        for r in season.records
    )
    return LeagueSeason(
        country=season.country,
        season=season.season,
        records=records,
        K=season.K,
        I=season.I,
        promoted=frozenset(mapping[t] for t in season.promoted),
    )


def reranked(season: LeagueSeason, new_order, season_year=None) -> LeagueSeason:
    """Season with the same teams placed at ranks given by ``new_order``.

    ``new_order[r]`` is the team (old record index) that ends up at rank r+1.
    W/D/L are taken from a completely unbalanced pattern for the new ranks so
    the table stays internally consistent.
    """
    n = season.n
    teams = [season.records[i].team for i in new_order]
    records = tuple(
        TeamSeasonRecord(
            team=teams[r],
            rank=r + 1,
            wins=2 * (n - 1 - r),
            draws=0,
            losses=2 * r,
            points=4 * (n - 1 - r),
        )
        for r in range(n)
    )
    return LeagueSeason(
        country=season.country,
        season=season.season + 1 if season_year is None else season_year,
        records=records,
        K=season.K,
        I=season.I,
    )


def random_outcomes(n: int, rng: np.random.Generator):
    return rng.integers(0, 3, size=n * (n - 1))


def fit_from_residuals(resid_by_country: dict[str, np.ndarray]) -> FitResult:
    """Minimal FitResult wrapping given residual series (years 0, 1, 2, ...)."""
    stacked = np.concatenate([np.asarray(e, dtype=float) for e in resid_by_country.values()])
    return FitResult(
        coef_names=[],
        beta=np.empty(0),
        cov=np.empty((0, 0)),
        residuals=stacked,
        fitted=np.zeros_like(stacked),
        nobs=stacked.size,
        residuals_by_country={c: np.asarray(e, dtype=float) for c, e in resid_by_country.items()},
        years_by_country={c: np.arange(len(e)) for c, e in resid_by_country.items()},
    )


def dgp_design(seed: int = 0, params=None, **spec_kw):
    """Design matrix built from one DGP replication."""
    from leaguebalance.econometrics import RegressionSpec, build_adl_design
    from leaguebalance.panel import build_panel
    from leaguebalance.pipeline import series_from_values
    from leaguebalance.simulate import simulate_dgp

    sim = simulate_dgp(params, seed=seed)
    panel = build_panel([], sim.macro)
    index_name = sim.indices[0].name
    spec = RegressionSpec(index_name=index_name, **spec_kw)
    design = build_adl_design(panel, series_from_values(sim.indices, index_name), spec)
    return design, sim, spec
