"""Compute every configured index for every country-season of a league set."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import dynamic as dyn
from . import seasonal as seas
from .catalog import ALL_INDEX_NAMES, BIDIMENSIONAL_PAIRS, IndexValue
from .errors import InputError
from .panel import Config, LeagueSeason, winning_percentages


@dataclass(frozen=True)
class GDiagnostic:
    """Per-window Monte Carlo bookkeeping emitted alongside the G index."""

    country: str
    season: int
    mc_reps: int
    seed: int
    e_hat: float
    mc_se: float


def compute_seasonal(season: LeagueSeason) -> list[IndexValue]:
    """The seven within-season indices for one league table."""
    w = winning_percentages(season)
    values = {
        "namsi": seas.namsi(w),
        "hhi_star": seas.hhi_star(w),
        "agini": seas.adjusted_gini(w),
        "ncr1": seas.ncr_champion(w),
        "acr_k": seas.acr_top(w, season.K),
        "ncr_i": seas.ncr_relegation(w, season.I),
        "scr_ki": seas.scr(w, season.K, season.I),
    }
    return [
        IndexValue(name=name, country=season.country, season=season.season, value=v)
        for name, v in values.items()
    ]


def compute_pairwise(pair: dyn.SeasonPair) -> list[IndexValue]:
    """The five consecutive-season indices, recorded at the current season."""
    curr = pair.curr
    values = {
        "tau": dyn.tau_rescaled(pair),
        "dn1": dyn.dn_champion(pair),
        "adn_k": dyn.adn_top(pair, curr.K),
        "dn_i": dyn.dn_relegation(pair, curr.I),
        "sdn_ki": dyn.sdn(pair, curr.K, curr.I),
    }
    return [
        IndexValue(name=name, country=curr.country, season=curr.season, value=v)
        for name, v in values.items()
    ]


def compute_all_indices(
    leagues: list[LeagueSeason],
    config: Config | None = None,
    mc_reps: int = 10_000,
    seed: int = 0,
    workers: int = 1,
    names=None,
) -> tuple[list[IndexValue], list[GDiagnostic]]:
    """All seventeen indices for every country-season where they are defined.

    Seasonal indices exist for every season; pairwise dynamic indices start
    one season late; G is recorded at the end of every full ``g_window``;
    bi-dimensional averages exist where both components do.  Output is
    sorted by (country, season, index) regardless of worker count.

    ``names`` restricts the output (components of requested bi-dimensional
    indices are computed as needed); the G Monte Carlo only runs when g is
    requested.
    """
    config = config or Config()
    requested = set(ALL_INDEX_NAMES) if names is None else set(names)
    unknown = requested - set(ALL_INDEX_NAMES)
    if unknown:
        raise InputError(f"unknown index name(s): {sorted(unknown)}")
    needed = set(requested)
    for b_name, (s_name, d_name) in BIDIMENSIONAL_PAIRS.items():
        if b_name in requested:
            needed.update((s_name, d_name))
    by_country: dict[str, list[LeagueSeason]] = {}
    for lg in leagues:
        by_country.setdefault(lg.country, []).append(lg)
    for country in by_country:
        by_country[country].sort(key=lambda s: s.season)

    values: list[IndexValue] = []
    g_jobs: list[dyn.TopKWindow] = []
    for country in sorted(by_country):
        seasons = by_country[country]
        for lg in seasons:
            values.extend(compute_seasonal(lg))
        for prev, curr in zip(seasons, seasons[1:]):
            if curr.season == prev.season + 1:
                values.extend(compute_pairwise(dyn.SeasonPair(prev=prev, curr=curr)))
        if "g" in needed:
            t = config.g_window
            for end in range(t - 1, len(seasons)):
                chunk = seasons[end - t + 1 : end + 1]
                if chunk[-1].season - chunk[0].season == t - 1:
                    g_jobs.append(dyn.TopKWindow(seasons=tuple(chunk), K=chunk[-1].K))

    def run_g(window: dyn.TopKWindow) -> tuple[IndexValue, GDiagnostic]:
        detail = dyn.g_index_detail(
            window,
            mc_reps=mc_reps,
            seed=dyn._window_rng_seed(seed, window.country, window.end_season),
        )
        iv = IndexValue(
            name="g", country=window.country, season=window.end_season, value=detail.value
        )
        diag = GDiagnostic(
            country=window.country,
            season=window.end_season,
            mc_reps=mc_reps,
            seed=seed,
            e_hat=detail.expected,
            mc_se=detail.mc_se,
        )
        return iv, diag

    if workers > 1 and g_jobs:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            g_results = list(pool.map(run_g, g_jobs))
    else:
        g_results = [run_g(job) for job in g_jobs]
    values.extend(iv for iv, _ in g_results)
    g_diags = [diag for _, diag in g_results]

    keyed = {(v.name, v.country, v.season): v for v in values}
    for name, (s_name, d_name) in BIDIMENSIONAL_PAIRS.items():
        if name not in requested:
            continue
        for (v_name, country, season), v in list(keyed.items()):
            if v_name != s_name:
                continue
            d = keyed.get((d_name, country, season))
            if d is not None:
                combined = dyn.combine_bidimensional(v, d)
                keyed[(name, country, season)] = combined

    out = sorted(
        (v for v in keyed.values() if v.name in requested),
        key=lambda v: (v.country, v.season, v.name),
    )
    g_diags.sort(key=lambda d: (d.country, d.season))
    return out, g_diags


def series_from_values(values: list[IndexValue], name: str) -> dict[tuple[str, int], float]:
    """Extract one index as a {(country, season): value} series."""
    return {(v.country, v.season): v.value for v in values if v.name == name}
