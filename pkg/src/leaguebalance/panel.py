"""League tables, macro covariates, and panel assembly.

Ingests final league tables and country-level macro series from CSV,
validates them, and assembles the (possibly unbalanced) country-by-season
panel of log attendance and log covariates used by the regression stage.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InputError

LEAGUE_COLUMNS = ("country", "season", "team", "rank", "wins", "draws", "losses", "points")
MACRO_COLUMNS = ("country", "season", "attendance_avg", "population", "rgni_real", "unemployment_rate")

D97_CUTOFF = 1997  # first treated season is 1998


@dataclass(frozen=True)
class TeamSeasonRecord:
    """One team's row in a final league table."""

    team: str
    rank: int
    wins: int
    draws: int
    losses: int
    points: int

    @property
    def games(self) -> int:
        return self.wins + self.draws + self.losses


@dataclass(frozen=True)
class LeagueSeason:
    """A country-season final table plus its prize/punishment level structure.

    ``K`` is the number of ranking places qualifying for continental play,
    ``I`` the number of relegation places.  ``promoted`` holds team ids that
    were absent from the previous season's table (empty when the previous
    season is unknown).
    """

    country: str
    season: int
    records: tuple[TeamSeasonRecord, ...]
    K: int = 3
    I: int = 3
    promoted: frozenset[str] = frozenset()

    def __post_init__(self) -> None:
        n = len(self.records)
        where = f"({self.country}, {self.season})"
        if n < 3:
            raise InputError(f"{where}: league needs at least 3 teams, got {n}")
        ranks = [r.rank for r in self.records]
        if ranks != sorted(ranks):
            raise InputError(f"{where}: records must be sorted by rank ascending")
        if sorted(ranks) != list(range(1, n + 1)):
            dup = {r for r in ranks if ranks.count(r) > 1}
            if dup:
                raise InputError(f"{where}: duplicate rank {min(dup)}")
            raise InputError(f"{where}: ranks are not a permutation of 1..{n}")
        games = {r.games for r in self.records}
        if len(games) != 1:
            raise InputError(f"{where}: inconsistent games played across teams: {sorted(games)}")
        for r in self.records:
            if min(r.wins, r.draws, r.losses) < 0:
                raise InputError(f"{where}: negative W/D/L for team {r.team}")
        if self.K < 1 or self.I < 1 or self.K + self.I >= n:
            raise InputError(
                f"{where}: invalid level structure K={self.K}, I={self.I} for n={n} "
                "(requires 1 <= K, 1 <= I, K + I < n)"
            )

    @property
    def n(self) -> int:
        return len(self.records)

    @property
    def games(self) -> int:
        return self.records[0].games

    def roster(self) -> frozenset[str]:
        return frozenset(r.team for r in self.records)

    def rank_of(self) -> dict[str, int]:
        return {r.team: r.rank for r in self.records}


@dataclass(frozen=True)
class MacroObservation:
    """Country-season macro covariates: attendance, population, income, unemployment."""

    country: str
    season: int
    attendance_per_game: float
    population: float
    rgni: float
    unemployment: float


@dataclass(frozen=True)
class PanelRow:
    country: str
    season: int
    ln_att: float
    ln_pop: float
    ln_rgni: float
    ln_un: float
    d97: int
    t: int

    @property
    def t2(self) -> int:
        return self.t * self.t


@dataclass(frozen=True)
class PanelDataset:
    """Unbalanced country-by-season panel of logs, d97 dummy and trend.

    Rows are sorted by (country, season); within a country seasons are
    consecutive.  The trend ``t`` counts calendar seasons from a global
    origin shared by all countries, so the same season has the same ``t``
    everywhere.
    """

    rows: tuple[PanelRow, ...]
    origin: int
    trend_degree: int = 2

    def __len__(self) -> int:
        return len(self.rows)

    def countries(self) -> list[str]:
        seen: dict[str, None] = {}
        for row in self.rows:
            seen.setdefault(row.country, None)
        return list(seen)

    def by_country(self) -> dict[str, tuple[PanelRow, ...]]:
        out: dict[str, list[PanelRow]] = {}
        for row in self.rows:
            out.setdefault(row.country, []).append(row)
        return {c: tuple(v) for c, v in out.items()}

    def season_counts(self) -> dict[str, int]:
        return {c: len(v) for c, v in self.by_country().items()}


@dataclass(frozen=True)
class LevelsRule:
    """K/I override for one country over an inclusive season range."""

    country: str
    from_season: int
    to_season: int
    K: int
    I: int


@dataclass(frozen=True)
class Config:
    """Run configuration: level structure, G window, trend degree."""

    default_K: int = 3
    default_I: int = 3
    g_window: int = 5
    trend_degree: int = 2
    levels: tuple[LevelsRule, ...] = ()
    countries: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if self.default_K < 1 or self.default_I < 1:
            raise ConfigError("default K and I must be >= 1")
        if self.g_window < 2:
            raise ConfigError("g_window must be >= 2")
        if self.trend_degree < 0:
            raise ConfigError("trend_degree must be >= 0")

    @classmethod
    def from_json(cls, path: str) -> "Config":
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        known = {"levels", "g_window", "trend_degree", "default_K", "default_I", "countries"}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"{path}: unknown config keys {sorted(unknown)}")
        rules = []
        for i, entry in enumerate(raw.get("levels", [])):
            try:
                rules.append(
                    LevelsRule(
                        country=str(entry["country"]),
                        from_season=int(entry["from"]),
                        to_season=int(entry["to"]),
                        K=int(entry["K"]),
                        I=int(entry["I"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"{path}: bad levels entry #{i}: {exc}") from exc
        countries = raw.get("countries")
        return cls(
            default_K=int(raw.get("default_K", 3)),
            default_I=int(raw.get("default_I", 3)),
            g_window=int(raw.get("g_window", 5)),
            trend_degree=int(raw.get("trend_degree", 2)),
            levels=tuple(rules),
            countries=tuple(str(c) for c in countries) if countries is not None else None,
        )

    def levels_for(self, country: str, season: int, n_teams: int) -> tuple[int, int]:
        """Resolve (K, I) for a country-season, shrinking defaults to fit small leagues.

        An explicit rule is taken verbatim and must satisfy K + I < n.
        """
        for rule in self.levels:
            if rule.country == country and rule.from_season <= season <= rule.to_season:
                if rule.K + rule.I >= n_teams:
                    raise ConfigError(
                        f"levels rule for {country} {rule.from_season}-{rule.to_season} has "
                        f"K+I={rule.K + rule.I} but the {season} league has only {n_teams} teams"
                    )
                return rule.K, rule.I
        k = max(1, min(self.default_K, (n_teams - 1) // 2))
        i = max(1, min(self.default_I, n_teams - 1 - k))
        return k, i


def _parse_int(value: str, what: str, where: str) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise InputError(f"{where}: {what} is not an integer: {value!r}") from None


def _parse_float(value: str, what: str, where: str) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise InputError(f"{where}: {what} is not a number: {value!r}") from None
    if not math.isfinite(out):
        raise InputError(f"{where}: {what} is not finite: {value!r}")
    return out


def _check_header(fieldnames, expected, path: str) -> None:
    if fieldnames is None or tuple(fieldnames) != tuple(expected):
        raise InputError(
            f"{path}: bad header {fieldnames}; expected {','.join(expected)}"
        )


def parse_league_csv(path: str, config: Config | None = None) -> list[LeagueSeason]:
    """Parse a league-table CSV into validated ``LeagueSeason`` values.

    One row per team-season with header ``country,season,team,rank,wins,
    draws,losses,points``.  Promoted sets are computed by diffing the
    rosters of consecutive seasons within each country; K and I come from
    ``config`` (defaults K=3, I=3, shrunk for small leagues).
    """
    config = config or Config()
    groups: dict[tuple[str, int], list[tuple[int, TeamSeasonRecord]]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _check_header(reader.fieldnames, LEAGUE_COLUMNS, path)
        for row in reader:
            where = f"{path}:{reader.line_num}"
            country = (row["country"] or "").strip()
            if not country:
                raise InputError(f"{where}: empty country")
            if config.countries is not None and country not in config.countries:
                raise InputError(f"{where}: unknown country {country!r}")
            season = _parse_int(row["season"], "season", where)
            team = (row["team"] or "").strip()
            if not team:
                raise InputError(f"{where}: empty team id")
            rec = TeamSeasonRecord(
                team=team,
                rank=_parse_int(row["rank"], "rank", where),
                wins=_parse_int(row["wins"], "wins", where),
                draws=_parse_int(row["draws"], "draws", where),
                losses=_parse_int(row["losses"], "losses", where),
                points=_parse_int(row["points"], "points", where),
            )
            if rec.rank < 1:
                raise InputError(f"{where}: rank must be >= 1")
            if min(rec.wins, rec.draws, rec.losses, rec.points) < 0:
                raise InputError(f"{where}: negative count for team {team}")
            groups.setdefault((country, season), []).append((reader.line_num, rec))

    if not groups:
        raise InputError(f"{path}: no data rows")

    seasons: dict[tuple[str, int], LeagueSeason] = {}
    for (country, season), entries in sorted(groups.items()):
        first_line = min(line for line, _ in entries)
        where = f"{path}:{first_line} ({country}, {season})"
        recs = sorted((rec for _, rec in entries), key=lambda r: r.rank)
        ranks = [r.rank for r in recs]
        for a, b in zip(ranks, ranks[1:]):
            if a == b:
                raise InputError(f"{where}: duplicate rank {a}")
        n = len(recs)
        if ranks != list(range(1, n + 1)):
            raise InputError(f"{where}: ranks are not a permutation of 1..{n}")
        teams = [r.team for r in recs]
        if len(set(teams)) != n:
            raise InputError(f"{where}: duplicate team id")
        k, i = config.levels_for(country, season, n)
        try:
            seasons[(country, season)] = LeagueSeason(
                country=country, season=season, records=tuple(recs), K=k, I=i
            )
        except InputError as exc:
            raise InputError(f"{path}:{first_line}: {exc}") from None

    # promoted = teams absent from the previous season's roster
    out: list[LeagueSeason] = []
    for (country, season), league in sorted(seasons.items()):
        prev = seasons.get((country, season - 1))
        if prev is not None:
            promoted = league.roster() - prev.roster()
            league = LeagueSeason(
                country=country,
                season=season,
                records=league.records,
                K=league.K,
                I=league.I,
                promoted=frozenset(promoted),
            )
        out.append(league)
    return out


def parse_macro_csv(path: str) -> list[MacroObservation]:
    """Parse the macro covariate CSV (one row per country-season)."""
    out: list[MacroObservation] = []
    seen: set[tuple[str, int]] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        _check_header(reader.fieldnames, MACRO_COLUMNS, path)
        for row in reader:
            where = f"{path}:{reader.line_num}"
            country = (row["country"] or "").strip()
            if not country:
                raise InputError(f"{where}: empty country")
            season = _parse_int(row["season"], "season", where)
            key = (country, season)
            if key in seen:
                raise InputError(f"{where}: duplicate (country, season) {key}")
            seen.add(key)
            out.append(
                MacroObservation(
                    country=country,
                    season=season,
                    attendance_per_game=_parse_float(row["attendance_avg"], "attendance_avg", where),
                    population=_parse_float(row["population"], "population", where),
                    rgni=_parse_float(row["rgni_real"], "rgni_real", where),
                    unemployment=_parse_float(row["unemployment_rate"], "unemployment_rate", where),
                )
            )
    if not out:
        raise InputError(f"{path}: no data rows")
    return out


def winning_percentages(season: LeagueSeason) -> np.ndarray:
    """Winning percentages by rank under the 2-1-0 win-point scheme.

    w_i = (2*wins_i + draws_i) / (2*games).  The same 2-point scheme is
    applied regardless of the league's official points rule so that index
    bounds do not shift when leagues change their scoring.
    """
    games = season.games
    if games == 0:
        raise InputError(f"({season.country}, {season.season}): degenerate season with 0 games")
    return np.array([(2.0 * r.wins + r.draws) / (2.0 * games) for r in season.records])


def build_panel(
    leagues: list[LeagueSeason],
    macro: list[MacroObservation],
    config: Config | None = None,
) -> PanelDataset:
    """Assemble the regression panel from macro observations.

    Logs all four macro series, adds the post-1997 dummy and the global
    trend.  When ``leagues`` is non-empty, every macro (country, season)
    must have a matching league table so indices can be attached later.
    """
    config = config or Config()
    if not macro:
        raise InputError("empty macro data")
    keyed: dict[tuple[str, int], MacroObservation] = {}
    for obs in macro:
        key = (obs.country, obs.season)
        if key in keyed:
            raise InputError(f"duplicate macro row for {key}")
        keyed[key] = obs

    if leagues:
        league_keys = {(lg.country, lg.season) for lg in leagues}
        missing = sorted(k for k in keyed if k not in league_keys)
        if missing:
            raise InputError(f"macro rows without a league table: {missing[:5]}")

    by_country: dict[str, list[MacroObservation]] = {}
    for key in sorted(keyed):
        by_country.setdefault(key[0], []).append(keyed[key])
    for country, obs_list in by_country.items():
        seasons = [o.season for o in obs_list]
        for a, b in zip(seasons, seasons[1:]):
            if b != a + 1:
                raise InputError(f"season gap for {country} between {a} and {b}")

    origin = min(o.season for o in keyed.values())
    rows: list[PanelRow] = []
    for country, obs_list in by_country.items():
        for obs in obs_list:
            for what, value in (
                ("attendance_avg", obs.attendance_per_game),
                ("population", obs.population),
                ("rgni_real", obs.rgni),
                ("unemployment_rate", obs.unemployment),
            ):
                if value <= 0.0:
                    raise InputError(
                        f"log-domain error: non-positive {what} for ({country}, {obs.season})"
                    )
            rows.append(
                PanelRow(
                    country=country,
                    season=obs.season,
                    ln_att=math.log(obs.attendance_per_game),
                    ln_pop=math.log(obs.population),
                    ln_rgni=math.log(obs.rgni),
                    ln_un=math.log(obs.unemployment),
                    d97=int(obs.season > D97_CUTOFF),
                    t=obs.season - origin + 1,
                )
            )
    return PanelDataset(rows=tuple(rows), origin=origin, trend_degree=config.trend_degree)
