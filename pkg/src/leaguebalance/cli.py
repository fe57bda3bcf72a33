"""Command-line driver: indices, unit-root, fit, effects, simulate, report.

Exit codes: 0 success, 2 input or schema error, 3 numerical failure,
4 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import stats as _stats

from .catalog import ALL_INDEX_NAMES, IndexValue
from .econometrics import (
    RegressionSpec,
    adf_test,
    attendance_effect,
    breusch_pagan_lm,
    build_adl_design,
    durbin_watson_panel,
    fisher_panel_unit_root,
    jarque_bera,
    long_run_effects,
    ramsey_reset,
    sur_egls_fit,
    white_cross_section_cov,
)
from .errors import ConfigError, InputError, LeagueBalanceError, NumericalError
from .manifest import sha256_file, sha256_text, write_manifest
from .panel import Config, build_panel, parse_league_csv, parse_macro_csv
from .pipeline import compute_all_indices, series_from_values
from .reports import fmt, stars, write_csv, write_text_table
from .simulate import DgpParams, LeagueSimParams, simulate_dgp, simulate_league

PANEL_VARIABLES = ("ln_att", "ln_pop", "ln_rgni", "ln_un")


def _load_config(args) -> tuple[Config, str]:
    if getattr(args, "config", None):
        return Config.from_json(args.config), sha256_file(args.config)
    return Config(), sha256_text("default")


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _index_names(arg: str) -> list[str]:
    if arg == "all":
        return list(ALL_INDEX_NAMES)
    if arg not in ALL_INDEX_NAMES:
        raise InputError(f"unknown index {arg!r}; choose one of {', '.join(ALL_INDEX_NAMES)} or all")
    return [arg]


def read_index_csv(path: str) -> list[IndexValue]:
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        expected = ("country", "season", "index", "value")
        if reader.fieldnames is None or tuple(reader.fieldnames) != expected:
            raise InputError(f"{path}: bad header; expected {','.join(expected)}")
        for row in reader:
            where = f"{path}:{reader.line_num}"
            try:
                out.append(
                    IndexValue(
                        name=row["index"],
                        country=row["country"],
                        season=int(row["season"]),
                        value=float(row["value"]),
                    )
                )
            except (TypeError, ValueError) as exc:
                raise InputError(f"{where}: {exc}") from None
    if not out:
        raise InputError(f"{path}: no data rows")
    return out


# ---------------------------------------------------------------- indices


def cmd_indices(args) -> int:
    config, config_hash = _load_config(args)
    leagues = parse_league_csv(args.league, config)
    values, diags = compute_all_indices(
        leagues, config, mc_reps=args.mc_reps, seed=args.seed, workers=args.workers
    )
    out = _out_dir(args)
    artifacts = [
        write_csv(
            out / "indices.csv",
            ("country", "season", "index", "value"),
            [(v.country, v.season, v.name, v.value) for v in values],
        ),
        write_csv(
            out / "g_diagnostics.csv",
            ("country", "season", "mc_reps", "seed", "E_hat", "mc_se"),
            [(d.country, d.season, d.mc_reps, d.seed, d.e_hat, d.mc_se) for d in diags],
        ),
    ]
    write_manifest(
        out, "indices", args.seed, {"league": sha256_file(args.league)}, config_hash, artifacts
    )
    print(f"wrote {len(values)} index values for {len(set(v.country for v in values))} countries")
    return 0


# ---------------------------------------------------------------- unit root


def _panel_series(panel, variable: str) -> dict[str, np.ndarray]:
    return {
        country: np.array([getattr(row, variable) for row in rows])
        for country, rows in panel.by_country().items()
    }


def cmd_unit_root(args) -> int:
    config, config_hash = _load_config(args)
    macro = parse_macro_csv(args.macro)
    panel = build_panel([], macro, config)
    if not panel.rows:
        raise InputError("empty panel")
    rows = []
    for variable in PANEL_VARIABLES:
        series = _panel_series(panel, variable)
        for case in ("c", "ct"):
            results = [adf_test(y, case, args.max_lag) for y in series.values()]
            combined = fisher_panel_unit_root([r.p_value for r in results])
            lags = [r.lag for r in results]
            rows.append(
                (
                    variable,
                    {"c": "constant", "ct": "constant+trend"}[case],
                    combined.statistic,
                    combined.df,
                    combined.p_value,
                    stars(combined.p_value),
                    f"{min(lags)}-{max(lags)}",
                )
            )
    out = _out_dir(args)
    header = ("variable", "case", "fisher_stat", "df", "p_value", "stars", "lags")
    artifacts = [
        write_csv(out / "unit_root.csv", header, rows),
        write_text_table(
            out / "unit_root.txt",
            "ADF-Fisher panel unit root tests",
            header,
            rows,
            footer="lag length per country chosen by the Schwarz information criterion",
        ),
    ]
    write_manifest(
        out, "unit-root", args.seed, {"macro": sha256_file(args.macro)}, config_hash, artifacts
    )
    print("wrote unit-root report")
    return 0


# ---------------------------------------------------------------- fit


@dataclass
class IndexFitReport:
    name: str
    coef_rows: list
    longrun_rows: list
    diag_rows: list
    nobs: int
    r2_adj: float
    iterations: int


def _check_index_variation(design, name: str) -> None:
    col = design.X[:, design.columns.index("ln_cb_lag1")]
    for country in design.country_list:
        values = col[design.countries == country]
        if values.size and float(values.std()) == 0.0:
            raise NumericalError(
                f"index {name!r} is constant in-sample for {country}; "
                "its level is collinear with the country intercept"
            )


def fit_index_model(panel, index_values, name: str, spec: RegressionSpec, iterate: bool):
    series = series_from_values(index_values, name)
    if not series:
        raise InputError(f"no values for index {name!r}")
    design = build_adl_design(panel, series, spec)
    _check_index_variation(design, name)
    fit = sur_egls_fit(design, iterate=iterate)
    fit.cov_robust = white_cross_section_cov(fit, design)
    effects = long_run_effects(fit, spec)

    coef_rows = []
    for i, term in enumerate(fit.coef_names):
        se_c = math.sqrt(fit.cov[i, i])
        se_r = math.sqrt(fit.cov_robust[i, i])
        z = fit.beta[i] / se_r if se_r > 0 else float("inf")
        p = float(2.0 * _stats.norm.sf(abs(z)))
        coef_rows.append((term, float(fit.beta[i]), se_c, se_r, z, p, stars(p)))

    longrun_rows = [
        (e.variable, e.estimate, e.se, e.z, e.p_value, e.stars) for e in effects
    ]

    diag_rows = []
    dw = durbin_watson_panel(fit)
    diag_rows.append(("durbin_watson", dw.statistic, "", dw.p_value, dw.note))
    lm = breusch_pagan_lm(fit)
    diag_rows.append(("lm_sur", lm.statistic, lm.df, lm.p_value, lm.note))
    reset = ramsey_reset(fit, design)
    diag_rows.append(
        ("ramsey_reset", reset.statistic, f"{reset.df[0]};{reset.df[1]}", reset.p_value, "")
    )
    for case in ("c", "ct"):
        resid_adf = [
            adf_test(fit.residuals_by_country[c], case) for c in sorted(fit.residuals_by_country)
        ]
        combined = fisher_panel_unit_root([r.p_value for r in resid_adf])
        label = {"c": "resid_adf_fisher_constant", "ct": "resid_adf_fisher_trend"}[case]
        diag_rows.append((label, combined.statistic, combined.df, combined.p_value, ""))
    for country, jb in jarque_bera(fit.residuals_by_country).items():
        diag_rows.append((f"jarque_bera[{country}]", jb.statistic, jb.df, jb.p_value, ""))
    diag_rows.append(("r2_adj", fit.r2_adj, "", "", ""))
    diag_rows.append(("iterations", fit.iterations, "", "", ""))

    return IndexFitReport(
        name=name,
        coef_rows=coef_rows,
        longrun_rows=longrun_rows,
        diag_rows=diag_rows,
        nobs=design.nobs,
        r2_adj=fit.r2_adj,
        iterations=fit.iterations,
    )


def _write_fit_report(out: Path, report: IndexFitReport) -> list[str]:
    tag = report.name
    artifacts = [
        write_csv(
            out / f"fit_{tag}_coefficients.csv",
            ("term", "coef", "se_classical", "se_robust", "z", "p_value", "stars"),
            report.coef_rows,
        ),
        write_csv(
            out / f"fit_{tag}_longrun.csv",
            ("variable", "elasticity", "se", "z", "p_value", "stars"),
            report.longrun_rows,
        ),
        write_csv(
            out / f"fit_{tag}_diagnostics.csv",
            ("name", "statistic", "df", "p_value", "note"),
            report.diag_rows,
        ),
        write_text_table(
            out / f"fit_{tag}.txt",
            f"EGLS system fit, index {tag} (N={report.nobs}, "
            f"adj. R2={fmt(report.r2_adj)}, iterations={report.iterations})",
            ("term", "coef", "se_robust", "stars"),
            [(r[0], r[1], r[3], r[6]) for r in report.coef_rows],
            footer="robust standard errors clustered by year",
        ),
    ]
    return artifacts


def cmd_fit(args) -> int:
    config, config_hash = _load_config(args)
    names = _index_names(args.index)
    inputs = {"macro": sha256_file(args.macro)}
    macro = parse_macro_csv(args.macro)

    if args.indices:
        index_values = read_index_csv(args.indices)
        leagues = []
        inputs["indices"] = sha256_file(args.indices)
    elif args.league:
        leagues = parse_league_csv(args.league, config)
        inputs["league"] = sha256_file(args.league)
        index_values, _ = compute_all_indices(
            leagues, config, mc_reps=args.mc_reps, seed=args.seed,
            workers=args.workers, names=names,
        )
        # quantise to the CSV precision so fitting from files is identical
        index_values = [
            IndexValue(v.name, v.country, v.season, float(fmt(v.value)))
            for v in index_values
        ]
    else:
        raise InputError("fit needs --indices or --league")

    panel = build_panel(leagues, macro, config)
    spec_for = {
        name: RegressionSpec(
            index_name=name,
            adl_order=args.adl_order,
            trend_degree=config.trend_degree,
            include_d97=not args.no_d97,
        )
        for name in names
    }

    def run(name):
        return fit_index_model(panel, index_values, name, spec_for[name], args.iterate_sur)

    if args.workers > 1 and len(names) > 1:
        with ThreadPoolExecutor(max_workers=args.workers) as pool:
            reports = list(pool.map(run, names))
    else:
        reports = [run(name) for name in names]

    out = _out_dir(args)
    artifacts = []
    for report in reports:
        artifacts.extend(_write_fit_report(out, report))

    summary_header = ["index"]
    for var in ("cb", "pop", "rgni", "un", "t", "t2", "d97"):
        summary_header += [var, f"{var}_stars"]
    summary_rows = []
    for report in reports:
        by_var = {r[0]: r for r in report.longrun_rows}
        row = [report.name]
        for var in ("cb", "pop", "rgni", "un", "t", "t2", "d97"):
            if var in by_var:
                row += [by_var[var][1], by_var[var][5]]
            else:
                row += ["", ""]
        summary_rows.append(row)
    artifacts.append(
        write_csv(out / "longrun_summary.csv", summary_header, summary_rows)
    )
    artifacts.append(
        write_text_table(
            out / "longrun_summary.txt",
            "Long-run elasticities by index model",
            summary_header,
            summary_rows,
            footer="* p<0.1, ** p<0.05, *** p<0.01 (robust, delta method)",
        )
    )
    write_manifest(out, "fit", args.seed, inputs, config_hash, artifacts)
    print(f"fitted {len(reports)} model(s): {', '.join(r.name for r in reports)}")
    return 0


# ---------------------------------------------------------------- effects


def cmd_effects(args) -> int:
    index_values = read_index_csv(args.indices)
    macro = parse_macro_csv(args.macro)
    series = series_from_values(index_values, args.index)
    if not series:
        raise InputError(f"no values for index {args.index!r} in {args.indices}")
    att: dict[str, list[float]] = {}
    for obs in macro:
        att.setdefault(obs.country, []).append(obs.attendance_per_game)
    rows = []
    for country in sorted({c for c, _ in series}):
        if country not in att:
            raise InputError(f"no attendance data for {country}")
        values = {season: v for (c, season), v in series.items() if c == country}
        best_season = min(values, key=lambda s: (values[s], s))
        worst_season = max(values, key=lambda s: (values[s], -s))
        avg = float(np.mean(att[country]))
        effect = attendance_effect(
            args.elasticity, values[best_season], values[worst_season], avg
        )
        rows.append(
            (
                country,
                best_season,
                values[best_season],
                worst_season,
                values[worst_season],
                avg,
                effect.percent,
                effect.fans_per_game,
            )
        )
    out = _out_dir(args)
    header = (
        "country", "best_season", "best_value", "worst_season", "worst_value",
        "avg_attendance", "percent", "fans_per_game",
    )
    artifacts = [
        write_csv(out / "effects.csv", header, rows),
        write_text_table(
            out / "effects.txt",
            f"Attendance effect of best-vs-worst balance ({args.index}, "
            f"elasticity {fmt(args.elasticity)})",
            header,
            rows,
        ),
    ]
    write_manifest(
        out,
        "effects",
        args.seed,
        {"indices": sha256_file(args.indices), "macro": sha256_file(args.macro)},
        sha256_text(f"elasticity={args.elasticity!r},index={args.index}"),
        artifacts,
    )
    print(f"wrote effects for {len(rows)} countries")
    return 0


# ---------------------------------------------------------------- simulate


def _write_league_csv(path, leagues) -> str:
    rows = []
    for lg in leagues:
        for rec in lg.records:
            rows.append(
                (lg.country, lg.season, rec.team, rec.rank, rec.wins, rec.draws,
                 rec.losses, rec.points)
            )
    return write_csv(
        path,
        ("country", "season", "team", "rank", "wins", "draws", "losses", "points"),
        rows,
    )


def _write_macro_csv(path, macro) -> str:
    return write_csv(
        path,
        ("country", "season", "attendance_avg", "population", "rgni_real", "unemployment_rate"),
        [
            (m.country, m.season, m.attendance_per_game, m.population, m.rgni, m.unemployment)
            for m in macro
        ],
    )


def cmd_simulate(args) -> int:
    out = _out_dir(args)
    n_seasons = args.n_seasons if args.n_seasons is not None else (
        10 if args.kind == "league" else 50
    )
    if args.kind == "league":
        dispersion = math.inf if args.dispersion == "inf" else float(args.dispersion)
        params = LeagueSimParams(
            n_teams=args.n_teams,
            n_seasons=n_seasons,
            dispersion=dispersion,
            country=args.country,
            start_season=args.start_season,
            churn=args.churn,
            K=min(3, (args.n_teams - 1) // 2),
            I=min(3, args.n_teams - 1 - min(3, (args.n_teams - 1) // 2)),
        )
        leagues = simulate_league(params, seed=args.seed)
        artifacts = [_write_league_csv(out / "league.csv", leagues)]
        config_hash = sha256_text(json.dumps(params.__dict__, default=str, sort_keys=True))
    elif args.kind == "dgp":
        params = DgpParams(
            countries=tuple(f"C{i + 1}" for i in range(args.dgp_countries)),
            n_seasons=n_seasons,
        )
        sim = simulate_dgp(params, seed=args.seed)
        artifacts = [
            _write_macro_csv(out / "macro.csv", sim.macro),
            write_csv(
                out / "indices.csv",
                ("country", "season", "index", "value"),
                [(v.country, v.season, v.name, v.value) for v in sim.indices],
            ),
        ]
        truth_path = out / "truth.json"
        with open(truth_path, "w", encoding="utf-8") as fh:
            json.dump(
                {"long_run": sim.truth, "coefficients": sim.coefficients},
                fh, indent=2, sort_keys=True,
            )
            fh.write("\n")
        artifacts.append(str(truth_path))
        config_hash = sha256_text(json.dumps(params.__dict__, default=str, sort_keys=True))
    else:
        raise ConfigError(f"unknown simulate kind {args.kind!r}")
    write_manifest(out, f"simulate-{args.kind}", args.seed, {}, config_hash, artifacts)
    print(f"wrote {args.kind} simulation to {out}")
    return 0


# ---------------------------------------------------------------- report


def cmd_report(args) -> int:
    out = _out_dir(args)
    cmd_indices(
        argparse.Namespace(
            league=args.league, config=args.config, out_dir=str(out),
            seed=args.seed, mc_reps=args.mc_reps, workers=args.workers,
        )
    )
    cmd_unit_root(
        argparse.Namespace(
            macro=args.macro, config=args.config, out_dir=str(out),
            seed=args.seed, max_lag=None,
        )
    )
    cmd_fit(
        argparse.Namespace(
            macro=args.macro, league=None, indices=str(out / "indices.csv"),
            config=args.config, out_dir=str(out), seed=args.seed,
            index=args.index, adl_order=args.adl_order, no_d97=args.no_d97,
            iterate_sur=args.iterate_sur, mc_reps=args.mc_reps, workers=args.workers,
        )
    )
    for name in _index_names(args.index):
        with open(out / f"fit_{name}_longrun.csv", newline="", encoding="utf-8") as fh:
            cb_row = next(r for r in csv.DictReader(fh) if r["variable"] == "cb")
        cmd_effects(
            argparse.Namespace(
                indices=str(out / "indices.csv"), macro=args.macro, index=name,
                elasticity=float(cb_row["elasticity"]),
                out_dir=str(out / f"effects_{name}"), seed=args.seed,
            )
        )
    print("report complete")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leaguebalance",
        description="Competitive-balance indices and their effect on attendance",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--out-dir", required=True, help="output directory")
        if seed:
            p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("indices", help="compute all indices from a league CSV")
    p.add_argument("--league", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--mc-reps", type=int, default=10_000)
    p.add_argument("--workers", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_indices)

    p = sub.add_parser("unit-root", help="ADF-Fisher panel unit-root tests")
    p.add_argument("--macro", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--max-lag", type=int, default=None)
    common(p)
    p.set_defaults(func=cmd_unit_root)

    p = sub.add_parser("fit", help="pooled EGLS system fit per index")
    p.add_argument("--macro", required=True)
    p.add_argument("--league", default=None)
    p.add_argument("--indices", default=None, help="indices.csv from the indices command")
    p.add_argument("--config", default=None)
    p.add_argument("--index", default="sdc_ki", help="index name or 'all'")
    p.add_argument("--adl-order", type=int, default=2)
    p.add_argument("--no-d97", action="store_true")
    p.add_argument("--iterate-sur", action="store_true")
    p.add_argument("--mc-reps", type=int, default=10_000)
    p.add_argument("--workers", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("effects", help="best-vs-worst season attendance effects")
    p.add_argument("--indices", required=True)
    p.add_argument("--macro", required=True)
    p.add_argument("--index", default="sdc_ki")
    p.add_argument("--elasticity", type=float, required=True)
    common(p)
    p.set_defaults(func=cmd_effects)

    p = sub.add_parser("simulate", help="generate synthetic league or panel data")
    p.add_argument("--kind", choices=("league", "dgp"), required=True)
    p.add_argument("--n-teams", type=int, default=12)
    p.add_argument("--n-seasons", type=int, default=None, help="default 10 (league) or 50 (dgp)")
    p.add_argument("--dispersion", default="2.0", help="float or 'inf'")
    p.add_argument("--churn", type=int, default=0)
    p.add_argument("--country", default="SIM")
    p.add_argument("--start-season", type=int, default=1990)
    p.add_argument("--dgp-countries", type=int, default=8)
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="full pipeline: indices, unit root, fit, effects")
    p.add_argument("--league", required=True)
    p.add_argument("--macro", required=True)
    p.add_argument("--config", default=None)
    p.add_argument("--index", default="sdc_ki")
    p.add_argument("--adl-order", type=int, default=2)
    p.add_argument("--no-d97", action="store_true")
    p.add_argument("--iterate-sur", action="store_true")
    p.add_argument("--mc-reps", type=int, default=10_000)
    p.add_argument("--workers", type=int, default=1)
    common(p)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 4
    except LeagueBalanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
