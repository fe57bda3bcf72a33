import csv
import json
from pathlib import Path

import pytest

from leaguebalance.cli import main


def run(*argv) -> int:
    return main([str(a) for a in argv])


def read_bytes(path) -> bytes:
    return Path(path).read_bytes()


def tree_bytes(out_dir) -> dict[str, bytes]:
    out_dir = Path(out_dir)
    return {
        str(p.relative_to(out_dir)): p.read_bytes()
        for p in sorted(out_dir.rglob("*"))
        if p.is_file()
    }


class TestIndicesCommand:
    def test_writes_indices_and_diagnostics(self, small_dataset, tmp_path):
        out = tmp_path / "idx"
        assert run(
            "indices", "--league", small_dataset["league"], "--out-dir", out,
            "--mc-reps", 300, "--seed", 1,
        ) == 0
        with open(out / "indices.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        names = {r["index"] for r in rows}
        assert len(names) == 17
        assert all(0.0 <= float(r["value"]) <= 1.0 for r in rows)
        assert (out / "g_diagnostics.csv").exists()
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["command"] == "indices"
        assert "league" in manifest["inputs"]

    def test_schema_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("country,season\nBEL,1990\n")
        assert run("indices", "--league", bad, "--out-dir", tmp_path / "o") == 2

    def test_config_error_exit_code(self, small_dataset, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"unexpected_key": 1}')
        assert run(
            "indices", "--league", small_dataset["league"], "--config", cfg,
            "--out-dir", tmp_path / "o",
        ) == 4

    def test_config_levels_applied(self, small_dataset, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(
            '{"levels": [{"country": "AAA", "from": 1980, "to": 2003, "K": 4, "I": 2}],'
            ' "g_window": 4}'
        )
        out = tmp_path / "idx"
        assert run(
            "indices", "--league", small_dataset["league"], "--config", cfg,
            "--out-dir", out, "--mc-reps", 150, "--seed", 2,
        ) == 0
        with open(out / "g_diagnostics.csv", newline="") as fh:
            rows = [r for r in csv.DictReader(fh) if r["country"] == "AAA"]
        # windows of 4 over 24 seasons -> 21 end-seasons
        assert len(rows) == 21

    def test_byte_determinism_across_runs_and_workers(self, small_dataset, tmp_path):
        outs = []
        for tag, workers in (("a", 1), ("b", 1), ("c", 8)):
            out = tmp_path / tag
            assert run(
                "indices", "--league", small_dataset["league"], "--out-dir", out,
                "--mc-reps", 200, "--seed", 9, "--workers", workers,
            ) == 0
            outs.append(tree_bytes(out))
        assert outs[0] == outs[1] == outs[2]


class TestUnitRootCommand:
    def test_report_shape(self, small_dataset, tmp_path):
        out = tmp_path / "ur"
        assert run("unit-root", "--macro", small_dataset["macro"], "--out-dir", out) == 0
        with open(out / "unit_root.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 8  # 4 variables x 2 deterministic cases
        assert {r["variable"] for r in rows} == {"ln_att", "ln_pop", "ln_rgni", "ln_un"}
        for r in rows:
            assert 0.0 <= float(r["p_value"]) <= 1.0
            assert "-" in r["lags"]

    def test_empty_macro_is_input_error(self, tmp_path):
        empty = tmp_path / "macro.csv"
        empty.write_text(
            "country,season,attendance_avg,population,rgni_real,unemployment_rate\n"
        )
        assert run("unit-root", "--macro", empty, "--out-dir", tmp_path / "o") == 2


class TestFitCommand:
    def test_fit_from_league(self, small_dataset, tmp_path):
        out = tmp_path / "fit"
        assert run(
            "fit", "--macro", small_dataset["macro"], "--league", small_dataset["league"],
            "--index", "scr_ki", "--iterate-sur", "--out-dir", out, "--seed", 2,
        ) == 0
        for name in (
            "fit_scr_ki_coefficients.csv", "fit_scr_ki_longrun.csv",
            "fit_scr_ki_diagnostics.csv", "fit_scr_ki.txt", "longrun_summary.csv",
        ):
            assert (out / name).exists(), name
        with open(out / "fit_scr_ki_longrun.csv", newline="") as fh:
            rows = {r["variable"]: r for r in csv.DictReader(fh)}
        assert set(rows) == {"cb", "pop", "rgni", "un", "d97", "t", "t2"}

    def test_no_d97_removes_row(self, small_dataset, tmp_path):
        out = tmp_path / "fit"
        assert run(
            "fit", "--macro", small_dataset["macro"], "--league", small_dataset["league"],
            "--index", "scr_ki", "--no-d97", "--out-dir", out,
        ) == 0
        with open(out / "fit_scr_ki_longrun.csv", newline="") as fh:
            rows = {r["variable"] for r in csv.DictReader(fh)}
        assert "d97" not in rows
        with open(out / "fit_scr_ki_coefficients.csv", newline="") as fh:
            terms = {r["term"] for r in csv.DictReader(fh)}
        assert "d97" not in terms

    def test_constant_index_is_numerical_error(self, small_dataset, tmp_path):
        indices = tmp_path / "flat.csv"
        with open(small_dataset["macro"], newline="") as fh:
            keys = [(r["country"], r["season"]) for r in csv.DictReader(fh)]
        with open(indices, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["country", "season", "index", "value"])
            for country, season in keys:
                writer.writerow([country, season, "scr_ki", "0.5"])
        assert run(
            "fit", "--macro", small_dataset["macro"], "--indices", indices,
            "--index", "scr_ki", "--out-dir", tmp_path / "o",
        ) == 3

    def test_fit_composes_with_indices_command(self, small_dataset, tmp_path):
        idx_out = tmp_path / "idx"
        assert run(
            "indices", "--league", small_dataset["league"], "--out-dir", idx_out,
            "--mc-reps", 200, "--seed", 3,
        ) == 0
        direct = tmp_path / "direct"
        assert run(
            "fit", "--macro", small_dataset["macro"], "--league", small_dataset["league"],
            "--index", "namsi", "--out-dir", direct, "--seed", 3,
        ) == 0
        via_csv = tmp_path / "via_csv"
        assert run(
            "fit", "--macro", small_dataset["macro"], "--indices", idx_out / "indices.csv",
            "--index", "namsi", "--out-dir", via_csv, "--seed", 3,
        ) == 0
        assert read_bytes(direct / "fit_namsi_coefficients.csv") == read_bytes(
            via_csv / "fit_namsi_coefficients.csv"
        )

    def test_fit_all_deterministic_across_workers(self, small_dataset, tmp_path):
        outs = []
        for tag, workers in (("w1", 1), ("w8", 8)):
            out = tmp_path / tag
            assert run(
                "fit", "--macro", small_dataset["macro"], "--league", small_dataset["league"],
                "--index", "all", "--out-dir", out, "--seed", 4, "--mc-reps", 200,
                "--workers", workers, "--iterate-sur",
            ) == 0
            outs.append(tree_bytes(out))
        assert outs[0] == outs[1]


class TestEffectsCommand:
    def test_effects_table(self, small_dataset, tmp_path):
        idx_out = tmp_path / "idx"
        run(
            "indices", "--league", small_dataset["league"], "--out-dir", idx_out,
            "--mc-reps", 200, "--seed", 5,
        )
        out = tmp_path / "eff"
        assert run(
            "effects", "--indices", idx_out / "indices.csv", "--macro", small_dataset["macro"],
            "--index", "scr_ki", "--elasticity", "-1.142", "--out-dir", out,
        ) == 0
        with open(out / "effects.csv", newline="") as fh:
            rows = list(csv.DictReader(fh))
        assert {r["country"] for r in rows} == {"AAA", "BBB", "CCC"}
        for r in rows:
            assert float(r["best_value"]) <= float(r["worst_value"])
            expected = (
                1.142
                * (float(r["worst_value"]) - float(r["best_value"]))
                / float(r["worst_value"])
                * float(r["avg_attendance"])
            )
            assert float(r["fans_per_game"]) == pytest.approx(expected, rel=1e-9)

    def test_missing_attendance_is_input_error(self, small_dataset, tmp_path):
        indices = tmp_path / "i.csv"
        indices.write_text(
            "country,season,index,value\nZZZ,1990,scr_ki,0.4\nZZZ,1991,scr_ki,0.6\n"
        )
        assert run(
            "effects", "--indices", indices, "--macro", small_dataset["macro"],
            "--index", "scr_ki", "--elasticity", "-1.0", "--out-dir", tmp_path / "o",
        ) == 2


class TestReportCommand:
    def test_end_to_end(self, small_dataset, tmp_path):
        out = tmp_path / "rep"
        assert run(
            "report", "--league", small_dataset["league"], "--macro", small_dataset["macro"],
            "--index", "sdc_ki", "--iterate-sur", "--out-dir", out,
            "--mc-reps", 200, "--seed", 6,
        ) == 0
        for name in (
            "indices.csv", "unit_root.csv", "fit_sdc_ki_longrun.csv",
            "longrun_summary.csv",
        ):
            assert (out / name).exists(), name
        assert (out / "effects_sdc_ki" / "effects.csv").exists()

    def test_report_deterministic(self, small_dataset, tmp_path):
        outs = []
        for tag in ("r1", "r2"):
            out = tmp_path / tag
            assert run(
                "report", "--league", small_dataset["league"], "--macro", small_dataset["macro"],
                "--out-dir", out, "--mc-reps", 150, "--seed", 7,
            ) == 0
            outs.append(tree_bytes(out))
        assert outs[0] == outs[1]


class TestSimulateCommand:
    def test_league_csv_round_trips(self, tmp_path):
        out = tmp_path / "sim"
        assert run(
            "simulate", "--kind", "league", "--n-teams", 8, "--n-seasons", 6,
            "--dispersion", "1.0", "--churn", 1, "--out-dir", out, "--seed", 8,
        ) == 0
        from leaguebalance import parse_league_csv

        leagues = parse_league_csv(str(out / "league.csv"))
        assert len(leagues) == 6
        assert all(lg.n == 8 for lg in leagues)

    def test_dgp_truth_file(self, tmp_path):
        out = tmp_path / "dgp"
        assert run(
            "simulate", "--kind", "dgp", "--n-seasons", 20, "--dgp-countries", 3,
            "--out-dir", out, "--seed", 9,
        ) == 0
        truth = json.loads((out / "truth.json").read_text())
        assert "long_run" in truth and "cb" in truth["long_run"]
        assert (out / "macro.csv").exists() and (out / "indices.csv").exists()
