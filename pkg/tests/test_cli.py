"""Scenario parsing, report emission, CLI subcommands and exit codes."""

import json

import pytest

from auction_lab import (
    ExperimentReport,
    ReportRow,
    emit_report,
    parse_report_jsonl,
    parse_scenario,
    run_experiment,
)
from auction_lab.cli import main
from auction_lab.errors import SchemaError, UnknownExperiment
from auction_lab.reports import CSV_COLUMNS

MINIMAL = {
    "version": 1,
    "market": {
        "components": [{"family": "uniform", "a": 0, "b": 1}],
        "weights": [[1.0], [1.0]],
    },
    "mechanism": {"kind": "second_price"},
    "estimator": {"seed": 7, "n_samples": 5000},
}


def scenario_text(**overrides):
    doc = json.loads(json.dumps(MINIMAL))
    for key, value in overrides.items():
        doc[key] = value
    return json.dumps(doc)


class TestParseScenario:
    def test_minimal_valid(self):
        config = parse_scenario(scenario_text())
        assert config.market.n == 2 and config.market.k == 1
        assert config.estimator.seed == 7

    def test_row_sum_diagnostic_names_the_row(self):
        bad = scenario_text(
            market={
                "components": [{"family": "uniform", "a": 0, "b": 1}],
                "weights": [[1.1], [1.0]],
            }
        )
        with pytest.raises(SchemaError) as err:
            parse_scenario(bad)
        assert err.value.path == "market.weights[0]"
        assert "sum" in err.value.reason

    def test_unknown_family(self):
        bad = scenario_text(
            market={"components": [{"family": "cauchy"}], "weights": [[1.0]]}
        )
        with pytest.raises(SchemaError) as err:
            parse_scenario(bad)
        assert err.value.path == "market.components[0].family"

    def test_seed_mandatory(self):
        with pytest.raises(SchemaError) as err:
            parse_scenario(scenario_text(estimator={"n_samples": 100}))
        assert err.value.path == "estimator.seed"

    def test_fallback_seed_accepted(self):
        config = parse_scenario(
            scenario_text(estimator={"n_samples": 100}), default_seed=55
        )
        assert config.estimator.seed == 55

    def test_version_is_pinned(self):
        with pytest.raises(SchemaError):
            parse_scenario(scenario_text(version=2))

    def test_iid_shorthand(self):
        config = parse_scenario(
            scenario_text(
                market={
                    "components": [
                        {"family": "uniform", "a": 0, "b": 1},
                        {"family": "exponential", "rate": 1.0},
                    ],
                    "iid": True,
                    "weights": [0.4, 0.6],
                    "n": 3,
                }
            )
        )
        assert config.market.n == 3 and config.market.iid

    def test_bad_family_parameters(self):
        bad = scenario_text(
            market={
                "components": [{"family": "uniform", "a": 2, "b": 1}],
                "weights": [[1.0]],
            }
        )
        with pytest.raises(SchemaError):
            parse_scenario(bad)

    def test_extras_validated(self):
        bad = scenario_text(extras=[{"component": 5}])
        with pytest.raises(SchemaError) as err:
            parse_scenario(bad)
        assert "extras[0]" in err.value.path

    def test_not_json(self):
        with pytest.raises(SchemaError):
            parse_scenario("not json {")


class TestEmitReport:
    def sample_report(self):
        rows = (
            ReportRow("second_price", 0.5, 0.01, 1000, "mc"),
            ReportRow("ratio:a_over_b", 1.2, 0.02, 0, "ratio", "ratio <= 2", "pass"),
        )
        return ExperimentReport(scenario_id="s", rows=rows, seed=1)

    def test_empty_report_header_only(self):
        report = ExperimentReport(scenario_id="s", rows=(), seed=1)
        data = emit_report(report, "csv").decode()
        assert data == ",".join(CSV_COLUMNS) + "\n"

    def test_csv_columns_exact(self):
        data = emit_report(self.sample_report(), "csv").decode()
        header, row1, row2 = data.strip().split("\n")
        assert header == "scenario_id,mechanism,mean,std_err,n_samples,method,bound_tested,verdict"
        assert row1 == "s,second_price,0.5,0.01,1000,mc,,"
        assert row2.endswith("ratio <= 2,pass")

    def test_jsonl_round_trip(self):
        report = self.sample_report()
        data = emit_report(report, "json-lines")
        parsed = parse_report_jsonl(data)
        assert parsed.rows == report.rows
        assert emit_report(parsed, "json-lines") == data

    def test_text_table(self):
        data = emit_report(self.sample_report(), "text-table").decode()
        assert data.splitlines()[0].startswith("scenario_id")

    def test_appendix_report_row_count(self):
        report = run_experiment("appendix-lb", seed=1)
        assert len(report.estimates) == 3
        assert len(report.ratios) == 1

    def test_unknown_format(self):
        with pytest.raises(ValueError):
            emit_report(self.sample_report(), "xml")


class TestCliCommands:
    def write_scenario(self, tmp_path, text=None):
        path = tmp_path / "scenario.json"
        path.write_text(text or scenario_text())
        return str(path)

    def test_simulate_exit_zero(self, tmp_path, capsys):
        code = main(["simulate", self.write_scenario(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("scenario_id,mechanism")
        assert "second_price" in out

    def test_simulate_writes_file(self, tmp_path):
        out = tmp_path / "report.csv"
        code = main(["simulate", self.write_scenario(tmp_path), "--out", str(out)])
        assert code == 0
        assert out.read_text().startswith("scenario_id")

    def test_schema_error_exit_one(self, tmp_path, capsys):
        path = tmp_path / "bad.json"
        path.write_text("{}")
        assert main(["simulate", str(path)]) == 1
        assert "error" in capsys.readouterr().err

    def test_reproduce_pass_exit_zero(self, capsys):
        assert main(["reproduce", "tvsnt"]) == 0

    def test_reproduce_unknown_exit_one(self, capsys):
        assert main(["reproduce", "nope"]) == 1

    def test_env_seed_fallback(self, tmp_path, monkeypatch, capsys):
        text = scenario_text(estimator={"n_samples": 2000})
        path = tmp_path / "noseed.json"
        path.write_text(text)
        assert main(["simulate", str(path)]) == 1  # no seed anywhere
        monkeypatch.setenv("AUCTION_LAB_SEED", "99")
        assert main(["simulate", str(path)]) == 0

    def test_seed_flag_beats_scenario(self, tmp_path, capsys):
        path = self.write_scenario(tmp_path)
        main(["simulate", path, "--seed", "1", "--format", "json-lines"])
        first = capsys.readouterr().out
        main(["simulate", path, "--seed", "2", "--format", "json-lines"])
        second = capsys.readouterr().out
        assert first != second

    def test_check_hr(self, tmp_path, capsys):
        doc = json.loads(scenario_text())
        doc["market"]["components"] = [
            {"family": "uniform", "a": 0, "b": 2},
            {"family": "uniform", "a": 0, "b": 1},
        ]
        doc["market"]["weights"] = [[0.5, 0.5], [0.5, 0.5]]
        path = tmp_path / "hr.json"
        path.write_text(json.dumps(doc))
        assert main(["check-hr", str(path)]) == 0
        record = json.loads(capsys.readouterr().out)
        assert record["dominant_component"] == 0
        assert record["dominates"][0][1] is True

    def test_plan_emits_records(self, tmp_path, capsys):
        assert main(["plan", self.write_scenario(tmp_path), "--samples", "4000"]) == 0
        lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
        strategies = {r.get("strategy") for r in lines}
        assert "targeted_per_component" in strategies

    def test_ratio_subcommand(self, tmp_path, capsys):
        assert main(["ratio", self.write_scenario(tmp_path)]) == 0
        out = capsys.readouterr().out
        assert "benchmark_over_mechanism" in out


class TestReproducibility:
    def test_reproduce_byte_identical(self):
        for name in ("appendix-lb", "hr09-lb", "tvsnt"):
            a = emit_report(run_experiment(name, seed=4), "csv")
            b = emit_report(run_experiment(name, seed=4), "csv")
            assert a == b, name

    def test_sweep_byte_identical_and_seed_sensitive(self):
        a = emit_report(run_experiment("thm1-sweep", seed=4, n_samples=4000), "csv")
        b = emit_report(run_experiment("thm1-sweep", seed=4, n_samples=4000), "csv")
        c = emit_report(run_experiment("thm1-sweep", seed=5, n_samples=4000), "csv")
        assert a == b
        assert a != c

    def test_unknown_experiment(self):
        with pytest.raises(UnknownExperiment):
            run_experiment("definitely-not-an-experiment")
