"""Tests for bundles, reports, scenarios and the command-line entry point."""

import json
import os
import sys

import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))

from coarse_toolkit.cli import (
    SCENARIOS,
    AssertionRecorder,
    ScenarioReport,
    bundle_from_dict,
    get_scenario,
    read_bundle,
    run_scenario,
)
from coarse_toolkit.cli.main import EXIT_OK, EXIT_USAGE, _scenario_params, build_parser, main
from coarse_toolkit.cli.scenarios import coerce_param
from coarse_toolkit.core.config import configure, get_settings
from coarse_toolkit.core.errors import ScenarioError, SchemaError

REQUIRED_SCENARIOS = [
    "comb-Q",
    "comb-K",
    "heisenberg-K",
    "coeq-sandwich",
    "rips-constants",
    "cubes-window",
    "zhang-projection",
    "maximal-metric-comb",
]


def segment_bundle():
    return {
        "spaces": {"X": {"points": ["a", "b", "c"], "dist": [[0, 1, 2], [1, 0, 1], [2, 1, 0]]}},
        "maps": {"f": {"source": "X", "target": "X", "assign": {"a": "a", "b": "b", "c": "c"}}},
        "windows": {"w": {"space": "X", "points": ["a", "b"]}},
    }


@pytest.fixture
def restore_settings():
    saved = get_settings()
    yield
    configure(saved)


class TestBundles:
    def test_valid_bundle(self):
        bundle = bundle_from_dict(segment_bundle())
        assert bundle.space("X").distance("a", "c") == 2.0
        assert bundle.map("f")("b") == "b"
        assert bundle.window("w").indices.tolist() == [0, 1]
        assert bundle.window(None) is None

    @pytest.mark.parametrize(
        "mutate, pointer",
        [
            (lambda d: d["spaces"]["X"].update(dist=[[0, 1, 2]]), "/spaces/X/dist"),
            (lambda d: d["maps"]["f"].update(target="Z"), "/maps/f/target"),
            (lambda d: d["windows"]["w"].update(points=["a", "zz"]), "/windows/w/points"),
            (lambda d: d["windows"]["w"].update(space="Z"), "/windows/w/space"),
            (lambda d: d.update(extra=1), "/extra"),
        ],
    )
    def test_schema_pointers(self, mutate, pointer):
        """Errors name the JSON pointer of the offending value."""
        data = segment_bundle()
        mutate(data)
        with pytest.raises(SchemaError) as excinfo:
            bundle_from_dict(data)
        assert excinfo.value.pointer == pointer

    def test_read_bundle_rejects_bad_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(SchemaError):
            read_bundle(str(path))


class TestReports:
    def test_recorder(self):
        recorder = AssertionRecorder("demo")
        assert recorder.record("anchor", "first", True, 1, 1)
        assert not recorder.record("anchor", "second", False, 3, "<= 2", pair=["a", "b"])
        assert not recorder.ok
        assert [r.name for r in recorder.failures] == ["second"]

        report = ScenarioReport("demo", "anchor", {"n": 2}, recorder.records)
        assert report.exit_code == 1
        document = json.loads(report.to_json())
        assert document["status"] == "fail"
        assert document["assertions"][1]["detail"] == {"pair": ["a", "b"]}
        assert report.profile_csv() is None

    def test_passing_report(self):
        recorder = AssertionRecorder("demo")
        recorder.record("anchor", "only", True, float("inf"), float("inf"))
        report = ScenarioReport("demo", "anchor", {}, recorder.records)
        assert report.exit_code == 0
        assert json.loads(report.to_json())["assertions"][0]["observed"] == "inf"


class TestScenarios:
    def test_registry(self):
        assert set(REQUIRED_SCENARIOS) <= set(SCENARIOS)
        assert {"heisenberg-growth", "definitional-checks"} <= set(SCENARIOS)
        assert all(scenario.anchor for scenario in SCENARIOS.values())

    def test_unknown_scenario(self):
        with pytest.raises(ScenarioError):
            get_scenario("nope")

    def test_unknown_parameter(self):
        with pytest.raises(ScenarioError):
            run_scenario("comb-Q", {"colour": "red"})

    def test_coerce_param(self):
        assert coerce_param("4,6", (4,), "demo", "windows") == (4, 6)
        assert coerce_param("2.5", 1.0, "demo", "sigma") == 2.5
        assert coerce_param("yes", False, "demo", "flag") is True
        with pytest.raises(ScenarioError):
            coerce_param("x", 1, "demo", "n_max")

    def test_coerce_param_rejects_fractional_integers(self):
        assert coerce_param(3.0, 1, "demo", "sigma") == 3
        with pytest.raises(ScenarioError):
            coerce_param(2.5, 1, "demo", "sigma")

    @pytest.mark.parametrize("sigma", [0, -1, "inf"])
    def test_nonpositive_sigma(self, sigma):
        with pytest.raises(ScenarioError):
            get_scenario("comb-Q").resolve({"sigma": sigma})
        with pytest.raises(ScenarioError):
            get_scenario("maximal-metric-comb").resolve({"sigmas": (2.0, sigma)})

    def test_heisenberg_growth_stores_eight_radii(self):
        report = run_scenario("heisenberg-growth")
        checked = {r.name: r for r in report.assertions if r.name.startswith("ball_size_")}
        assert set(checked) == {f"ball_size_{R}" for R in range(1, 9)}
        assert checked["ball_size_8"].ok
        assert checked["ball_size_8"].observed == 1953

    def test_maximal_metric_comb_sweeps_sigmas(self):
        """With EXP2 every arrow holds and the ratio grows at both scales."""
        report = run_scenario("maximal-metric-comb", {"family": "4,6"})
        assert report.params["theta"] == "exp2"
        assert report.params["sigmas"] == (2.0, 3.0)
        names = {r.name: r.ok for r in report.assertions}
        assert names["ratio_grows_s2"] and names["ratio_grows_s3"]
        assert all(names[f"factorisation_n{n}_s{s}"] for n in (4, 6) for s in (2, 3))
        assert report.ok

    def test_definitional_oracle_covers_scenario_graphs(self):
        """Every scenario graph within the oracle limit is compared with Floyd-Warshall."""
        report = run_scenario("definitional-checks")
        oracle = {r.name: r for r in report.assertions if r.name.startswith("oracle_")}
        for n in (4, 6):
            assert oracle[f"oracle_comb_n{n}"].ok
            assert oracle[f"oracle_comb_quotient_n{n}_s2"].ok
            assert oracle[f"oracle_comb_quotient_n{n}_s3"].ok
        assert oracle["oracle_heisenberg_cayley_R4"].observed == 189
        assert {"oracle_coarse_glue", "oracle_coequaliser"} <= set(oracle)
        assert {"comb_n8", "comb_n10"} <= set(report.data["oracle_skipped"])
        assert all(r.ok for r in oracle.values())

    @pytest.mark.parametrize("name", REQUIRED_SCENARIOS + ["heisenberg-growth", "definitional-checks"])
    def test_scenario_passes(self, name, tmp_path):
        """Every registered scenario passes with its defaults and writes its files."""
        report = run_scenario(name, out_dir=tmp_path)
        failed = [(r.name, r.observed, r.expected) for r in report.assertions if not r.ok]
        assert report.ok, failed
        assert report.assertions
        assert (tmp_path / name / "report.json").exists()
        assert (tmp_path / name / "profile.csv").exists() == bool(report.profiles)


class TestMain:
    def test_list_scenarios(self, capsys):
        assert main(["scenarios"]) == EXIT_OK
        assert "comb-Q" in capsys.readouterr().out

    def test_list_scenarios_verbose(self, capsys):
        assert main(["scenarios", "--verbose"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "defaults: family=4,6,8, sigmas=2.0,3.0, theta=exp2" in out

    def test_profile_default_grid(self, tmp_path, capsys, restore_settings):
        """Without --sigma the grid is 0 and the realized distances up to sigma_cap."""
        path = tmp_path / "segment.json"
        path.write_text(json.dumps(segment_bundle()), encoding="utf-8")
        assert main(["kfilt", str(path)]) == EXIT_OK
        rows = capsys.readouterr().out.splitlines()[1:]
        assert sorted({row.split(",")[1] for row in rows}) == ["0", "1", "2"]
        assert len(rows) == 6

        config = tmp_path / "settings.json"
        config.write_text(json.dumps({"sigma_cap": 1.0}), encoding="utf-8")
        assert main(["qfilt", str(path), "--config", str(config)]) == EXIT_OK
        rows = capsys.readouterr().out.splitlines()[1:]
        assert sorted({row.split(",")[1] for row in rows}) == ["0", "1"]
        assert len(rows) == 3

    @pytest.mark.parametrize("sigma", ["0", "2.5", "-1"])
    def test_bad_scenario_sigma(self, sigma, tmp_path, capsys):
        assert main(["scenario", "comb-Q", "--sigma", sigma, "--out", str(tmp_path)]) == EXIT_USAGE
        assert "sigma" in capsys.readouterr().err

    def test_sigma_flag_fills_sigma_sweep(self):
        args = build_parser().parse_args(["scenario", "maximal-metric-comb", "--sigma", "3"])
        params = _scenario_params(args, get_scenario("maximal-metric-comb").defaults)
        assert params == {"sigmas": (3.0,)}
        assert get_scenario("maximal-metric-comb").resolve(params)["sigmas"] == (3.0,)

    def test_pipeline(self, tmp_path, capsys):
        """A generated comb bundle feeds the q-filtration profile."""
        bundle = tmp_path / "comb.json"
        assert main(["space", "gen", "comb", "--n-max", "3", "--out", str(bundle)]) == EXIT_OK
        assert "interior" in json.loads(bundle.read_text(encoding="utf-8"))["windows"]

        assert main(["qfilt", str(bundle), "--sigma", "2,3"]) == EXIT_OK
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "sigma,tau,record_kind,value,window_size,truncation_param"
        assert len(lines) > 1

        assert main(["kfilt", str(bundle), "--sigma", "2,3", "--window", "interior"]) == EXIT_OK
        assert capsys.readouterr().out.startswith("sigma,tau")

    def test_classify(self, tmp_path, capsys):
        path = tmp_path / "segment.json"
        path.write_text(json.dumps(segment_bundle()), encoding="utf-8")
        assert main(["classify", str(path), "--slopes", "1"]) == EXIT_OK
        result = json.loads(capsys.readouterr().out)
        assert result["coarse_equivalence"] is True
        assert result["surjectivity_radius"] == 0

    def test_space_load(self, tmp_path, capsys):
        path = tmp_path / "segment.json"
        path.write_text(json.dumps(segment_bundle()), encoding="utf-8")
        assert main(["space", "load", str(path)]) == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["spaces"]["X"]["size"] == 3
        assert summary["spaces"]["X"]["metric"]["ok"] is True

    def test_usage_errors(self, tmp_path, capsys):
        """Unknown scenarios, schema violations and --exact refusals exit with 2."""
        assert main(["scenario", "nope", "--out", str(tmp_path)]) == EXIT_USAGE

        data = segment_bundle()
        data["spaces"]["X"]["dist"] = [[0, 1.5, 2], [1.5, 0, 1], [2, 1, 0]]
        path = tmp_path / "float.json"
        path.write_text(json.dumps(data), encoding="utf-8")
        assert main(["space", "load", str(path), "--exact"]) == EXIT_USAGE

        broken = tmp_path / "broken.json"
        broken.write_text("[]", encoding="utf-8")
        assert main(["space", "load", str(broken)]) == EXIT_USAGE
        assert "error" in capsys.readouterr().err

    def test_scenario_command(self, tmp_path, capsys, restore_settings):
        config = tmp_path / "settings.json"
        config.write_text(json.dumps({"log_level": "WARNING"}), encoding="utf-8")
        code = main(["scenario", "cubes-window", "--config", str(config), "--out", str(tmp_path)])
        assert code == EXIT_OK
        assert "cubes-window: pass" in capsys.readouterr().out
        assert (tmp_path / "cubes-window" / "report.json").exists()
