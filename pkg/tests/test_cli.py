"""End-to-end checks of the command-line interface.

Everything goes through cli.main(argv) so exit codes and stdout are observed
exactly as a shell would see them (argparse usage errors included).
"""

import json
import math

import pytest

from hyperex.cli import main


def run_cli(capsys, argv):
    rc = main(argv)
    captured = capsys.readouterr()
    return rc, captured.out, captured.err


def run_json(capsys, argv):
    rc, out, _ = run_cli(capsys, argv + ["--json", "--no-meta"])
    assert rc == 0
    return json.loads(out)


class TestConstants:
    def test_full_table_csv(self, capsys):
        rc, out, _ = run_cli(capsys, ["constants", "--csv"])
        assert rc == 0
        lines = out.strip().splitlines()
        assert lines[0] == "d,p,s,sheet,expression,value"
        assert len(lines) == 7
        first = lines[1].split(",")
        assert first[0] == "2" and first[1] == "4" and first[3] == "one"
        assert float(first[-1]) == pytest.approx(2.0 ** 0.75 * math.pi, rel=1e-15)

    def test_single_pair_json(self, capsys):
        report = run_json(capsys, ["constants", "--d", "3", "--p", "4"])
        assert report["command"] == "constants"
        assert set(report) == {
            "command",
            "inputs",
            "outputs",
            "error_estimates",
            "seed",
            "wall_time_ms",
        }
        (row,) = report["outputs"]["rows"]
        assert row["value"] == pytest.approx((2.0 * math.pi) ** 1.25, rel=1e-15)
        assert report["wall_time_ms"] == 0

    def test_two_sheet_row(self, capsys):
        report = run_json(
            capsys, ["constants", "--d", "2", "--p", "6", "--sheet", "two"]
        )
        (row,) = report["outputs"]["rows"]
        assert row["value"] == pytest.approx(
            2.5 ** (1.0 / 3.0) * (2.0 * math.pi) ** (5.0 / 6.0), rel=1e-15
        )

    def test_s_dependence_shows_up(self, capsys):
        r1 = run_json(capsys, ["constants", "--d", "2", "--p", "4"])
        r2 = run_json(capsys, ["constants", "--d", "2", "--p", "4", "--s", "16"])
        v1 = r1["outputs"]["rows"][0]["value"]
        v2 = r2["outputs"]["rows"][0]["value"]
        assert v2 == pytest.approx(v1 * 16.0 ** -0.25, rel=1e-14)

    def test_half_specified_pair_is_usage_error(self, capsys):
        rc, _, err = run_cli(capsys, ["constants", "--d", "2"])
        assert rc == 2
        assert "both --d and --p" in err

    def test_unsupported_pair_is_usage_error(self, capsys):
        rc, _, err = run_cli(capsys, ["constants", "--d", "2", "--p", "5"])
        assert rc == 2
        assert "unsupported pair" in err

    def test_unknown_flag_is_usage_error(self, capsys):
        rc, _, _ = run_cli(capsys, ["constants", "--bogus"])
        assert rc == 2


class TestCurve:
    def test_csv_to_stdout(self, capsys):
        rc, out, _ = run_cli(
            capsys,
            ["curve", "--d", "2", "--p", "6", "--a-min", "0.5", "--a-max", "2",
             "--points", "4"],
        )
        assert rc == 0
        lines = out.strip().splitlines()
        assert lines[0] == "a,q_value,limit_value,ratio"
        assert len(lines) == 5
        for line in lines[1:]:
            a, q, limit, ratio = map(float, line.split(","))
            assert ratio == pytest.approx(q / limit, rel=1e-15)
            assert 0.0 < ratio < 1.0

    def test_out_file_and_seventeen_digit_roundtrip(self, capsys, tmp_path):
        path = tmp_path / "curve.csv"
        report = run_json(
            capsys,
            ["curve", "--d", "2", "--p", "4", "--a-min", "1", "--a-max", "3",
             "--points", "3", "--out", str(path)],
        )
        assert report["outputs"]["csv_path"] == str(path)
        lines = path.read_text().strip().splitlines()
        assert len(lines) == 4
        for row, line in zip(report["outputs"]["rows"], lines[1:]):
            fields = [float(v) for v in line.split(",")]
            # %.17g must reproduce the binary doubles exactly.
            assert fields == [
                row["a"], row["q_value"], row["limit_value"], row["ratio"]
            ]

    def test_monotonicity_verdicts(self, capsys):
        up = run_json(
            capsys,
            ["curve", "--d", "2", "--p", "4", "--a-min", "0.001", "--a-max",
             "100", "--points", "12", "--log-spacing"],
        )
        down = run_json(
            capsys,
            ["curve", "--d", "2", "--p", "6", "--a-min", "0.001", "--a-max",
             "100", "--points", "12", "--log-spacing"],
        )
        assert up["outputs"]["monotonicity"] == "strictly-increasing"
        assert down["outputs"]["monotonicity"] == "strictly-decreasing"
        for row in down["outputs"]["rows"]:
            assert 0.0 < row["ratio"] < 1.0

    def test_degenerate_two_point_grid(self, capsys):
        rc, out, _ = run_cli(
            capsys,
            ["curve", "--d", "2", "--p", "4", "--a-min", "1", "--a-max", "2",
             "--points", "2"],
        )
        assert rc == 0
        lines = out.strip().splitlines()
        assert len(lines) == 3
        assert lines[0] == "a,q_value,limit_value,ratio"

    def test_quadrature_method_reports_error_estimate(self, capsys):
        report = run_json(
            capsys,
            ["curve", "--d", "3", "--p", "4", "--a-min", "1", "--a-max", "2",
             "--points", "2"],
        )
        assert report["inputs"]["method"] == "quadrature"
        assert report["error_estimates"]["q_value_max"] > 0.0
        for row in report["outputs"]["rows"]:
            assert 0.0 < row["ratio"] < 1.0

    def test_closed_method_for_d3_is_usage_error(self, capsys):
        rc, _, err = run_cli(
            capsys,
            ["curve", "--d", "3", "--p", "4", "--a-min", "1", "--a-max", "2",
             "--method", "closed"],
        )
        assert rc == 2
        assert "quadrature" in err

    def test_bad_grid_is_usage_error(self, capsys):
        rc, _, _ = run_cli(
            capsys,
            ["curve", "--d", "2", "--p", "4", "--a-min", "2", "--a-max", "1"],
        )
        assert rc == 2
        rc, _, _ = run_cli(
            capsys,
            ["curve", "--d", "2", "--p", "4", "--a-min", "1", "--a-max", "2",
             "--points", "1"],
        )
        assert rc == 2

    def test_byte_identical_reruns(self, capsys):
        argv = ["curve", "--d", "2", "--p", "4", "--a-min", "0.7", "--a-max",
                "2.9", "--points", "5", "--json", "--no-meta"]
        rc1, out1, _ = run_cli(capsys, argv)
        rc2, out2, _ = run_cli(capsys, argv)
        assert rc1 == rc2 == 0
        assert out1 == out2


class TestConv:
    def test_closed_worked_value(self, capsys):
        rc, out, _ = run_cli(
            capsys,
            ["conv", "--d", "2", "--n", "2", "--s", "1", "--xi", "0,0",
             "--tau", "4"],
        )
        assert rc == 0
        assert out.splitlines()[0] == "value = 1.5707963267948966"

    def test_oracle_agrees_with_closed_d3(self, capsys):
        report = run_json(
            capsys,
            ["conv", "--d", "3", "--n", "2", "--s", "1", "--xi", "0,0,0",
             "--tau", "4", "--method", "oracle"],
        )
        out = report["outputs"]
        assert out["value"] == pytest.approx(math.pi * math.sqrt(3.0), rel=1e-14)
        assert out["abs_difference"] <= max(
            3.0 * report["error_estimates"]["oracle_value"], 1e-9
        )
        off_axis = run_json(
            capsys,
            ["conv", "--d", "3", "--n", "2", "--xi", "3,0,0", "--tau", "5",
             "--method", "oracle"],
        )
        assert off_axis["outputs"]["value"] == pytest.approx(
            math.pi * math.sqrt(3.0), rel=1e-14
        )
        assert off_axis["outputs"]["abs_difference"] < 1e-9

    def test_outside_support_note(self, capsys):
        report = run_json(
            capsys, ["conv", "--d", "2", "--n", "3", "--xi", "1,1", "--tau", "2"]
        )
        assert report["outputs"]["value"] == 0.0
        assert report["outputs"]["notes"] == ["outside-support"]

    def test_boundary_proximate_flag(self, capsys):
        report = run_json(
            capsys,
            ["conv", "--d", "2", "--n", "2", "--xi", "0,0",
             "--tau", "2.0000000001", "--method", "oracle"],
        )
        assert "boundary-proximate" in report["outputs"]["notes"]

    def test_usage_errors(self, capsys):
        rc, _, _ = run_cli(
            capsys, ["conv", "--d", "3", "--n", "3", "--xi", "0,0,0", "--tau", "4"]
        )
        assert rc == 2
        rc, _, err = run_cli(
            capsys, ["conv", "--d", "2", "--n", "2", "--xi", "1,2,3", "--tau", "4"]
        )
        assert rc == 2
        assert "components" in err
        rc, _, _ = run_cli(
            capsys,
            ["conv", "--d", "2", "--n", "3", "--xi", "0,0", "--tau", "4",
             "--method", "oracle"],
        )
        assert rc == 2
        rc, _, _ = run_cli(
            capsys, ["conv", "--d", "2", "--n", "2", "--xi", "a,b", "--tau", "4"]
        )
        assert rc == 2


class TestVerify:
    def test_specfun_suite_passes(self, capsys):
        rc, out, _ = run_cli(capsys, ["verify", "--suite", "specfun"])
        assert rc == 0
        lines = out.strip().splitlines()
        assert all(line.startswith("PASS") for line in lines[:-1])
        assert lines[-1].endswith("0 failed")

    def test_sharp_suite_byte_identical(self, capsys):
        argv = ["verify", "--suite", "sharp", "--seed", "11", "--samples",
                "20000", "--json", "--no-meta"]
        rc1, out1, _ = run_cli(capsys, argv)
        rc2, out2, _ = run_cli(capsys, argv)
        assert rc1 == rc2 == 0
        assert out1 == out2

    def test_oracle_suite_reports_mc_error_estimate(self, capsys):
        report = run_json(capsys, ["verify", "--suite", "oracle", "--seed", "3"])
        assert report["outputs"]["failed_count"] == 0
        assert report["error_estimates"]["oracle/montecarlo-pairing-3sigma"] > 0.0
        assert report["seed"] == 3

    def test_env_seed_pickup(self, capsys, monkeypatch):
        monkeypatch.setenv("HYPEREX_SEED", "123")
        report = run_json(capsys, ["verify", "--suite", "sharp", "--samples",
                                   "20000"])
        assert report["seed"] == 123

    def test_flag_overrides_env_seed(self, capsys, monkeypatch):
        monkeypatch.setenv("HYPEREX_SEED", "123")
        report = run_json(capsys, ["verify", "--suite", "sharp", "--seed", "9",
                                   "--samples", "20000"])
        assert report["seed"] == 9

    def test_invalid_env_seed_is_usage_error(self, capsys, monkeypatch):
        monkeypatch.setenv("HYPEREX_SEED", "not-a-number")
        rc, _, err = run_cli(capsys, ["verify", "--suite", "sharp",
                                      "--samples", "20000"])
        assert rc == 2
        assert "HYPEREX_SEED" in err

    def test_unknown_suite_is_usage_error(self, capsys):
        rc, _, _ = run_cli(capsys, ["verify", "--suite", "nonsense"])
        assert rc == 2

    def test_grid_rescales_budgets(self, capsys):
        report = run_json(
            capsys, ["verify", "--suite", "lorentz", "--grid", "50"]
        )
        assert report["inputs"]["grid"] == 50
        assert report["outputs"]["failed_count"] == 0

    def test_nonpositive_grid_is_usage_error(self, capsys):
        rc, _, err = run_cli(capsys, ["verify", "--suite", "sharp", "--grid", "0"])
        assert rc == 2
        assert "--grid" in err


class TestConcentrate:
    def test_escape_regime(self, capsys):
        report = run_json(
            capsys, ["concentrate", "--d", "2", "--a", "0.001", "--radius", "10"]
        )
        assert report["outputs"]["mass_fraction"] == pytest.approx(0.0179, abs=5e-4)
        assert report["outputs"]["regime"] == "spatial-infinity"

    def test_vertex_regime(self, capsys):
        report = run_json(
            capsys, ["concentrate", "--d", "2", "--a", "100", "--radius", "1"]
        )
        assert report["outputs"]["mass_fraction"] == pytest.approx(1.0, abs=1e-3)
        assert report["outputs"]["regime"] == "vertex"

    def test_d3_runs(self, capsys):
        report = run_json(
            capsys, ["concentrate", "--d", "3", "--a", "2", "--radius", "1"]
        )
        assert 0.0 < report["outputs"]["mass_fraction"] < 1.0

    def test_tiny_radius_fraction_vanishes(self, capsys):
        report = run_json(
            capsys, ["concentrate", "--d", "2", "--a", "1", "--radius", "1e-6"]
        )
        assert report["outputs"]["mass_fraction"] == pytest.approx(0.0, abs=1e-10)
        assert report["outputs"]["regime"] == "spatial-infinity"

    def test_bad_inputs(self, capsys):
        rc, _, _ = run_cli(
            capsys, ["concentrate", "--d", "4", "--a", "1", "--radius", "1"]
        )
        assert rc == 2
        rc, _, _ = run_cli(
            capsys, ["concentrate", "--d", "2", "--a", "-1", "--radius", "1"]
        )
        assert rc == 2


class TestTopLevel:
    def test_no_subcommand_is_usage_error(self, capsys):
        rc, _, _ = run_cli(capsys, [])
        assert rc == 2

    def test_help_exits_zero(self, capsys):
        rc, out, _ = run_cli(capsys, ["--help"])
        assert rc == 0
        assert "constants" in out and "concentrate" in out
