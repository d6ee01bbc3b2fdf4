"""Tests for the command-line front end.

Each subcommand is exercised through :func:`recordlab.cli.main` with
captured output; values in the emitted CSV are compared against the
library calls the command wraps, and the documented exit codes (0
success, 2 validation, 3 numerical failure) are pinned down.
"""

import csv
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from recordlab import cli
from recordlab.models import CorrelationModel, CrossCorrelationModel
from recordlab.multivariate import complete_record_probability
from recordlab.records import joint_record_cdf, record_probability


def run_cli(capsys, argv):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(out):
    """Split CSV output into (header dict, column names, data rows)."""
    header = {}
    body = []
    for line in out.splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition("=")
            header[key] = value
        else:
            body.append(line)
    parsed = list(csv.reader(body))
    columns = parsed[0] if parsed else []
    rows = [dict(zip(columns, row)) for row in parsed[1:]]
    return header, columns, rows


class TestOutputFormat:
    def test_csv_layout(self, capsys):
        code, out, _ = run_cli(capsys, ["record-prob", "--n", "4"])
        assert code == 0
        header, columns, rows = parse_csv(out)
        assert header["command"] == "record-prob"
        assert header["model"] == "iid"
        assert columns == ["n", "value", "abs_error", "dim", "converged"]
        assert len(rows) == 1
        assert_allclose(float(rows[0]["value"]), 0.25, atol=1e-4)
        assert rows[0]["converged"] == "true"

    def test_table_mode(self, capsys):
        code, out, _ = run_cli(
            capsys, ["record-prob", "--n-max", "4", "--model", "ar1:0.5"]
        )
        assert code == 0
        _, _, rows = parse_csv(out)
        assert [row["n"] for row in rows] == ["2", "3", "4"]

    def test_pretty_format(self, capsys):
        code, out, _ = run_cli(
            capsys, ["record-prob", "--n", "3", "--format", "pretty"]
        )
        assert code == 0
        assert "command = record-prob" in out
        assert "," not in out.splitlines()[-1]

    def test_out_file_matches_stdout(self, capsys, tmp_path):
        argv = ["record-prob", "--n", "3", "--model", "ar1:0.5"]
        code, out, _ = run_cli(capsys, argv)
        assert code == 0
        target = tmp_path / "law.csv"
        code2, out2, _ = run_cli(capsys, argv + ["--out", str(target)])
        assert code2 == 0 and out2 == ""
        assert target.read_text() == out

    def test_reruns_are_byte_identical(self, capsys):
        argv = ["record-prob", "--n", "6", "--model", "ar1:0.5", "--seed", "7"]
        _, first, _ = run_cli(capsys, argv)
        _, second, _ = run_cli(capsys, argv)
        assert first == second


class TestModelSpecs:
    @pytest.mark.parametrize(
        "spec, model",
        [
            ("iid", CorrelationModel.iid()),
            ("ar1:0.5", CorrelationModel.ar1(0.5)),
            ("eq:0.3", CorrelationModel.equicorrelated(0.3)),
            ("tab:0.4,0.1", CorrelationModel.tabulated([0.4, 0.1])),
        ],
    )
    def test_spec_matches_library(self, capsys, spec, model):
        code, out, _ = run_cli(capsys, ["record-prob", "--model", spec, "--n", "3"])
        assert code == 0
        _, _, rows = parse_csv(out)
        expected = record_probability(model, 3)
        assert float(rows[0]["value"]) == expected.value

    def test_gamma_identity_spec(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["expected-records", "--model", "gamma-identity:0.5",
             "--horizon", "12"],
        )
        assert code == 0
        _, _, rows = parse_csv(out)
        assert rows[0]["classification"] == "convergent"
        assert_allclose(float(rows[0]["total"]), 2.0, atol=1e-3)

    @pytest.mark.parametrize(
        "spec", ["bogus:1", "ar1:abc", "ar1:1.5", "eq:", "tab:0.9,-0.9"]
    )
    def test_bad_specs_exit_two(self, capsys, spec):
        code, _, err = run_cli(capsys, ["record-prob", "--model", spec, "--n", "3"])
        assert code == 2
        assert "error:" in err


class TestModelFiles:
    def test_lag_table(self, capsys, tmp_path):
        path = tmp_path / "acf.csv"
        path.write_text("# fitted autocorrelations\nlag,value\n1,0.4\n3,0.1\n")
        code, out, _ = run_cli(
            capsys, ["record-prob", "--model-file", str(path), "--n", "4"]
        )
        assert code == 0
        header, _, rows = parse_csv(out)
        assert header["model"] == f"file:{path}"
        expected = record_probability(CorrelationModel.tabulated([0.4, 0.0, 0.1]), 4)
        assert float(rows[0]["value"]) == expected.value

    def test_explicit_matrix(self, capsys, tmp_path):
        path = tmp_path / "matrix.csv"
        rows_txt = "\n".join(
            ",".join(str(0.5 ** abs(i - j)) for j in range(4)) for i in range(4)
        )
        path.write_text(rows_txt + "\n")
        code, out, _ = run_cli(
            capsys, ["record-prob", "--model-file", str(path), "--n", "4"]
        )
        assert code == 0
        _, _, rows = parse_csv(out)
        expected = record_probability(CorrelationModel.ar1(0.5), 4)
        assert_allclose(float(rows[0]["value"]), expected.value, atol=1e-12)

    def test_jitter_perturbs_matrix(self, capsys, tmp_path):
        path = tmp_path / "matrix.csv"
        path.write_text("1,0.5,0.25\n0.5,1,0.5\n0.25,0.5,1\n")
        base = ["record-prob", "--model-file", str(path), "--n", "3"]
        _, plain, _ = run_cli(capsys, base)
        _, jittered, _ = run_cli(capsys, base + ["--jitter", "0.05"])
        _, _, rows_a = parse_csv(plain)
        _, _, rows_b = parse_csv(jittered)
        assert rows_a[0]["value"] != rows_b[0]["value"]

    def test_file_errors(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, ["record-prob", "--model-file", str(tmp_path / "nope.csv"),
                     "--n", "3"]
        )
        assert code == 2 and "not found" in err
        empty = tmp_path / "empty.csv"
        empty.write_text("# only comments\n")
        code, _, err = run_cli(
            capsys, ["record-prob", "--model-file", str(empty), "--n", "3"]
        )
        assert code == 2 and "empty" in err
        ragged = tmp_path / "ragged.csv"
        ragged.write_text("1,0.5\n0.5,1\n0.1,0.2\n")
        code, _, err = run_cli(
            capsys, ["record-prob", "--model-file", str(ragged), "--n", "3"]
        )
        assert code == 2 and "square" in err


class TestUnivariateCommands:
    def test_record_cdf(self, capsys):
        code, out, _ = run_cli(
            capsys, ["record-cdf", "--n", "2", "--x", "0,1"]
        )
        assert code == 0
        _, _, rows = parse_csv(out)
        assert_allclose(float(rows[0]["value"]), 0.25, atol=1e-6)
        assert float(rows[1]["value"]) > float(rows[0]["value"])

    def test_arrival_times(self, capsys):
        code, out, _ = run_cli(capsys, ["arrival-times", "--times", "2,3"])
        assert code == 0
        _, _, rows = parse_csv(out)
        assert_allclose(float(rows[0]["value"]), 1.0 / 6.0, atol=1e-5)

    def test_t2_pmf_table(self, capsys):
        code, out, _ = run_cli(capsys, ["t2-pmf", "--n-max", "4"])
        assert code == 0
        _, _, rows = parse_csv(out)
        values = [float(row["value"]) for row in rows]
        assert_allclose(values, [0.5, 1.0 / 6.0, 1.0 / 12.0], atol=1e-5)

    def test_joint_commands(self, capsys):
        code, out, _ = run_cli(capsys, ["joint-prob", "--j", "2", "--n", "4"])
        assert code == 0
        _, _, rows = parse_csv(out)
        assert_allclose(float(rows[0]["value"]), 0.125, atol=1e-5)
        code, out, _ = run_cli(capsys, ["cons-joint-prob", "--j", "2", "--n", "4"])
        assert code == 0
        _, _, rows = parse_csv(out)
        assert_allclose(float(rows[0]["value"]), 1.0 / 12.0, atol=1e-5)

    def test_joint_cdf_matches_library(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["joint-cdf", "--model", "ar1:0.5", "--j", "2", "--n", "4",
             "--x1", "0.3", "--x2", "1.1", "--seed", "4"],
        )
        assert code == 0
        _, _, rows = parse_csv(out)
        expected = joint_record_cdf(CorrelationModel.ar1(0.5), 2, 4, 0.3, 1.1, seed=4)
        assert float(rows[0]["value"]) == expected.value

    def test_increment_cdf(self, capsys):
        code, out, _ = run_cli(
            capsys, ["increment-cdf", "--x", "1.0", "--max-dim", "6"]
        )
        assert code == 0
        _, columns, rows = parse_csv(out)
        assert columns == ["x", "value", "abs_error", "terms", "last_index",
                           "residual_bound", "status"]
        assert rows[0]["status"] == "truncated"
        assert 0.0 < float(rows[0]["value"]) < 1.0

    def test_increment2_cdf(self, capsys):
        code, out, _ = run_cli(
            capsys, ["increment2-cdf", "--x", "0.8", "--max-dim", "7"]
        )
        assert code == 0
        _, _, rows = parse_csv(out)
        assert int(rows[0]["terms"]) > 0


class TestMultivariateCommands:
    ARGS = ["--d", "2", "--model", "ar1:0.5", "--cross-rho", "0.6"]
    MODEL = CrossCorrelationModel.separable(
        CorrelationModel.ar1(0.5), [[1.0, 0.6], [0.6, 1.0]]
    )

    def test_complete_prob_matches_library(self, capsys):
        code, out, _ = run_cli(
            capsys, ["complete-prob", *self.ARGS, "--n", "3", "--seed", "2"]
        )
        assert code == 0
        header, _, rows = parse_csv(out)
        assert header["d"] == "2"
        expected = complete_record_probability(self.MODEL, 3, seed=2)
        assert float(rows[0]["value"]) == expected.value

    def test_complete_cdf(self, capsys):
        code, out, _ = run_cli(
            capsys, ["complete-cdf", *self.ARGS, "--n", "3", "--x", "0.5,1.0"]
        )
        assert code == 0
        _, _, rows = parse_csv(out)
        assert 0.0 < float(rows[0]["value"]) < 1.0

    def test_joint_complete_commands(self, capsys):
        code, out, _ = run_cli(
            capsys, ["joint-complete-prob", *self.ARGS, "--j", "2", "--n", "4"]
        )
        assert code == 0
        _, _, rows = parse_csv(out)
        prob = float(rows[0]["value"])
        assert 0.0 < prob < 1.0
        code, out, _ = run_cli(
            capsys,
            ["joint-complete-cdf", *self.ARGS, "--j", "2", "--n", "4",
             "--x1", "0.2,0.5", "--x2", "1.0,0.8"],
        )
        assert code == 0
        _, _, rows = parse_csv(out)
        assert 0.0 < float(rows[0]["value"]) < 1.0

    def test_missing_dimensions_exit_two(self, capsys):
        code, _, err = run_cli(capsys, ["complete-prob", "--n", "3"])
        assert code == 2
        assert "--cross-file or --d" in err

    def test_cross_file(self, capsys, tmp_path):
        path = tmp_path / "cross.csv"
        path.write_text(
            "# lag=0\n1,0.6\n0.6,1\n# lag=1\n0.3,0.18\n0.18,0.3\n"
        )
        code, out, _ = run_cli(
            capsys, ["complete-prob", "--cross-file", str(path), "--n", "2"]
        )
        assert code == 0
        _, _, rows = parse_csv(out)
        model = CrossCorrelationModel(
            d=2,
            lag_blocks=(
                np.array([[1.0, 0.6], [0.6, 1.0]]),
                np.array([[0.3, 0.18], [0.18, 0.3]]),
            ),
        )
        expected = complete_record_probability(model, 2)
        assert float(rows[0]["value"]) == expected.value

    def test_cross_file_errors(self, capsys, tmp_path):
        missing_zero = tmp_path / "nolag0.csv"
        missing_zero.write_text("# lag=1\n0.3,0.1\n0.1,0.3\n")
        code, _, err = run_cli(
            capsys, ["complete-prob", "--cross-file", str(missing_zero), "--n", "2"]
        )
        assert code == 2 and "lag-0" in err
        gapped = tmp_path / "gap.csv"
        gapped.write_text("# lag=0\n1,0\n0,1\n# lag=2\n0.1,0\n0,0.1\n")
        code, _, err = run_cli(
            capsys, ["complete-prob", "--cross-file", str(gapped), "--n", "2"]
        )
        assert code == 2 and "lags 0..2" in err
        headless = tmp_path / "headless.csv"
        headless.write_text("1,0\n0,1\n")
        code, _, err = run_cli(
            capsys, ["complete-prob", "--cross-file", str(headless), "--n", "2"]
        )
        assert code == 2 and "lag=0" in err


class TestAsymptoticCommands:
    def test_theta_chernick(self, capsys):
        code, out, _ = run_cli(capsys, ["theta", "--chernick-m", "4"])
        assert code == 0
        _, _, rows = parse_csv(out)
        assert float(rows[0]["theta"]) == 0.75
        assert rows[0]["provenance"] == "analytic-chernick"
        assert float(rows[0]["gev_gamma"]) == -1.0

    def test_theta_stable(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["theta", "--stable-coeffs", "1,0.5", "--stable-alpha", "1.5"],
        )
        assert code == 0
        _, _, rows = parse_csv(out)
        assert_allclose(float(rows[0]["theta"]), 0.19947114020071635, atol=1e-14)

    def test_theta_hsing(self, capsys):
        code, out, _ = run_cli(capsys, ["theta", "--hsing-deltas", "1:1"])
        assert code == 0
        _, _, rows = parse_csv(out)
        assert_allclose(float(rows[0]["theta"]), 0.6826894921370881, atol=1e-7)

    def test_theta_family_selection_errors(self, capsys):
        code, _, err = run_cli(capsys, ["theta"])
        assert code == 2 and "exactly one" in err
        code, _, err = run_cli(
            capsys, ["theta", "--chernick-m", "2", "--hsing-deltas", "1:1"]
        )
        assert code == 2
        code, _, err = run_cli(capsys, ["theta", "--stable-coeffs", "1"])
        assert code == 2 and "--stable-alpha" in err
        code, _, err = run_cli(capsys, ["theta", "--hsing-deltas", "1=1"])
        assert code == 2 and "LAG:VALUE" in err

    def test_gev_families(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["gev", "--family", "frechet", "--param", "1", "--theta", "0.5",
             "--x", "1,2"],
        )
        assert code == 0
        _, _, rows = parse_csv(out)
        assert_allclose(
            [float(r["cdf"]) for r in rows],
            [math.exp(-0.5), math.exp(-0.25)],
            atol=1e-12,
        )
        code, out, _ = run_cli(capsys, ["gev", "--x", "0"])
        assert code == 0
        _, _, rows = parse_csv(out)
        assert_allclose(float(rows[0]["cdf"]), math.exp(-1.0), atol=1e-12)


class TestSimulateCommand:
    def test_chernick_rates(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["simulate", "--process", "chernick:2", "--n", "50",
             "--paths", "400", "--seed", "3"],
        )
        assert code == 0
        header, _, rows = parse_csv(out)
        assert header["process"] == "chernick:2"
        assert len(rows) == 50
        assert float(rows[0]["rate"]) == 1.0

    def test_stable_process_spec(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["simulate", "--process", "stable-ma:1,0.5:1.5", "--n", "20",
             "--paths", "200", "--seed", "5"],
        )
        assert code == 0
        _, _, rows = parse_csv(out)
        assert len(rows) == 20

    def test_bad_stable_spec(self, capsys):
        code, _, err = run_cli(
            capsys,
            ["simulate", "--process", "stable-ma:1,0.5", "--n", "10",
             "--paths", "10"],
        )
        assert code == 2 and "ALPHA" in err

    def test_estimate_theta_header(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["simulate", "--process", "chernick:2", "--n", "2000",
             "--paths", "100", "--estimate-theta", "--r", "5", "--q", "0.98",
             "--seed", "3"],
        )
        assert code == 0
        header, _, _ = parse_csv(out)
        assert 0.3 < float(header["theta_hat"]) < 0.7
        assert float(header["theta_lo"]) <= float(header["theta_hat"])

    def test_cross_process(self, capsys):
        code, out, _ = run_cli(
            capsys,
            ["simulate", "--process", "cross", "--d", "2", "--model", "ar1:0.5",
             "--cross-rho", "0.3", "--n", "4", "--paths", "500", "--seed", "1"],
        )
        assert code == 0
        _, _, rows = parse_csv(out)
        assert len(rows) == 4

    def test_dump_paths(self, capsys, tmp_path):
        target = tmp_path / "paths.npy"
        code, _, _ = run_cli(
            capsys,
            ["simulate", "--process", "iid", "--n", "6", "--paths", "30",
             "--dump", str(target)],
        )
        assert code == 0
        saved = np.load(target)
        assert saved.shape == (30, 6)


class TestValidateCommand:
    def test_iid_suite_passes(self, capsys):
        code, out, _ = run_cli(capsys, ["validate", "--suite", "iid", "--n-max", "5"])
        assert code == 0
        _, _, rows = parse_csv(out)
        assert rows and all(row["status"] == "pass" for row in rows)

    def test_mc_suite_passes(self, capsys):
        code, out, _ = run_cli(
            capsys, ["validate", "--suite", "mc", "--model", "ar1:0.5",
                     "--n-max", "6"]
        )
        assert code == 0
        _, _, rows = parse_csv(out)
        assert all(row["status"] == "pass" for row in rows)

    def test_mvn_suite_passes(self, capsys):
        code, out, _ = run_cli(capsys, ["validate", "--suite", "mvn"])
        assert code == 0
        _, _, rows = parse_csv(out)
        assert all(row["status"] == "pass" for row in rows)


class TestExitCodes:
    def test_validation_error_is_two(self, capsys):
        code, _, err = run_cli(capsys, ["increment-cdf", "--x", "-1"])
        assert code == 2
        assert "error:" in err

    def test_numerical_failure_is_three(self, capsys):
        code, _, err = run_cli(
            capsys,
            ["increment-cdf", "--model", "ar1:0.5", "--x", "0.5",
             "--max-terms", "3"],
        )
        assert code == 3
        assert "numerical failure:" in err

    def test_bad_tol_is_two(self, capsys):
        for tol in ("-1", "abc"):
            code, _, err = run_cli(
                capsys, ["record-prob", "--n", "3", "--tol", tol]
            )
            assert code == 2
            assert "--tol" in err

    def test_usage_errors_raise_system_exit(self, capsys):
        with pytest.raises(SystemExit):
            cli.main(["no-such-command"])
        with pytest.raises(SystemExit):
            cli.main(["record-cdf", "--n", "3"])
        capsys.readouterr()
