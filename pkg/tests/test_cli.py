import csv
import io
import json
from fractions import Fraction

import pytest

from ivdeck import load_population, population_to_dict, save_population
from ivdeck.cli import (
    EXIT_ASSUMPTIONS,
    EXIT_FAILURE,
    EXIT_IO,
    EXIT_OK,
    EXIT_USAGE,
    cli_main,
)


def run(capsys, *argv):
    code = cli_main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def det_pop_file(det_oracle_pop, tmp_path):
    path = tmp_path / "det.json"
    save_population(det_oracle_pop, path)
    return str(path)


@pytest.fixture
def stoch_pop_file(stoch_oracle_pop, tmp_path):
    path = tmp_path / "stoch.json"
    save_population(stoch_oracle_pop, path)
    return str(path)


@pytest.fixture
def defier_pop_file(defier_quarter_pop, tmp_path):
    path = tmp_path / "defier.json"
    save_population(defier_quarter_pop, path)
    return str(path)


class TestGenerate:
    def test_output_loads_as_population(self, capsys, tmp_path):
        out = tmp_path / "pop.json"
        code, stdout, _ = run(
            capsys,
            "generate",
            "--kind",
            "deterministic_mix",
            "--n",
            "8",
            "--complier",
            "1/2",
            "--always-taker",
            "1/4",
            "--out",
            str(out),
        )
        assert code == EXIT_OK
        pop = load_population(out)
        assert len(pop) == 8
        assert pop.kind == "deterministic"

    def test_stdout_by_default(self, capsys):
        code, stdout, _ = run(
            capsys, "generate", "--kind", "stochastic_monotone", "--n", "3"
        )
        assert code == EXIT_OK
        doc = json.loads(stdout)
        assert doc["kind"] == "stochastic"
        assert len(doc["individuals"]) == 3

    def test_bad_fractions_exit_usage(self, capsys):
        code, _, stderr = run(
            capsys,
            "generate",
            "--kind",
            "deterministic_mix",
            "--n",
            "4",
            "--complier",
            "3/4",
            "--defier",
            "1/2",
        )
        assert code == EXIT_USAGE
        assert "error" in stderr

    def test_non_integer_share_exit_usage(self, capsys):
        code, _, _ = run(
            capsys,
            "generate",
            "--kind",
            "deterministic_mix",
            "--n",
            "4",
            "--complier",
            "1/3",
        )
        assert code == EXIT_USAGE


class TestEffects:
    def test_json_format(self, capsys, det_pop_file):
        code, stdout, _ = run(
            capsys, "effects", det_pop_file, "--format", "json"
        )
        assert code == EXIT_OK
        doc = json.loads(stdout)
        assert doc["aggregates"]["ate"] == "1/4"
        assert doc["aggregates"]["late"] == "1/2"
        assert len(doc["individuals"]) == 4
        assert doc["individuals"][0]["class"] == "complier"

    def test_table_format_renders_decimals(self, capsys, det_pop_file):
        code, stdout, _ = run(capsys, "effects", det_pop_file)
        assert code == EXIT_OK
        assert "0.250000" in stdout
        assert "complier" in stdout

    def test_csv_format_is_one_table(self, capsys, stoch_pop_file):
        code, stdout, stderr = run(
            capsys, "effects", stoch_pop_file, "--format", "csv"
        )
        assert code == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(stdout)))
        assert len(rows) == 2
        assert "dc" in rows[0]
        # the aggregate summary moves to stderr so the table stays clean
        assert "date=" in stderr

    def test_float_mode(self, capsys, stoch_pop_file):
        code, stdout, _ = run(
            capsys, "effects", stoch_pop_file, "--mode", "float", "--format", "json"
        )
        assert code == EXIT_OK
        doc = json.loads(stdout)
        assert doc["aggregates"]["date"] == pytest.approx(0.6)


class TestIdentify:
    def test_exact_identity_reported(self, capsys, det_pop_file):
        code, stdout, _ = run(
            capsys, "identify", det_pop_file, "--format", "json"
        )
        assert code == EXIT_OK
        doc = json.loads(stdout)
        assert doc["identity_holds"] is True
        assert doc["estimand_lhs"] == "1/2"
        assert doc["estimand_rhs"] == "1/2"
        assert doc["abs_gap"] == 0

    def test_defiers_without_strict_still_exit_ok(self, capsys, defier_pop_file):
        code, stdout, _ = run(
            capsys, "identify", defier_pop_file, "--format", "json"
        )
        assert code == EXIT_OK
        doc = json.loads(stdout)
        assert doc["applicable"] is False
        assert doc["estimand_rhs"] == 3

    def test_strict_flags_assumption_violations(self, capsys, defier_pop_file):
        code, _, stderr = run(capsys, "identify", defier_pop_file, "--strict")
        assert code == EXIT_ASSUMPTIONS
        assert "assumptions" in stderr

    def test_strict_passes_on_clean_population(self, capsys, det_pop_file):
        code, _, _ = run(capsys, "identify", det_pop_file, "--strict")
        assert code == EXIT_OK

    def test_dump_joint_rows(self, capsys, det_pop_file, tmp_path):
        dump = tmp_path / "joint.csv"
        code, _, _ = run(
            capsys, "identify", det_pop_file, "--dump-joint", str(dump)
        )
        assert code == EXIT_OK
        rows = list(csv.DictReader(dump.open()))
        assert len(rows) == 8 * 4
        total = sum(Fraction(row["prob"]) for row in rows)
        assert total == 1

    def test_custom_assign_prob(self, capsys, stoch_pop_file):
        code, stdout, _ = run(
            capsys,
            "identify",
            stoch_pop_file,
            "--assign-prob",
            "1/5",
            "--format",
            "json",
        )
        assert code == EXIT_OK
        doc = json.loads(stdout)
        assert doc["assign_prob"] == "1/5"
        assert doc["identity_holds"] is True


class TestSimulate:
    def test_csv_to_stdout(self, capsys, det_pop_file):
        code, stdout, stderr = run(
            capsys, "simulate", det_pop_file, "--n", "20", "--seed", "5"
        )
        assert code == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(stdout)))
        assert len(rows) == 20
        assert set(rows[0]) == {"assign", "take", "cure", "latent_u"}
        assert "iv_estimate" in stderr or "estimate_error" in stderr

    def test_no_latent_drops_the_column(self, capsys, det_pop_file):
        code, stdout, _ = run(
            capsys, "simulate", det_pop_file, "--n", "10", "--no-latent"
        )
        assert code == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(stdout)))
        assert set(rows[0]) == {"assign", "take", "cure"}

    def test_same_seed_same_bytes(self, capsys, det_pop_file, tmp_path):
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        for out in (out1, out2):
            code, _, _ = run(
                capsys,
                "simulate",
                det_pop_file,
                "--n",
                "100",
                "--seed",
                "9",
                "--out",
                str(out),
            )
            assert code == EXIT_OK
        assert out1.read_bytes() == out2.read_bytes()

    def test_out_writes_sidecar_and_summary(self, capsys, det_pop_file, tmp_path):
        out = tmp_path / "trial.csv"
        code, stdout, _ = run(
            capsys,
            "simulate",
            det_pop_file,
            "--n",
            "50",
            "--seed",
            "2",
            "--out",
            str(out),
            "--format",
            "json",
        )
        assert code == EXIT_OK
        meta = json.loads((tmp_path / "trial.csv.meta.json").read_text())
        assert meta["n"] == 50
        summary = json.loads(stdout)
        assert summary["seed"] == 2
        assert summary["backend"] in ("compiled", "numpy")

    def test_zero_records_rejected(self, capsys, det_pop_file):
        code, _, _ = run(capsys, "simulate", det_pop_file, "--n", "0")
        assert code == EXIT_USAGE


class TestVerify:
    def test_all_checks_pass_on_oracle(self, capsys, det_pop_file):
        code, stdout, _ = run(capsys, "verify", det_pop_file, "--n", "500")
        assert code == EXIT_OK
        assert "FAIL" not in stdout
        summary = stdout.strip().splitlines()[-1]
        assert summary.endswith("checks passed")

    def test_stochastic_population(self, capsys, stoch_pop_file):
        code, stdout, _ = run(capsys, "verify", stoch_pop_file, "--n", "500")
        assert code == EXIT_OK

    def test_defiers_fail_verification(self, capsys, defier_pop_file):
        code, stdout, _ = run(capsys, "verify", defier_pop_file, "--n", "500")
        assert code == EXIT_FAILURE
        assert "FAIL" in stdout

    def test_json_format(self, capsys, det_pop_file):
        code, stdout, _ = run(
            capsys, "verify", det_pop_file, "--n", "500", "--format", "json"
        )
        assert code == EXIT_OK
        checks = json.loads(stdout)
        assert all(c["passed"] for c in checks)
        names = {c["check"] for c in checks}
        assert "identification-identity" in names
        assert "markov-factorization" in names


class TestSweep:
    def test_grid_rows(self, capsys):
        code, stdout, _ = run(
            capsys,
            "sweep",
            "--defier-fraction",
            "0:0.3:0.05",
            "--pop-size",
            "20",
            "--n",
            "2000",
            "--seeds",
            "0,1",
            "--format",
            "json",
        )
        assert code == EXIT_OK
        rows = json.loads(stdout)
        assert len(rows) == 7
        params = [Fraction(str(r["param"])) for r in rows]
        assert params == sorted(params)
        assert rows[0]["abs_gap"] == 0
        assert Fraction(str(rows[-1]["abs_gap"])) > 0

    def test_bad_grid_exit_usage(self, capsys):
        code, _, _ = run(capsys, "sweep", "--defier-fraction", "0:0.3")
        assert code == EXIT_USAGE

    def test_bad_seeds_exit_usage(self, capsys):
        code, _, _ = run(
            capsys, "sweep", "--defier-fraction", "0:0.1:0.05", "--seeds", "a,b"
        )
        assert code == EXIT_USAGE


class TestErrorChannels:
    def test_missing_population_file(self, capsys, tmp_path):
        code, _, stderr = run(capsys, "effects", str(tmp_path / "nope.json"))
        assert code == EXIT_IO
        assert "error" in stderr

    def test_malformed_json(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, _, _ = run(capsys, "effects", str(path))
        assert code == EXIT_IO

    def test_schema_violation(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"kind": "nope", "individuals": [{}]}))
        code, _, _ = run(capsys, "effects", str(path))
        assert code == EXIT_IO

    def test_bad_assign_prob(self, capsys, det_pop_file):
        for value in ("0", "1", "7/5"):
            code, _, _ = run(
                capsys, "identify", det_pop_file, "--assign-prob", value
            )
            assert code == EXIT_USAGE

    def test_round_trip_through_generate_and_effects(self, capsys, tmp_path):
        out = tmp_path / "gen.json"
        code, _, _ = run(
            capsys,
            "generate",
            "--kind",
            "stochastic_monotone",
            "--n",
            "6",
            "--seed",
            "3",
            "--out",
            str(out),
        )
        assert code == EXIT_OK
        code, stdout, _ = run(capsys, "effects", str(out), "--format", "json")
        assert code == EXIT_OK
        doc = json.loads(stdout)
        assert doc["aggregates"]["n"] == 6
