"""
Tests for the ``hmvf`` command line.
"""
import json

import numpy as np
import pytest

from hilbert_mvf.cli import build_parser, main, parse_tau, parse_word
from hilbert_mvf.errors import ValidationError
from hilbert_mvf.field import SL2Matrix


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


class TestParsing:
    def test_words(self, K5):
        S, T = SL2Matrix.S(K5), SL2Matrix.T(K5, 1)
        assert parse_word("S*T1^-1", K5) == S @ T.inverse()
        assert parse_word("T2^2", K5) == SL2Matrix.T(K5, 2 * K5.omega)

    def test_bad_words(self, Q):
        with pytest.raises(ValidationError):
            parse_word("T2", Q)
        with pytest.raises(ValidationError):
            parse_word("S^x", Q)

    def test_tau(self):
        assert np.allclose(parse_tau([0.5, 1.5, -1, 2], 2), [0.5 + 1.5j, -1 + 2j])
        with pytest.raises(ValidationError):
            parse_tau([0.5, 1.5], 2)

    def test_subcommands(self):
        parser = build_parser()
        args = parser.parse_args(["verify", "--bound", "5", "--bound", "10"])
        assert args.bound == [5.0, 10.0]
        with pytest.raises(SystemExit):
            parser.parse_args(["poincare", "plot"])


class TestCommands:
    def test_report_envelope(self, capsys):
        code, doc = run(capsys, "--seed", "7", "lattice", "info", "--field", "Q(sqrt:5)")
        assert code == 0
        assert doc["seed"] == 7 and doc["command"] == "lattice info"
        assert len(doc["config_hash"]) == 64
        assert doc["result"]["axis_periods"] == [None, None]
        assert [0, 0] in doc["result"]["dual_vectors"]

    def test_rep_check(self, capsys):
        code, doc = run(capsys, "rep", "check", "--field", "Q(sqrt:5)", "--rep", "permmod:2", "--pairs", "5")
        assert code == 0
        result = doc["result"]
        assert (result["kind"], result["dimension"], result["unitary"]) == ("permmod", 5, True)
        assert float(result["homomorphism_residual"]) == 0.0

    def test_sbtsd_file(self, capsys, tmp_path):
        path = tmp_path / "family.json"
        path.write_text(json.dumps({"matrices": [[[2, 1], [0, 2]], [[3, 0], [0, 3]]]}), encoding="utf-8")
        code, doc = run(capsys, "sbtsd", str(path))
        assert code == 0
        assert doc["result"]["block_sizes"] == [2]

    def test_poincare_eval(self, capsys):
        code, doc = run(capsys, "poincare", "eval", "--nu", "1", "--bound", "5", "--tau", "0,1.5")
        assert code == 0
        value = doc["result"]["value"]
        assert len(value) == 1 and len(value[0]) == 1

    def test_poincare_converge_writes_csv(self, capsys, tmp_path):
        table = tmp_path / "converge.csv"
        code, doc = run(capsys, "--csv", str(table), "poincare", "converge", "--eisenstein", "--bounds", "5,10,20", "--tau", "0,2")
        assert code == 0
        assert doc["result"]["B"] == ["5", "10", "20"]
        assert len(doc["result"]["deltas"]) == 2
        assert table.read_text(encoding="utf-8").splitlines()[0] == "bound,norm,delta"

    def test_poincare_cusp(self, capsys):
        code, doc = run(
            capsys, "poincare", "cusp", "--field", "Q(sqrt:5)", "--rep", "permmod:2", "--weight", "3,3",
            "--nu", "1,0", "--bound", "5", "--lambdas", "2,4",
        )
        assert code == 0
        assert len(doc["result"]["magnitudes"]) == 2

    def test_verify_constant(self, capsys):
        code, doc = run(capsys, "verify", "--source", "constant", "--gamma", "S,T1,S*T1")
        assert code == 0
        assert doc["result"]["passed"] is True

    def test_verify_failure_exit_code(self, capsys):
        code, doc = run(capsys, "verify", "--nu", "1", "--bound", "5", "--tol", "1e-30")
        assert code == 3
        assert doc["result"]["passed"] is False

    def test_expand_to_files(self, capsys, tmp_path):
        report = tmp_path / "report.json"
        out_dir = tmp_path / "components"
        code, doc = run(capsys, "--output", str(report), "expand", "--source", "synthetic-twisted", "--output-dir", str(out_dir))
        assert code == 0 and doc is None
        result = json.loads(report.read_text(encoding="utf-8"))["result"]
        assert float(result["max_coefficient_error"]) < 1e-8
        assert (out_dir / "component_0.json").exists()


class TestExitCodes:
    def test_invalid_input(self, capsys):
        assert main(["lattice", "info", "--field", "Q(sqrt:7)"]) == 2
        assert main(["--threads", "0", "lattice", "info"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_bad_config(self, capsys, tmp_path):
        path = tmp_path / "job.json"
        path.write_text(json.dumps({"field": {"spec": "Q", "extra": 1}}), encoding="utf-8")
        assert main(["--config", str(path), "lattice", "info"]) == 2

    def test_violated_assumption(self, capsys):
        assert main(["poincare", "eval", "--weight", "2", "--nu", "1"]) == 4

    def test_config_feeds_commands(self, capsys, tmp_path):
        path = tmp_path / "job.json"
        path.write_text(json.dumps({"field": {"spec": "Q(sqrt:2)"}}), encoding="utf-8")
        code, doc = run(capsys, "--config", str(path), "lattice", "info")
        assert code == 0
        assert doc["result"]["lattice"]["field"] == "Q(sqrt:2)"
