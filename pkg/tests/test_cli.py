import json

import pytest

from dualtab.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestProve:
    def test_valid(self, capsys):
        code, out, _ = run(capsys, "prove", "r | -r")
        assert code == 0
        assert out.splitlines()[0] == "valid"
        assert "*closed*" in out  # the proof tree is shown

    def test_invalid_emits_countermodel(self, capsys):
        code, out, _ = run(capsys, "prove", "r", "--json")
        assert code == 1
        data = json.loads(out)
        assert data["verdict"] == "invalid"
        assert data["countermodel"]["universe"] == ["x", "y"]
        assert data["proof"] is None

    def test_parse_error(self, capsys):
        code, _, err = run(capsys, "prove", "r &")
        assert code == 2
        assert "offset 3" in err

    def test_fragment_violation(self, capsys):
        code, _, err = run(capsys, "prove", "r ^")
        assert code == 3
        assert "converse" in err

    def test_resource_exhausted(self, capsys):
        code, _, err = run(capsys, "prove", "(r | s) | (p | q)", "--max-steps", "1")
        assert code == 4
        assert "cap" in err

    def test_verify_proof(self, capsys):
        code, out, _ = run(capsys, "prove", "r | -r", "--json", "--verify")
        assert code == 0
        assert json.loads(out)["verified"] is True

    def test_verify_countermodel(self, capsys):
        code, out, _ = run(capsys, "prove", "1 ; (r ; 1)", "--json", "--verify")
        assert code == 1
        assert json.loads(out)["verified"] is True

    def test_trace_goes_to_stderr(self, capsys):
        code, out, err = run(capsys, "prove", "r | -r", "--trace")
        assert code == 0
        assert "[trace]" in err
        assert "[trace]" not in out

    def test_json_is_reproducible(self, capsys):
        _, first, _ = run(capsys, "prove", "1 ; ((r & s) ; 1)", "--json")
        _, second, _ = run(capsys, "prove", "1 ; ((r & s) ; 1)", "--json")
        assert first == second

    def test_leading_dash_term_after_separator(self, capsys):
        code, out, _ = run(capsys, "prove", "--json", "--", "-(r ; 1)")
        assert code == 1
        assert json.loads(out)["verdict"] == "invalid"


class TestEntail:
    def test_valid_entailment(self, capsys):
        code, out, _ = run(capsys, "entail",
                           "--premise", "-r | -(s1 | s2)",
                           "--conclusion", "-s1 | -r")
        assert code == 0

    def test_invalid_entailment_with_verification(self, capsys):
        code, out, _ = run(capsys, "entail", "--json", "--verify",
                           "--premise", "-r | -s1",
                           "--conclusion", "-r | -s2")
        assert code == 1
        data = json.loads(out)
        assert data["verified"] is True
        assert data["countermodel"] is not None
        assert "term" in data

    def test_encoder_rejection(self, capsys):
        code, _, err = run(capsys, "entail", "--premise", "r | s",
                           "--conclusion=-r")
        assert code == 3
        assert "Boolean" in err


class TestModal:
    def test_distribution_axiom(self, capsys):
        code, out, _ = run(capsys, "modal", "[r](p->q) -> ([r]p -> [r]q)",
                           "--json", "--verify")
        assert code == 0
        data = json.loads(out)
        assert data["verdict"] == "valid"
        assert data["kripke"] == {"refuted": False, "worlds": 3}

    def test_invalid_formula(self, capsys):
        code, out, _ = run(capsys, "modal", "p -> [r]p", "--json", "--verify")
        assert code == 1
        data = json.loads(out)
        assert data["verified"] is True
        assert data["kripke"]["refuted"] is True

    def test_parse_error(self, capsys):
        code, _, err = run(capsys, "modal", "[r](p &")
        assert code == 2


class TestCheckModel:
    @pytest.fixture
    def model_file(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text(json.dumps({
            "universe": ["x", "y"],
            "relations": {"r": [["x", "x"]]},
            "valuation": {"x": "x", "y": "y"},
        }))
        return str(path)

    def test_falsified(self, capsys, model_file):
        code, out, _ = run(capsys, "check-model", "r", model_file)
        assert code == 0
        assert out.strip() == "falsified"

    def test_satisfied(self, capsys, model_file):
        code, out, _ = run(capsys, "check-model", "1", model_file)
        assert code == 1
        assert out.strip() == "satisfied"

    def test_explicit_endpoints(self, capsys, model_file):
        code, _, _ = run(capsys, "check-model", "x r x", model_file)
        assert code == 1

    def test_malformed_file(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _, err = run(capsys, "check-model", "r", str(bad))
        assert code == 2

    def test_missing_file(self, capsys):
        code, _, _ = run(capsys, "check-model", "r", "/nonexistent/model.json")
        assert code == 2


class TestEndToEnd:
    def test_countermodel_feeds_check_model(self, capsys, tmp_path):
        # a countermodel emitted by prove must falsify the very same term
        # when fed back through check-model
        code, out, _ = run(capsys, "prove", "1 ; ((r | s) ; 1)", "--json")
        assert code == 1
        countermodel = json.loads(out)["countermodel"]
        path = tmp_path / "cm.json"
        path.write_text(json.dumps(countermodel))
        code, out, _ = run(capsys, "check-model", "1 ; ((r | s) ; 1)", str(path))
        assert code == 0
        assert out.strip() == "falsified"

    def test_output_independent_of_hash_seed(self, tmp_path):
        import subprocess
        import sys

        outputs = []
        for seed in ("0", "4242"):
            proc = subprocess.run(
                [sys.executable, "-m", "dualtab.cli", "prove",
                 "1 ; ((r | s) ; -((p & q) ; 1))", "--json"],
                capture_output=True, text=True,
                env={"PYTHONHASHSEED": seed, "PATH": "/usr/bin:/bin"},
            )
            assert proc.returncode == 1
            outputs.append(proc.stdout)
        assert outputs[0] == outputs[1]


class TestFragmentAndSimplify:
    def test_fragment_accept(self, capsys):
        code, out, _ = run(capsys, "fragment", "1 ; (((r1 | s) & r2) ; 1)")
        assert code == 0
        assert out.strip() == "accepted"

    def test_fragment_reject(self, capsys):
        code, out, _ = run(capsys, "fragment", "(-r) ; s")
        assert code == 3
        assert "rejected" in out

    def test_fragment_parse_error(self, capsys):
        code, _, _ = run(capsys, "fragment", "r &")
        assert code == 2

    def test_simplify(self, capsys):
        code, out, _ = run(capsys, "simplify", "1 & (p | -1)")
        assert code == 0
        assert out.strip() == "p"

    def test_simplify_json(self, capsys):
        code, out, _ = run(capsys, "simplify", "(1 | p) ; q", "--json")
        assert code == 0
        assert json.loads(out) == {"term": "(1 ; q)"}
