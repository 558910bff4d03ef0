import csv
import io
import json
import math

import pytest

from quenchtherm import cli, verify
from quenchtherm.records import TRAJECTORY_COLUMNS, RunRecord


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_real():
    assert cli.parse_real("pi") == math.pi
    assert cli.parse_real("log 2") == math.log(2)
    assert cli.parse_real("log(24)") == math.log(24)
    assert cli.parse_real("1e-3") == 1e-3


class TestTune:
    def test_sds_exact(self, capsys):
        code, out, _ = run(capsys, "tune", "--beta-eg", "log2", "--mode", "sds-exact")
        assert code == 0
        o = RunRecord.from_json(out).outputs
        assert o["index"] == "0,1" and o["twin_index"] == "1,0"
        p, t = o["parameters"], o["twin_parameters"]
        assert (p["omega_prime"], p["coupling"], p["tau_tilde"]) == pytest.approx((1 / math.sqrt(3), 4 / 3, math.sqrt(3) / 4))
        assert (t["omega_prime"], t["coupling"]) == pytest.approx((math.sqrt(3), -4 / 3))

    def test_temperature_flag(self, capsys):
        code, out, _ = run(capsys, "tune", "--temperature", repr(1 / math.log(2)))
        assert code == 0 and json.loads(out)["outputs"]["index"] == "0,1"

    def test_off_sds(self, capsys):
        code, out, err = run(capsys, "tune", "--beta-eg", "pi")
        assert code == 3 and "11,12" in err
        sugg = json.loads(out)["outputs"]["suggestions"]
        assert (sugg[0]["l"], sugg[0]["n"]) == (11, 12)

    def test_envelope(self, capsys):
        code, out, _ = run(capsys, "tune", "--beta-eg", "log 2", "--mode", "envelope")
        o = json.loads(out)["outputs"]
        assert code == 0 and o["lower"]["coupling"] == pytest.approx(4 / 3) and o["upper"]["coupling"] == pytest.approx(-4 / 3)

    def test_newton(self, capsys):
        code, out, _ = run(capsys, "tune", "--beta-eg", "pi", "--mode", "newton")
        o = json.loads(out)["outputs"]
        assert code == 0 and o["converged"] and o["residual_norm"] <= 1e-8
        assert max(abs(v) for v in o["residual"]) <= 1e-8

    def test_newton_stall_reports(self, capsys):
        code, out, err = run(capsys, "tune", "--beta-eg", "pi", "--mode", "newton", "--index", "11,12")
        o = json.loads(out)["outputs"]
        assert code in (0, 1)
        if code == 1:
            assert not o["converged"] and o["history"] and o["message"] and "did not converge" in err

    def test_missing_beta(self, capsys):
        assert run(capsys, "tune")[0] == 2

    def test_negative_beta(self, capsys):
        assert run(capsys, "tune", "--beta-eg", "-1")[0] == 3


class TestApprox:
    def test_table(self, capsys):
        code, out, _ = run(capsys, "approx", "--beta-eg", "pi", "--rel-tol", "0.012", "--tau-max", "30")
        lines = out.strip().splitlines()
        assert code == 0 and lines[0].split() == ["l", "n", "beta_eg", "rel_error_percent", "tau_tilde"]
        assert lines[1].split() == ["11", "12", "3.17805", "1.1606", "5.99479"]

    def test_tight(self, capsys):
        _, out, _ = run(capsys, "approx", "--beta-eg", "pi", "--rel-tol", "0.0016", "--format", "record")
        rows = json.loads(out)["outputs"]["rows"]
        row = next(r for r in rows if (r["l"], r["n"]) == (44, 48))
        assert round(row["beta_eg"], 3) == 3.146 and round(row["rel_error_percent"], 2) == 0.15 and round(row["tau_tilde"], 2) == 23.23

    def test_log2_csv(self, capsys):
        _, out, _ = run(capsys, "approx", "--beta-eg", "log 2", "--rel-tol", "1e-12", "--format", "csv")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 1 and rows[0]["l"] == "0" and float(rows[0]["tau_tilde"]) == pytest.approx(0.4330, abs=1e-4)

    def test_bad_tol(self, capsys):
        assert run(capsys, "approx", "--beta-eg", "pi", "--rel-tol", "0")[0] == 3


class TestEvolve:
    def test_index_stdout(self, capsys):
        code, out, _ = run(capsys, "evolve", "--index", "0,1", "--samples", "20")
        rows = list(csv.DictReader(io.StringIO(out)))
        assert code == 0 and tuple(rows[0]) == TRAJECTORY_COLUMNS and len(rows) == 21
        last = rows[-1]
        assert float(last["X"]) == pytest.approx(17 / 15, abs=1e-12)
        assert float(last["Y"]) == pytest.approx(0, abs=1e-12)
        assert float(last["Z"]) == pytest.approx(-8 / 15, abs=1e-12)
        assert float(last["U_over_Eg"]) == pytest.approx(5 / 3, abs=1e-12)

    def test_params_out(self, capsys, tmp_path):
        path = tmp_path / "traj.csv"
        code, out, _ = run(capsys, "evolve", "--params", "1.7,0.9,0.37", "--out", str(path))
        rec = json.loads(out)
        assert code == 0 and rec["outputs"]["final_is_thermal"] is False and rec["outputs"]["final_beta_eg"] is None
        rows = list(csv.DictReader(path.open()))
        assert len(rows) == 1001 and float(rows[-1]["thermal_residual_y"]) > 1e-3

    def test_tail(self, capsys):
        _, out, _ = run(capsys, "evolve", "--index", "0,1", "--tail", "10", "--samples", "100")
        rows = list(csv.DictReader(io.StringIO(out)))
        tau = math.sqrt(3) / 4 * 2 * math.pi
        i_tau = min(range(len(rows)), key=lambda i: abs(float(rows[i]["t"]) - tau))
        for r in rows[i_tau:]:
            for c in ("X", "Y", "Z"):
                assert abs(float(r[c]) - float(rows[i_tau][c])) < 1e-9
        assert float(rows[-1]["t_tilde"]) == pytest.approx(math.sqrt(3) / 4 + 10)

    def test_record_format(self, capsys):
        code, out, _ = run(capsys, "evolve", "--index", "0,1", "--format", "record", "--samples", "5")
        o = json.loads(out)["outputs"]
        assert code == 0 and o["final_beta_eg"] == pytest.approx(math.log(2))

    def test_unwritable(self, capsys, tmp_path):
        assert run(capsys, "evolve", "--index", "0,1", "--out", str(tmp_path / "no" / "x.csv"))[0] == 2

    def test_usage(self, capsys):
        assert run(capsys, "evolve")[0] == 2
        assert run(capsys, "evolve", "--index", "0,1", "--samples", "0")[0] == 2
        assert run(capsys, "evolve", "--index", "x")[0] == 2

    def test_unstable_params(self, capsys):
        assert run(capsys, "evolve", "--params", "1,-0.6,1")[0] == 3


class TestSequence:
    def test_heat(self, capsys, tmp_path):
        path = tmp_path / "seq.csv"
        code, out, err = run(capsys, "sequence", "0,1", "11,12", "--out", str(path), "--samples", "50")
        rec = json.loads(out)["outputs"]
        assert code == 0 and rec["passed"] and err.count("PASS") == 3
        assert [c["label"] for c in rec["checkpoints"]] == ["thermal 0,1", "ground", "thermal 11,12"]
        rows = list(csv.DictReader(path.open()))
        assert list(rows[0])[-1] == "checkpoint"
        assert [r["checkpoint"] for r in rows if r["checkpoint"]] == ["thermal 0,1", "ground", "thermal 11,12"]

    @pytest.mark.parametrize("pair", [("0,1", "0,1"), ("11,12", "0,1")])
    def test_ends_log2(self, capsys, pair):
        code, out, _ = run(capsys, "sequence", *pair, "--format", "record", "--samples", "10")
        assert code == 0 and json.loads(out)["outputs"]["final_beta_eg"] == pytest.approx(math.log(2), rel=1e-8)

    def test_gap(self, capsys):
        code, out, _ = run(capsys, "sequence", "1,2", "0,3", "--gap", "1.5", "--samples", "10")
        assert code == 0 and "checkpoint" in out.splitlines()[0]


class TestVerify:
    def test_module(self, capsys):
        code, out, _ = run(capsys, "verify", "sds")
        assert code == 0 and "FAIL" not in out

    def test_record(self, capsys):
        code, out, _ = run(capsys, "verify", "dynamics", "--format", "record")
        rec = json.loads(out)
        assert code == 0 and rec["outputs"]["passed"] and rec["parameters"]["backend"] in ("compiled", "python")

    def test_failure_exit_code(self, capsys, monkeypatch):
        monkeypatch.setitem(verify.SUITES, "cli_io", lambda: [verify.Check("broken", False)])
        code, out, _ = run(capsys, "verify", "cli_io")
        assert code == 1 and "FAIL" in out

    def test_bad_scope(self, capsys):
        assert run(capsys, "verify", "nope")[0] == 2
