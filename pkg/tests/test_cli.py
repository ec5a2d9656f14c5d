import json
import math
import subprocess
import sys

import numpy as np
import pytest

from nmthermo.cli import build_parser, main
from nmthermo.io import format_log_number, parse_operators, dump_operators, OperatorFileError
from nmthermo.qubit import SIGMA_X, LindbladTerm
from nmthermo.thermo import isochoric_heat


def read_csv(path):
    return np.genfromtxt(path, delimiter=",", names=True)


def run(argv, capsys=None):
    code = main(argv)
    out = capsys.readouterr() if capsys else None
    return code, out


def test_dissipative_defaults(tmp_path):
    out = tmp_path / "fig1.csv"
    assert main(["dissipative", "--out", str(out)]) == 0
    data = read_csv(out)
    assert len(data) == 2000
    assert data.dtype.names[:13] == ("t", "x", "y", "z", "r", "U", "Q_std", "W_std",
                                     "Q_ent", "W_ent", "W_star", "C", "S")
    assert np.all(data["Qdot_ent"] <= 0) and np.all(data["Cdot"] <= 0)


def test_dissipative_axis_state_is_isochoric(tmp_path):
    out = tmp_path / "iso.csv"
    assert main(["dissipative", "--r0", "0,0,0.5", "--out", str(out)]) == 0
    data = read_csv(out)
    assert "Qdot_ent" not in data.dtype.names
    np.testing.assert_allclose(data["Q_ent"], isochoric_heat(data["r"], 0.5, 1.0), atol=1e-6)


@pytest.mark.parametrize("argv, flag", [
    (["dissipative", "--steps", "1"], "--steps"),
    (["dissipative", "--t-max", "0"], "--t-max"),
    (["dissipative", "--r0", "1,1,0"], "--r0"),
    (["dissipative", "--precision", "0"], "--precision"),
    (["dephasing", "--omega-c", "-1"], "--omega-c"),
    (["measure", "--s-step", "0"], "--s-step"),
])
def test_validation_errors_name_the_flag(argv, flag, capsys):
    assert main(argv) == 2
    assert flag in capsys.readouterr().err


def test_bad_triple_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["dissipative", "--r0", "1,2"])
    assert exc.value.code == 2


@pytest.mark.parametrize("s, rising", [(1.5, False), (3.5, True)])
def test_dephasing_heat(tmp_path, s, rising):
    out = tmp_path / "fig2.csv"
    assert main(["dephasing", "--s", str(s), "--out", str(out)]) == 0
    data = read_csv(out)
    assert np.max(np.abs(data["Q_closed"] - data["Q_ent"])) < 1e-6
    assert np.any(np.diff(data["Q_ent"]) > 0) == rising


def test_dephasing_quadrature_failure_exit_code(monkeypatch, capsys):
    import nmthermo.cli as cli
    from nmthermo.errors import QuadratureFailure

    def boom(*a, **k):
        raise QuadratureFailure("forced")

    monkeypatch.setattr(cli, "DecoherenceTable", boom)
    assert main(["dephasing"]) == 3
    assert "forced" in capsys.readouterr().err


def test_measure_sweep_and_determinism(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["measure", "--out", str(a)]) == 0
    assert main(["measure", "--out", str(b), "--jobs", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    lines = a.read_text().splitlines()
    assert lines[0] == "s,N_Q,N_C,z_max"
    rows = [line.split(",") for line in lines[1:]]
    s = np.array([float(r[0]) for r in rows])
    nq = np.array([float(r[1]) for r in rows])
    assert np.all(nq[s <= 2] == 0)
    assert s[np.argmax(nq)] == pytest.approx(3.2, abs=0.1)
    # z_max survives underflow as decimal text
    last = rows[-1][3]
    assert "e-" in last and float(last.split("e")[0]) > 0


def test_measure_markovian_range_all_zero(capsys):
    assert main(["measure", "--s-max", "2", "--out", "-"]) == 0
    lines = capsys.readouterr().out.splitlines()[1:]
    assert len(lines) == 41
    assert all(line.split(",")[1:3] == ["0", "0"] for line in lines)


def test_measure_json(capsys):
    assert main(["measure", "--format", "json", "--s", "3.5", "--functional", "C", "--refine", "1"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert set(report) == {"value", "optimizer", "intervals", "alpha"}
    assert report["alpha"] == -1 and report["value"] > 0


def test_precision_flag(capsys):
    assert main(["dissipative", "--steps", "3", "--precision", "4"]) == 0
    rows = capsys.readouterr().out.splitlines()[1:]
    for row in rows:
        for v in row.split(","):
            digits = v.lstrip("-").split("e")[0].replace(".", "").lstrip("0")
            assert len(digits) <= 4


def test_check_reports(tmp_path, capsys):
    ops = [
        {"matrix": [[[0, 0], [1, 0]], [[1, 0], [0, 0]]], "rate": 0.1},
        {"matrix": [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]], "rate": {"type": "ohmic", "s": 3.5, "omega_c": 1}},
        {"matrix": [[[0, 0], [0, 0]], [[1, 0], [0, 0]]], "rate": 1},
    ]
    path = tmp_path / "ops.json"
    path.write_text(json.dumps(ops))
    assert main(["check", "--operators", str(path)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "term 0: unital-sufficient yes, incoherent-sufficient yes"
    assert lines[1] == "term 1: unital-sufficient yes, incoherent-sufficient yes"
    assert lines[2].startswith("term 2: unital-sufficient no")


def test_check_malformed_json(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('[{"matrix":\n  [[1, 2]')
    assert main(["check", "--operators", str(path)]) == 2
    err = capsys.readouterr().err
    assert "line 2" in err and "column" in err


def test_check_missing_file_and_degenerate_field(tmp_path, capsys):
    assert main(["check", "--operators", str(tmp_path / "nope.json")]) == 2
    path = tmp_path / "ops.json"
    path.write_text(dump_operators([LindbladTerm(SIGMA_X, 0.3)]))
    assert main(["check", "--operators", str(path), "--omega0", "0"]) == 2
    assert "--omega0" in capsys.readouterr().err


def test_operator_round_trip_and_errors():
    terms = parse_operators(dump_operators([LindbladTerm(SIGMA_X, 0.3)]))
    np.testing.assert_array_equal(terms[0].operator, SIGMA_X)
    assert terms[0].rate == 0.3
    for bad in ("{}", "[]", '[{"rate": 1}]', '[{"matrix": [[1, 2], [3, 4]]}]',
                '[{"matrix": [[[0,0],[1,0]],[[1,0],[0,0]]], "rate": "x"}]',
                '[{"matrix": [[[0,0],[1,0]],[[1,0],[0,0]]], "rate": {"type": "ohmic"}}]'):
        with pytest.raises(OperatorFileError):
            parse_operators(bad)


def test_log_number_formatting():
    assert format_log_number(math.log(0.25)) == "0.25"
    assert format_log_number(-1350 * math.log(10), 3) == "1e-1350"
    assert format_log_number(math.log(2.5) - 600 * math.log(10), 4) == "2.5e-600"
    assert format_log_number(math.nan) == "nan"


def test_atomic_write_leaves_no_temp(tmp_path):
    out = tmp_path / "x.csv"
    assert main(["dissipative", "--steps", "5", "--out", str(out)]) == 0
    assert [p.name for p in tmp_path.iterdir()] == ["x.csv"]


def test_help_lists_defaults():
    parser = build_parser()
    sub = parser._subparsers._group_actions[0].choices
    for name, p in sub.items():
        text = p.format_help()
        assert "(default:" in text
        for action in p._actions:
            if action.option_strings and action.dest not in ("help", "operators"):
                assert action.option_strings[0] in text


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "nmthermo", "dephasing", "--help"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and "--omega-c" in res.stdout
