import json
import math

import pytest

from symthermo import cli
from symthermo.config import fixture_path

PASSING = ("ideal-gas", "paper-vdw", "degree-zero-demo", "schwarzschild", "barrow")


def _run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _demo(tmp_path, **flow):
    doc = json.loads(fixture_path("degree-zero-demo").read_text(encoding="utf-8"))
    doc["flow"].update(flow)
    p = tmp_path / "demo.json"
    p.write_text(json.dumps(doc), encoding="utf-8")
    return str(p)


def _read_csv(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    assert b"\r" not in raw
    lines = raw.decode("utf-8").split("\n")
    assert lines[-1] == ""
    return lines[0].split(","), [line.split(",") for line in lines[1:-2]], lines[-2]


@pytest.mark.parametrize("name", PASSING)
def test_passing_fixtures_exit_zero(capsys, name):
    code, out, _ = _run(capsys, "check", name)
    assert code == 0
    assert out.strip().endswith("checks)")
    assert f"{name}: PASS" in out


def test_json_output_is_deterministic(capsys):
    _, first, _ = _run(capsys, "check", "paper-vdw", "--json")
    _, second, _ = _run(capsys, "check", "paper-vdw", "--json")
    assert first == second
    doc = json.loads(first)
    assert doc["system"] == "paper-vdw"
    assert "wall_times" not in doc


def test_sabotage_fails_on_maxwell(capsys):
    code, out, _ = _run(capsys, "check", "sabotage-maxwell")
    assert code == 1
    assert any(line.startswith("FAIL maxwell") and "worst at" in line
               for line in out.splitlines())


def test_tolerance_override_can_fail_a_passing_fixture(capsys):
    code, _, _ = _run(capsys, "check", "degree-zero-demo", "--tolerance", "1e-30")
    assert code == 1


@pytest.mark.parametrize("argv", [
    ("check", "ideal-gas", "--grid", "1"),
    ("check", "ideal-gas", "--tolerance", "0"),
    ("check", "no-such-config"),
])
def test_bad_arguments_exit_two(capsys, argv):
    assert _run(capsys, *argv)[0] == 2


def test_malformed_config_exits_two(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{\"name\": \"x\", ", encoding="utf-8")
    code, _, err = _run(capsys, "check", str(p))
    assert code == 2
    assert "malformed JSON" in err


def test_unknown_identifier_exits_two(capsys, tmp_path):
    doc = json.loads(fixture_path("sabotage-maxwell").read_text(encoding="utf-8"))
    doc["state_functions"][0] = "q3 + 1"
    p = tmp_path / "q3.json"
    p.write_text(json.dumps(doc), encoding="utf-8")
    code, _, err = _run(capsys, "check", str(p))
    assert code == 2
    assert "'q3'" in err


def test_argparse_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["flow", "degree-zero-demo", "--generator", "X_Q", "--out", "x.csv"])
    assert exc.value.code == 2


def test_report_writes_json(capsys, tmp_path):
    out = tmp_path / "report.json"
    code, _, _ = _run(capsys, "report", "schwarzschild", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text(encoding="utf-8"))
    assert {c["name"] for c in doc["checks"]} >= {"smarr", "generalized-smarr"}
    assert "wall_times" not in doc
    _run(capsys, "report", "schwarzschild", "--out", str(out), "--timings")
    assert "wall_times" in json.loads(out.read_text(encoding="utf-8"))


def test_systems_lists_builtins(capsys):
    code, out, _ = _run(capsys, "systems")
    assert code == 0
    assert "ideal-gas" in out and "barrow" in out and "sabotage-maxwell.json" in out


def test_restricted_flow_csv(capsys, tmp_path):
    out = tmp_path / "flow.csv"
    code, stdout, _ = _run(capsys, "flow", "degree-zero-demo", "--out", str(out))
    assert code == 0
    header, rows, summary = _read_csv(out)
    assert header == ["step", "t", "u", "q1", "q2", "p1", "p2"]
    assert summary.startswith("# u-drift ")
    assert stdout.startswith("u-drift ")
    assert [int(r[0]) for r in rows] == list(range(len(rows)))
    assert float(rows[-1][1]) == math.log(2.0)
    # every value survives a float round trip through its text
    for row in rows[:5]:
        assert all(format(float(v), ".17g") == v for v in row[1:])
    # q(t) = q0 exp(-C t) from q0 = (2, 4)
    assert float(rows[-1][3]) == pytest.approx(1.0, abs=1e-8)
    assert float(rows[-1][4]) == pytest.approx(2.0, abs=1e-8)


def test_flow_at_zero_time_has_one_row(capsys, tmp_path):
    out = tmp_path / "flow.csv"
    code, _, _ = _run(capsys, "flow", _demo(tmp_path, t_end=0.0), "--out", str(out))
    assert code == 0
    _, rows, _ = _read_csv(out)
    assert len(rows) == 1
    assert [float(v) for v in rows[0][3:5]] == [2.0, 4.0]


def test_charge_flow_csv(capsys, tmp_path):
    out = tmp_path / "xg.csv"
    code, _, _ = _run(capsys, "flow", "degree-zero-demo", "--generator", "X_G",
                      "--out", str(out))
    assert code == 0
    header, rows, summary = _read_csv(out)
    assert header == ["step", "t", "Z", "mu", "Q1", "Q2", "P1", "P2", "G", "H", "U"]
    assert summary.startswith("# G-drift ")
    Z, mu, Q1, Q2, P1, P2 = (float(v) for v in rows[-1][2:8])
    # from Z = mu = 1, Q = (1, 2), P = (1, 1) over t = ln 2
    assert (Z, Q1, Q2) == pytest.approx((2.0, 2.0, 4.0), abs=1e-10)
    assert (mu, P1, P2) == pytest.approx((0.5, 0.5, 0.5), abs=1e-10)


def test_process_flow_csv(capsys, tmp_path):
    out = tmp_path / "xh.csv"
    code, _, _ = _run(capsys, "flow", _demo(tmp_path, t_end=0.1), "--generator", "X_H",
                      "--out", str(out))
    assert code == 0
    _, rows, _ = _read_csv(out)
    G = [float(r[8]) for r in rows]
    assert max(abs(g - G[0]) for g in G) <= 1e-8


def test_flow_without_section_exits_two(capsys, tmp_path):
    code, _, err = _run(capsys, "flow", "paper-vdw", "--out", str(tmp_path / "x.csv"))
    assert code == 2
    assert "no flow section" in err


def test_flow_domain_exit_writes_partial_csv(capsys, tmp_path):
    doc = json.loads(fixture_path("ideal-gas").read_text(encoding="utf-8"))
    doc["flow"] = {"dt": 0.01, "t_end": 2.0, "q0": [0.5, 2.0], "Z0": 1.0}
    cfg = tmp_path / "gas.json"
    cfg.write_text(json.dumps(doc), encoding="utf-8")
    out = tmp_path / "gas.csv"
    code, _, err = _run(capsys, "flow", str(cfg), "--generator", "X_H", "--out", str(out))
    assert code == 1
    assert "flow stopped" in err
    _, rows, summary = _read_csv(out)
    assert len(rows) >= 1
    assert "stopped" in summary
