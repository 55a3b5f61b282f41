import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from wulff_willmore import cli

ROOT = Path(__file__).resolve().parents[1]
ACCEPTANCE = str(ROOT / "acceptance.json")
SPHERE = {"name": "sphere", "norm": {"family": "euclidean"}, "region": {"kind": "full_space"},
          "theorem": "iso_convex", "surface": {"kind": "sphere_cap"}}
HALF = {"kind": "half_space", "normal": [0.0, 0.0, 1.0]}


def write(tmp_path, config, name="c.json"):
    p = tmp_path / name
    p.write_text(json.dumps(config) if not isinstance(config, str) else config)
    return str(p)


def run(*argv):
    return cli.main(list(argv))


# -- verify ------------------------------------------------------------------

def test_single_report_to_stdout(capsys):
    assert run("verify", "--config", ACCEPTANCE, "--scenario", "sphere_fullspace",
               "--json", "-") == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["status"] == "equality"
    assert rep["rhs"] == pytest.approx(4.18879020478639, abs=1e-12)


def test_multiple_reports(tmp_path, capsys):
    cfg = write(tmp_path, {"seed": 1, "scenarios": [SPHERE, {**SPHERE, "name": "big",
                                                             "surface": {"kind": "sphere_cap",
                                                                         "radius": 2.0}}]})
    out = tmp_path / "r.json"
    assert run("verify", "--config", cfg, "--json", str(out), "--out-dir",
               str(tmp_path / "d")) == 0
    data = json.loads(out.read_text())
    assert set(data["reports"]) == {"sphere", "big"}
    assert (tmp_path / "d" / "big.json").exists()
    assert "sphere" in capsys.readouterr().out


def test_theta0_zero_is_schema_error(tmp_path, capsys):
    sc = {"name": "bad", "norm": {"family": "capillary", "theta0": 0.0}, "region": HALF,
          "theorem": "capillary_halfspace", "theta0": 0.0,
          "surface": {"kind": "sphere_cap", "clip": "upper_halfspace"}}
    assert run("verify", "--config", write(tmp_path, {"scenarios": [sc]})) == 1
    assert "theta0 out of open interval (0, π)" in capsys.readouterr().err


def test_hypothesis_failed_only_gives_3(tmp_path):
    sc = {**SPHERE, "name": "open", "surface": {"kind": "sphere_cap", "clip": "upper_halfspace"}}
    assert run("verify", "--config", write(tmp_path, {"scenarios": [sc, SPHERE]})) == 3


def test_fail_status_gives_2(tmp_path, monkeypatch):
    real = cli.verify

    def broken(sc):
        rep = real(sc)
        rep.status = "fail"
        return rep

    monkeypatch.setattr(cli, "verify", broken)
    assert run("verify", "--config", write(tmp_path, {"scenarios": [SPHERE]})) == 2


@pytest.mark.parametrize("statuses,code", [
    (["pass", "equality"], 0), (["pass", "fail", "hypothesis_failed"], 2),
    (["hypothesis_failed", "pass"], 3), ([], 0),
])
def test_exit_code_mapping(statuses, code):
    assert cli.exit_code(statuses) == code


def test_json_syntax_error_has_position(tmp_path, capsys):
    assert run("verify", "--config", write(tmp_path, '{"scenarios": [\n  {"name": }]}')) == 1
    err = capsys.readouterr().err
    assert "2:" in err


@pytest.mark.parametrize("config", [
    {"scenarios": [SPHERE, SPHERE]},                       # duplicate names
    {"scenarios": [{**SPHERE, "theorem": "bogus"}]},
    {"scenarios": [{**SPHERE, "norm": {"family": "ellipsoidal"}}]},
    {"scenarios": "nope"},
])
def test_schema_violations_exit_1(tmp_path, config, capsys):
    assert run("verify", "--config", write(tmp_path, config)) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_missing_config_and_unknown_scenario(tmp_path, capsys):
    assert run("verify", "--config", str(tmp_path / "none.json")) == 1
    assert run("verify", "--config", ACCEPTANCE, "--scenario", "no_such") == 1


def test_thread_count_does_not_change_bytes(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run("verify", "--config", ACCEPTANCE, "--threads", "1", "--json", str(a)) == 0
    assert run("verify", "--config", ACCEPTANCE, "--threads", "8", "--json", str(b)) == 0
    assert a.read_bytes() == b.read_bytes()


# -- sweep -------------------------------------------------------------------

def read_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_order_sweep_margin_shrinks(capsys):
    assert run("sweep", "--config", ACCEPTANCE, "--scenario", "sphere_fullspace",
               "--parameter", "order", "--grid", "8,16,32,64") == 0
    rows = read_csv(capsys.readouterr().out)
    assert list(rows[0]) == ["parameter", "lhs", "rhs", "margin", "error_estimate"]
    margins = [abs(float(r["margin"])) for r in rows]
    assert all(b <= a for a, b in zip(margins, margins[1:]))
    assert margins[-1] <= 1e-12


def test_samples_sweep_half_width_scaling(tmp_path):
    assert run("sweep", "--config", ACCEPTANCE, "--scenario", "hemisphere", "--parameter",
               "samples", "--grid", "10000,40000,160000", "--out-dir", str(tmp_path)) == 0
    rows = read_csv((tmp_path / "sweep_hemisphere_samples.csv").read_text())
    hw = [float(r["error_estimate"]) for r in rows]
    for a, b in zip(hw, hw[1:]):
        assert a / b == pytest.approx(2.0, rel=0.2)
    assert {"ratio", "target"} <= set(rows[0])


def test_sweep_needs_one_scenario(capsys):
    assert run("sweep", "--config", ACCEPTANCE) == 1


# -- identities and flow checks ----------------------------------------------

def test_identities_restricted(capsys):
    assert run("identities", "--norm", "capillary", "--theta0", "1.0472", "--trials", "100",
               "--json", "-") == 0
    data = json.loads(capsys.readouterr().out)
    assert len(data["groups"]) == 8 and list(data["norms"]) == ["capillary"]
    assert data["passed"]


def test_identities_bad_theta(capsys):
    assert run("identities", "--theta0", "0") == 1
    assert "theta0 out of open interval" in capsys.readouterr().err


def test_flow_check_coverage_and_inclusion(tmp_path):
    out = tmp_path / "f.json"
    assert run("flow-check", "--config", ACCEPTANCE, "--check", "inclusion", "--json",
               str(out)) == 0
    data = json.loads(out.read_text())
    assert all(c["status"] == "pass" for c in data["checks"])


def test_flow_check_volume_small(tmp_path):
    cfg = write(tmp_path, {"seed": 2, "scenarios": [SPHERE], "flow_checks": [
        {"scenario": "sphere", "check": "volume", "R": [2.0], "samples": 20000}]})
    out = tmp_path / "v.json"
    assert run("flow-check", "--config", cfg, "--json", str(out)) == 0
    # a single check is written on its own, like a single verify report
    check = json.loads(out.read_text())
    assert check["runs"][0]["verdict"]


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "wulff_willmore.cli", "verify", "--config",
                          ACCEPTANCE, "--scenario", "hemisphere"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "hemisphere" in res.stdout
