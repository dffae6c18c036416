import json
import subprocess
import sys

import pytest

from tracetails import cli
from tracetails.errors import NumericalError

HEADER = "epsilon,ck_bound,exact_tail,ratio,region_status"


def _cfg(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def _run(argv, capsys):
    code = cli.run(argv)
    out, err = capsys.readouterr()
    return code, out, err


BOUNDS = {"mode": "relative", "mu": 2.5, "m": 4, "epsilons": [0.5, 1.0, 2.0]}


# ----------------------------------------------------------------- examples

def test_bounds_csv_header_and_rows(tmp_path, capsys):
    code, out, _ = _run(["bounds", "--config", _cfg(tmp_path, BOUNDS)], capsys)
    assert code == 0
    lines = out.split("\n")
    assert lines[0] == HEADER
    assert out.endswith("\n") and "\r" not in out
    assert len([ln for ln in lines if ln]) == 4
    for ln in lines[1:4]:
        eps, ck, exact, ratio, status = ln.split(",")
        assert float(ck) >= float(exact)
        assert status == "proved"


def test_bounds_json_schema(tmp_path, capsys):
    code, out, _ = _run(["bounds", "--config", _cfg(tmp_path, BOUNDS), "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert [r["epsilon"] for r in doc["rows"]] == [0.5, 1.0, 2.0]


def test_eps_grid(tmp_path, capsys):
    cfg = {"mode": "absolute", "lam": 1, "phi": 1, "m": 2, "eps_grid": {"start": 0.5, "stop": 4, "num": 5}}
    code, out, _ = _run(["bounds", "--config", _cfg(tmp_path, cfg)], capsys)
    assert code == 0
    assert len(out.strip().split("\n")) == 6


def test_out_file_and_determinism(tmp_path, capsys):
    cfgp = _cfg(tmp_path, BOUNDS)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert _run(["bounds", "--config", cfgp, "--out", str(a)], capsys)[0] == 0
    assert _run(["bounds", "--config", cfgp, "--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().startswith(HEADER + "\n")


@pytest.mark.parametrize("command,doc", [
    ("estimate", {"spectrum": [1, 2, 3], "m": 4, "reps": 500, "epsilon": 1.0}),
    ("verify", {"suite": "relative", "mu": 2.5, "m": 2, "pairs": 2}),
    ("worstcase", {"mode": "relative", "mu": 2.5, "m": 4}),
])
def test_json_reports_byte_identical(tmp_path, capsys, command, doc):
    cfgp = _cfg(tmp_path, doc)
    outs = []
    for name in ("x.json", "y.json"):
        p = tmp_path / name
        code, _, _ = _run([command, "--config", cfgp, "--seed", "7", "--out", str(p)], capsys)
        assert code == 0
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["schema_version"] == 1


def test_seed_flag_overrides_config(tmp_path, capsys):
    doc = {"spectrum": [1, 2, 3], "m": 2, "reps": 200, "seed": 1}
    cfgp = _cfg(tmp_path, doc)
    a = json.loads(_run(["estimate", "--config", cfgp], capsys)[1])
    b = json.loads(_run(["estimate", "--config", cfgp, "--seed", "2"], capsys)[1])
    assert a["seed"] == 1 and b["seed"] == 2
    assert a["mean"] != b["mean"]


def test_verify_report_keys(tmp_path, capsys):
    doc = {"suite": "relative", "mu": 2.5, "m": 2, "pairs": 2}
    code, out, _ = _run(["verify", "--config", _cfg(tmp_path, doc)], capsys)
    assert code == 0
    rep = json.loads(out)
    assert {"claim", "region", "grid", "margins", "verdict", "provenance"} <= set(rep)
    assert rep["verdict"] == "pass"


def test_verify_probe_is_report_only(tmp_path, capsys):
    doc = {"suite": "probe", "kind": "relative", "mu": 2.5, "alpha": 1.0, "trials": 3}
    code, out, _ = _run(["verify", "--config", _cfg(tmp_path, doc)], capsys)
    assert code == 0
    assert json.loads(out)["verdict"] == "report-only"


def test_samplesize_single_line(tmp_path, capsys):
    doc = {"mode": "relative", "mu": 2.5, "epsilon": 0.5, "delta": 0.05}
    code, out, _ = _run(["samplesize", "--config", _cfg(tmp_path, doc)], capsys)
    assert code == 0
    assert out.count("\n") == 1
    assert out.startswith("m=") and "method=ck" in out and "status=" in out


def test_worstcase_abs(tmp_path, capsys):
    doc = {"mode": "absolute", "lam": 1, "phi": 1, "m": 4}
    code, out, _ = _run(["worstcase", "--config", _cfg(tmp_path, doc)], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["spectrum"] == [1.0]
    assert rep["regions"]["proved"] is None


# --------------------------------------------------------------- exit codes

@pytest.mark.parametrize("command,doc", [
    ("bounds", dict(BOUNDS, bogus=1)),
    ("bounds", {"mode": "relative", "mu": -1, "m": 4}),
    ("bounds", {"mode": "relative", "lam": 1, "phi": 1, "m": 4}),
    ("bounds", {"mode": "relative", "mu": 2.5, "m": 0}),
    ("samplesize", {"mode": "relative", "mu": 2.5, "epsilon": 0.5, "delta": 1.5}),
    ("estimate", {"spectrum": [], "m": 2, "reps": 3}),
    ("verify", {"suite": "relative", "mu": 2.5, "m": 2, "pairs": 1, "extra": True}),
])
def test_config_errors_exit_2(tmp_path, capsys, command, doc):
    out = tmp_path / "out.txt"
    code, _, err = _run([command, "--config", _cfg(tmp_path, doc), "--out", str(out)], capsys)
    assert code == 2
    assert err
    assert not out.exists()


def test_unreadable_and_malformed_config(tmp_path, capsys):
    assert _run(["bounds", "--config", str(tmp_path / "missing.json")], capsys)[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert _run(["bounds", "--config", str(bad)], capsys)[0] == 2
    assert _run(["nosuch", "--config", str(bad)], capsys)[0] == 2


def test_verify_csv_rejected(tmp_path, capsys):
    doc = {"suite": "relative", "mu": 2.5, "m": 2, "pairs": 1}
    assert _run(["verify", "--config", _cfg(tmp_path, doc), "--format", "csv"], capsys)[0] == 2


def test_region_refusal_exit_4_and_force(tmp_path, capsys):
    doc = {"mode": "absolute", "lam": 1, "phi": 1, "epsilon": 0.5, "delta": 0.05, "method": "extremal"}
    cfgp = _cfg(tmp_path, doc)
    out = tmp_path / "o.json"
    code, _, err = _run(["samplesize", "--config", cfgp, "--out", str(out)], capsys)
    assert code == 4 and "force" in err
    assert not out.exists()
    code, stdout, _ = _run(["samplesize", "--config", cfgp, "--force"], capsys)
    assert code == 0 and "status=conjectured" in stdout


def test_numeric_error_exit_3(tmp_path, capsys, monkeypatch):
    def boom(*a, **k):
        raise NumericalError("quadrature did not converge")
    monkeypatch.setattr(cli, "compare_report", boom)
    out = tmp_path / "o.csv"
    code, _, err = _run(["bounds", "--config", _cfg(tmp_path, BOUNDS), "--out", str(out)], capsys)
    assert code == 3 and "numeric" in err
    assert not out.exists()


def test_failed_proved_claim_exit_5(tmp_path, capsys, monkeypatch):
    def failing(*a, **k):
        return {"schema_version": 1, "claim": "c", "region": {}, "grid": {}, "margins": {},
                "verdict": "fail", "provenance": "verified"}
    monkeypatch.setattr(cli, "dominance_suite", failing)
    doc = {"suite": "relative", "mu": 2.5, "m": 2, "pairs": 1}
    code, out, err = _run(["verify", "--config", _cfg(tmp_path, doc)], capsys)
    assert code == 5
    assert json.loads(out)["verdict"] == "fail"
    assert "failed" in err


def test_console_script_entry(tmp_path):
    cfgp = _cfg(tmp_path, BOUNDS)
    res = subprocess.run([sys.executable, "-m", "tracetails.cli", "bounds", "--config", cfgp],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.startswith(HEADER + "\n")
