import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from maassperiods import maass
from maassperiods.cli import main


@pytest.fixture()
def cache(tmp_path, monkeypatch):
    d = tmp_path / "cache"
    monkeypatch.setenv(maass.CACHE_ENV, str(d))
    return d


@pytest.fixture()
def form_file(tmp_path, even64):
    return str(maass.export_form(even64, tmp_path / "even.json"))


def _body(path):
    return [l for l in open(path).read().splitlines() if not l.startswith("#")]


def test_geodesic_row(tmp_path, cache):
    out = tmp_path / "g.csv"
    assert main(["geodesic", "--alpha", "sqrt2", "--out", str(out)]) == 0
    head, row = _body(out)
    rec = dict(zip(head.split(","), next(csv.reader([row]))))
    assert json.loads(rec["gamma"]) == [[3, 4], [2, 3]]
    assert rec["q"] == "17+12*sqrt(2)"
    assert abs(float(rec["L"]) - 3.525494) < 1e-6
    text = out.read_text()
    assert "first pole line Re s = 0" in text and '"alpha": "sqrt2"' in text


def test_empty_pole_box(tmp_path, cache, form_file):
    out = tmp_path / "p.csv"
    assert main(["poles", "--coeffs", form_file, "--box", "0", "-1", "0", "0", "--out", str(out)]) == 0
    assert _body(out) == ["j,k,s_re,s_im,res_re,res_im,removable"]


def test_poles_table(tmp_path, cache, form_file):
    out = tmp_path / "p.csv"
    assert main(["poles", "--coeffs", form_file, "--box", "-1.5", "0.5", "-4", "4", "--out", str(out)]) == 0
    assert len(_body(out)) == 1 + 2 * 3


def test_verify_tampered_file(tmp_path, cache, even64, capsys):
    rec = maass.form_to_record(even64)
    rec["coefficients"][3][1] += 1e-3
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(rec))
    assert main(["verify", "--coeffs", str(bad)]) == 3
    assert "Hecke gate" in capsys.readouterr().out


def test_tampered_import_exit_code(tmp_path, cache, even64, capsys):
    rec = maass.form_to_record(even64)
    rec["coefficients"][5][1] *= 1.01
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(rec))
    assert main(["import", "--coeffs", str(bad)]) == 3
    assert "b2b3-b6" in capsys.readouterr().err


def test_config_errors(tmp_path, cache, capsys):
    assert main(["geodesic", "--alpha", "3"]) == 1
    assert main(["nonsense"]) == 1
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"bogus_key": 1}))
    assert main(["geodesic", "--config", str(cfg)]) == 1
    assert main(["eval-form", "--z", "0.1-1j"]) == 1
    missing = tmp_path / "nope.json"
    assert main(["eval-form", "--coeffs", str(missing)]) == 1


def test_numerical_failure_exit(tmp_path, cache, capsys):
    assert main(["solve", "--parity", "odd", "--bracket", "5.0", "5.2"]) == 2
    assert "NoRootError" in capsys.readouterr().err


def test_config_file_and_reproducibility(tmp_path, cache, form_file):
    cfg = tmp_path / "job.json"
    cfg.write_text(json.dumps({"alpha": "golden", "s": ["2", "1.5+3j", "-0.5"], "coeffs": form_file}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["continue", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["continue", "--config", str(cfg), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert len(_body(a)) == 4
    # command-line flags override the config file
    assert main(["continue", "--config", str(cfg), "--s", "2", "--out", str(b)]) == 0
    assert len(_body(b)) == 2


def test_solve_then_import_matches(tmp_path, cache):
    solved = tmp_path / "solved.json"
    assert main(["solve", "--parity", "even", "--n-coeffs", "64", "--out", str(solved)]) == 0
    rec = json.loads(solved.read_text())
    assert rec["run"]["command"] == "solve" and set(rec["gate_residuals"]) >= {"b2b3-b6"}
    exported = solved
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["period-limit", "--s", "2", "1+1j", "--out", str(a)]) == 0
    assert main(["period-limit", "--s", "2", "1+1j", "--coeffs", str(exported), "--out", str(b)]) == 0
    assert _body(a) == _body(b)
    assert main(["import", "--coeffs", str(exported)]) == 0
    assert any(p.name.startswith("even_R13.7797513519") for p in cache.iterdir())


def test_other_commands(tmp_path, cache, form_file):
    cases = [
        ["eval-form", "--z", "0.1+1.2j", "-0.3+0.9j"],
        ["period-closed", "--alpha", "golden", "--j", "0", "1"],
        ["series", "--s", "2", "1.5+3j", "--route", "period"],
        ["mean-value", "--alpha", "sqrt2", "--T", "50", "100"],
    ]
    for args in cases:
        out = tmp_path / f"{args[0]}.csv"
        assert main(args + ["--coeffs", form_file, "--out", str(out)]) == 0, args
        assert len(_body(out)) >= 2
    vals = [float(r.split(",")[2]) for r in _body(tmp_path / "eval-form.csv")[1:]]
    ev = maass.import_form(form_file)
    assert np.allclose(vals, maass.evaluate_many(ev, [0.1 + 1.2j, -0.3 + 0.9j]), rtol=1e-14)


def test_series_direct_default(tmp_path, cache, even_long):
    p = maass.export_form(even_long, tmp_path / "long.json")
    out = tmp_path / "d.csv"
    assert main(["series", "--coeffs", str(p), "--s", "2", "--out", str(out)]) == 0
    assert _body(out)[1].endswith("dirichlet,hecke_b")


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "maassperiods", "geodesic", "--alpha", "golden"],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert "7/2+3/2*sqrt(5)" in r.stdout
