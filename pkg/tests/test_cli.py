import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from teurkit import ellipse as El
from teurkit import gaussian as G
from teurkit.cli import main, parse_number
from teurkit.linalg import inverse2

SATURATING = ["--r", "1", "--phi", "pi/3", "--r-anc", "1", "--phi-anc=-pi/3"]


def call(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_number():
    assert parse_number("-pi/3") == pytest.approx(-np.pi / 3)
    assert parse_number("2*pi") == pytest.approx(2 * np.pi)
    with pytest.raises(ValueError):
        parse_number("__import__('os')")


def test_analyze_displacement(capsys):
    code, out = call(capsys, "analyze", "--model", "displacement_estimation",
                     "--params", '{"r": 0.5, "phi": 1.0}')
    assert code == 0
    d = json.loads(out)
    assert d["gamma"] == pytest.approx(1.0, abs=1e-4)
    np.testing.assert_allclose(d["qfim"], G.qfim_displacement(0.5, 1.0), rtol=1e-4)
    assert "imag" in d["qgt"]


def test_analyze_qubit_with_povm(capsys):
    code, out = call(capsys, "analyze", "--model", "pure_qubit_bloch", "--theta", "pi/2,0",
                     "--povm", "computational")
    assert code == 0
    d = json.loads(out)
    np.testing.assert_allclose(d["qfim"], np.eye(2), atol=1e-8)
    assert "cfim" in d and "irtr_lhs" in d


def test_analyze_errors(capsys):
    assert call(capsys, "analyze")[0] == 2
    assert call(capsys, "analyze", "--model", "no_such_model")[0] == 2
    assert call(capsys, "analyze", "--model", "pure_qubit_bloch", "--params", "{bad")[0] == 2
    assert call(capsys, "bogus")[0] == 2


def test_teur_check_saturating(capsys):
    code, out = call(capsys, "teur-check", *SATURATING)
    assert code == 0
    d = json.loads(out)
    assert abs(d["teur_lhs"] - 1) < 1e-9
    assert d["teur_satisfied"] is True


def test_teur_check_below_bound(capsys):
    e = 0.9 * inverse2(G.qfim_displacement(1, np.pi / 3))
    flat = ",".join(repr(float(x)) for x in (e[0, 0], e[0, 1], e[1, 1]))
    assert call(capsys, "teur-check", *SATURATING, "--E", flat)[0] == 3


def test_teur_check_inflated(capsys):
    e = 2 * G.joint_cov(G.GaussianScheme(r=1, phi=np.pi / 3, r_anc=1, phi_anc=-np.pi / 3))
    flat = ",".join(repr(float(x)) for x in (e[0, 0], e[0, 1], e[1, 1]))
    code, out = call(capsys, "teur-check", *SATURATING, "--E", flat)
    assert code == 0 and json.loads(out)["teur_lhs"] > 1


def test_teur_check_with_model(capsys):
    code, out = call(capsys, "teur-check", "--model", "displacement_estimation",
                     "--params", '{"r": 0}', "--E", "0.5,0,0.5")
    assert code == 0
    assert json.loads(out)["teur_lhs"] == pytest.approx(1.0, abs=1e-4)


def test_sweep_ancilla_phase_settings(capsys):
    code, out = call(capsys, "sweep", "--r", "1", "--phi", "pi/3", "--r-anc", "1",
                     "--grid", "phi_anc=-pi/3:pi/3:3")
    assert code == 0
    text = out.splitlines()
    assert text[0] == ",".join(G.SWEEP_HEADER)
    data = rows(out)
    assert [float(r["phi_anc"]) for r in data] == pytest.approx([-np.pi / 3, 0, np.pi / 3])
    assert float(data[0]["area"]) == pytest.approx(0.5, abs=1e-12)
    for r in data:
        assert float(r["teur_lhs"]) == pytest.approx(1.0, abs=1e-9)


def test_sweep_two_axes_and_json(capsys):
    code, out = call(capsys, "sweep", "--grid", "r_anc=1:-1:3", "--grid", "phi_anc=0:1:2",
                     "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert len(d) == 6
    assert [x["r_anc"] for x in d[:2]] == [1.0, 1.0]


def test_sweep_errors(capsys):
    assert call(capsys, "sweep")[0] == 2
    assert call(capsys, "sweep", "--grid", "r_anc=0:1:0")[0] == 2
    assert call(capsys, "sweep", "--grid", "alpha=0:1:2")[0] == 2


def test_simulate_deterministic(capsys):
    args = ["simulate", "--trials", "200", "--n", "50", "--seed", "7", "--r", "0.3"]
    a = call(capsys, *args)
    b = call(capsys, *args, "--workers", "3")
    assert a[0] == 0 and a[1] == b[1]
    d = json.loads(a[1])
    assert d["n_trials"] == 200 and d["seed"] == 7


def test_simulate_saturating_reports_value(capsys):
    code, out = call(capsys, "simulate", "--trials", "50", "--n", "10", *SATURATING)
    assert code == 0
    assert json.loads(out)["teur_lhs"] >= 0


def test_simulate_errors(capsys):
    assert call(capsys, "simulate", "--trials", "0")[0] == 2
    assert call(capsys, "simulate", "--trials", "10", "--n", "0")[0] == 2
    assert call(capsys, "simulate")[0] == 2


def test_simulate_round_trip(capsys, tmp_path):
    path = tmp_path / "sim.json"
    code, _ = call(capsys, "simulate", "--trials", "300", "--n", "100", "--seed", "3",
                   "--output", str(path))
    assert code == 0
    sim = json.loads(path.read_text())
    code, out = call(capsys, "teur-check", "--input", str(path))
    # a statistical estimate may sit marginally below 1, which exits 1
    assert code == (0 if sim["teur_lhs"] >= 1 - 1e-9 else 1)
    assert json.loads(out)["teur_lhs"] == pytest.approx(sim["teur_lhs"], abs=1e-12)


def test_simulate_raw_output(capsys, tmp_path):
    raw = tmp_path / "raw.csv"
    call(capsys, "simulate", "--trials", "2", "--n", "25", "--raw", str(raw))
    lines = raw.read_text().splitlines()
    assert lines[0] == "a,b" and len(lines) == 26


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("TEURKIT_SEED", "11")
    _, a = call(capsys, "simulate", "--trials", "20", "--n", "5")
    _, b = call(capsys, "simulate", "--trials", "20", "--n", "5", "--seed", "11")
    assert a == b and json.loads(a)["seed"] == 11


def test_ellipse_csv(capsys):
    code, out = call(capsys, "ellipse", *SATURATING)
    assert code == 0
    data = rows(out)
    assert {r["ellipse_id"] for r in data} == {"quantum", "error_0"}
    assert sum(r["ellipse_id"] == "error_0" for r in data) == 257


def test_ellipse_kappa_scaling(capsys):
    _, one = call(capsys, "ellipse", "--E", "0.5,0,0.5", "--format", "json")
    _, two = call(capsys, "ellipse", "--E", "0.5,0,0.5", "--format", "json", "--kappa", "2")
    p1 = np.array(json.loads(one)[1]["points"])
    p2 = np.array(json.loads(two)[1]["points"])
    np.testing.assert_allclose(p2, 2 * p1, atol=1e-15)


def test_ellipse_grid_json(capsys):
    code, out = call(capsys, "ellipse", "--r", "1", "--phi", "pi/3", "--phi-anc=-pi/3",
                     "--grid", "r_anc=1:-1:3", "--format", "json", "--points", "32")
    assert code == 0
    d = json.loads(out)
    assert [x["ellipse_id"] for x in d] == ["quantum", "error_0", "error_1", "error_2"]
    q = El.quantum_limited_ellipse(np.array(d[0]["A"]))
    for item in d[1:]:
        assert El.contains(El.Ellipse(item["center"], np.array(item["A"])), q)
        assert len(item["points"]) == 33


def test_ellipse_errors(capsys):
    assert call(capsys, "ellipse", "--format", "xml")[0] == 2
    assert call(capsys, "ellipse", "--kappa", "-1")[0] == 2
    assert call(capsys, "ellipse", "--points", "2")[0] == 2


def test_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "scheme": {"r": 1, "phi": "pi/3", "r_anc": 1, "phi_anc": "-pi/3"},
    }))
    code, out = call(capsys, "teur-check", "--config", str(cfg))
    assert code == 0 and abs(json.loads(out)["teur_lhs"] - 1) < 1e-9
    # flags override the file
    code, out = call(capsys, "simulate", "--config", str(cfg), "--r-anc", "0", "--trials", "2")
    scheme = json.loads(out)["scheme"]
    assert scheme["r_anc"] == 0 and scheme["phi"] == pytest.approx(np.pi / 3)
    model_cfg = tmp_path / "model.json"
    model_cfg.write_text(json.dumps({"model": {"name": "pure_qubit_bloch"}, "theta": [1.0, 0.5]}))
    code, out = call(capsys, "analyze", "--config", str(model_cfg))
    assert code == 0 and json.loads(out)["theta"] == [1.0, 0.5]
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert call(capsys, "analyze", "--config", str(bad))[0] == 2


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "teurkit", "teur-check", "--E", "0.5,0,0.5"],
        capture_output=True, text=True,
    )
    assert res.returncode == 0
    assert abs(json.loads(res.stdout)["teur_lhs"] - 1) < 1e-12
