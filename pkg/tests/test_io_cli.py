import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qidlaw import bernoulli, make_law, poisson, spectrum_lattice, to_triplet, uniform
from qidlaw.cli import main
from qidlaw.io import (LawFileError, law_from_dict, load_law, save_law, spectrum_from_dict,
                       spectrum_to_dict, triplet_from_dict, triplet_to_dict)

SQRT2 = math.sqrt(2.0)


@pytest.fixture
def laws(tmp_path):
    out = {}
    for name, law in {
        "bernoulli03": bernoulli(0.3),
        "bernoulli05": bernoulli(0.5),
        "bernoulli025": bernoulli(0.25),
        "bernoulli075": bernoulli(0.75),
        "degenerate3": make_law([(3.0, 1.0)]),
        "poisson2": poisson(2.0),
        "three_atom_sqrt2": uniform([0.0, 1.0, SQRT2]),
        "torus": make_law([(0.0, 0.8), (1.0, 0.1), (SQRT2, 0.1)]),
    }.items():
        path = tmp_path / f"{name}.json"
        save_law(law, path)
        out[name] = str(path)
    return out


def test_law_file_round_trip(tmp_path):
    law = poisson(2.0)
    save_law(law, tmp_path / "p.json")
    assert load_law(tmp_path / "p.json") == law


@pytest.mark.parametrize("doc, field", [
    ([], "top level"),
    ({}, "atoms"),
    ({"atoms": [{"x": 0}]}, "atoms[0].p"),
    ({"atoms": [{"x": "a", "p": 1}]}, "atoms[0].x"),
    ({"atoms": [{"x": 0, "p": 1}], "tail_mass": "x"}, "tail_mass"),
    ({"atoms": [{"x": 0, "p": 0.5}]}, "atoms"),
])
def test_malformed_law_names_field(doc, field):
    with pytest.raises(LawFileError, match=field.replace("[", r"\[").replace("]", r"\]")):
        law_from_dict(doc)


def test_spectrum_and_triplet_json_round_trip_exactly():
    spec = spectrum_lattice(bernoulli(0.25))
    back = spectrum_from_dict(json.loads(json.dumps(spectrum_to_dict(spec))))
    order = np.argsort(spec.u)
    assert np.array_equal(back.u, spec.u[order])
    assert np.array_equal(back.lam, spec.lam[order])
    assert back.gamma0 == spec.gamma0
    trip = to_triplet(spec)
    again = triplet_from_dict(json.loads(json.dumps(triplet_to_dict(trip))))
    assert again.gamma == trip.gamma and np.array_equal(again.w, trip.w)


def test_check_exit_codes(laws, tmp_path, capsys):
    out = tmp_path / "v.json"
    assert main(["check", "--input", laws["bernoulli03"], "--out", str(out)]) == 0
    v = json.loads(out.read_text())
    assert v["tag"] == "QID" and v["mu"] == pytest.approx(0.4, abs=1e-9)
    assert {"tag", "mu", "witness", "certified", "window", "record_minima"} <= set(v)
    assert main(["check", "--input", laws["bernoulli05"], "--out", str(out)]) == 10
    assert json.loads(out.read_text())["witness"] == pytest.approx(math.pi, abs=1e-6)
    assert main(["check", "--input", laws["three_atom_sqrt2"], "--out", str(out)]) == 20
    assert len(json.loads(out.read_text())["record_minima"]) >= 3


def test_check_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"atoms": [{"x": 0, "p": "a"}]}')
    assert main(["check", "--input", str(bad)]) == 1
    assert "atoms[0].p" in capsys.readouterr().err
    bad.write_text("{not json")
    assert main(["check", "--input", str(bad)]) == 1
    assert main(["check", "--input", str(tmp_path / "missing.json")]) == 1


def test_spectrum_command(laws, tmp_path, capsys):
    prefix = tmp_path / "p2"
    assert main(["spectrum", "--input", laws["poisson2"], "--out", str(prefix)]) == 0
    spec = json.loads((tmp_path / "p2.spectrum.json").read_text())
    trip = json.loads((tmp_path / "p2.triplet.json").read_text())
    assert spec["gamma0"] == 0.0
    assert spec["coeffs"][0]["u"] == 1.0
    assert spec["coeffs"][0]["lambda"] == pytest.approx(2.0, abs=1e-10)
    assert trip["gamma"] == pytest.approx(2 * math.sin(1.0), abs=1e-10)
    printed = capsys.readouterr().out
    for key in ("l1_norm", "truncation_bound", "gamma0", "gamma"):
        assert key in printed


def test_spectrum_degenerate_and_winding(laws, capsys):
    assert main(["spectrum", "--input", laws["degenerate3"]]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["spectrum"]["gamma0"] == 3.0 and doc["spectrum"]["coeffs"] == []
    assert main(["spectrum", "--input", laws["bernoulli075"]]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["spectrum"]["gamma0"] == pytest.approx(1.0)
    assert all(c["index"][0] < 0 for c in doc["spectrum"]["coeffs"])


def test_spectrum_refuses_non_qid(laws, capsys):
    assert main(["spectrum", "--input", laws["bernoulli05"]]) == 10
    assert main(["spectrum", "--input", laws["three_atom_sqrt2"]]) == 20


def test_factor_and_roundtrip(laws, tmp_path, capsys):
    for name in ("poisson2", "bernoulli025", "torus"):
        prefix = tmp_path / name
        assert main(["factor", "--input", laws[name], "--out", str(prefix)]) == 0
        pos = json.loads((tmp_path / f"{name}.pos.json").read_text())
        neg = json.loads((tmp_path / f"{name}.neg.json").read_text())
        assert all(a["w"] > 0 for a in pos["atoms"] + neg["atoms"])
    for name, tol in (("poisson2", 1e-8), ("degenerate3", 0.0), ("bernoulli025", 1e-8)):
        out = tmp_path / f"{name}.rt.json"
        assert main(["roundtrip", "--input", laws[name], "--out", str(out)]) == 0
        assert json.loads(out.read_text())["max_mass_discrepancy"] <= tol
    assert main(["roundtrip", "--input", laws["torus"]]) == 1


def test_csv_outputs_are_byte_stable(laws, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert main(["psi", "--input", laws["bernoulli05"], "--tau", "1", "--window", "3.141592653589793",
                     "--n", "5", "--out", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.reader(a.open()))
    assert rows[0] == ["t", "abs_psi", "skipped_flag"]
    assert rows[1][1] == "nan" and rows[1][2] == "1"
    assert main(["dump-cf", "--input", laws["bernoulli03"], "--t0", "0", "--t1", "3.141592653589793",
                 "--n", "3", "--out", str(a)]) == 0
    rows = list(csv.reader(a.open()))
    assert rows[0] == ["t", "re_f", "im_f", "abs_f"]
    assert float(rows[-1][3]) == pytest.approx(0.4, abs=1e-15)


def test_json_outputs_are_byte_stable(laws, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        main(["check", "--input", laws["three_atom_sqrt2"], "--seed", "5", "--out", str(path)])
    assert a.read_bytes() == b.read_bytes()


def test_threads_env_validated(laws, monkeypatch, capsys):
    monkeypatch.setenv("QID_THREADS", "four")
    assert main(["check", "--input", laws["bernoulli03"]]) == 1
    monkeypatch.setenv("QID_THREADS", "0")
    assert main(["check", "--input", laws["bernoulli03"]]) == 1
    monkeypatch.setenv("QID_THREADS", "4")
    assert main(["check", "--input", laws["bernoulli03"]]) == 0


def test_console_entry_point(laws):
    proc = subprocess.run([sys.executable, "-m", "qidlaw.cli", "check", "--input", laws["bernoulli05"]],
                          capture_output=True, text=True)
    assert proc.returncode == 10
    assert json.loads(proc.stdout)["tag"] == "NOT_QID"
