import csv
import io
import json

import numpy as np
import pytest

from multrans.cli import main
from multrans.groups import lambda_matrix, make_cyclic
from multrans.io import read_matrix, write_matrix
from multrans.symbols import SymbolTensor

from helpers import cgauss


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_trunc_growth_csv(capsys):
    code, out, _ = _run(capsys, "trunc-growth", "--sizes", "2,4")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["N", "ratio", "lnN"]
    assert float(rows[0]["ratio"]) == pytest.approx(np.sqrt(5) / 2)


def test_json_embeds_resolved_config(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"sizes": "2,3", "seed": 7}))
    code, out, _ = _run(capsys, "trunc-growth", "--config", str(cfg), "--seed", "9", "--json")
    rep = json.loads(out)
    assert code == 0 and rep["config"]["seed"] == 9 and rep["config"]["sizes"] == "2,3"
    assert len(rep["rows"]) == 2


def test_seed_determinism(capsys):
    args = ["cz-lower", "--sizes", "2,4", "--restarts", "3", "--seed", "5"]
    _, a, _ = _run(capsys, *args)
    _, b, _ = _run(capsys, *args)
    assert a == b


def test_szego_csv_header(capsys, tmp_path):
    out = tmp_path / "s.csv"
    assert main(["szego", "--p", "2", "--sizes", "3,10", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert {"p", "M", "compression", "torus", "gap", "grid_points"} <= set(rows[0])


def test_bad_exponents_exit_2(capsys):
    code, _, err = _run(capsys, "bht-lower", "--sizes", "1", "--p1", "2", "--p2", "3")
    assert code == 2 and "error" in err
    code, _, _ = _run(capsys, "trunc-growth", "--config", "/nonexistent.json")
    assert code == 2


def test_numerical_failure_exit_3(capsys, monkeypatch):
    import multrans.experiments as ex
    monkeypatch.setattr(ex, "transfer_check", lambda *a, **k: {"reports": [{}], "max_lift_gap": 1.0,
                                                              "violations": 0})
    code, _, err = _run(capsys, "transfer-check", "--batch", "1")
    assert code == 3 and "numerical check failed" in err


def test_transfer_check_runs(capsys):
    code, out, _ = _run(capsys, "transfer-check", "--group", "cyclic:3", "--batch", "1",
                        "--restarts", "2")
    assert code == 0 and json.loads(out)["violations"] == 0


def _symbol_file(tmp_path, phi):
    p = tmp_path / "sym.json"
    p.write_text(json.dumps(phi.to_dict()))
    return str(p)


def test_apply_schur_constant_is_product(tmp_path, rng):
    A, B = cgauss(rng, 3, 3), cgauss(rng, 3, 3)
    write_matrix(tmp_path / "a.json", A)
    write_matrix(tmp_path / "b.msmt", B)
    sym = _symbol_file(tmp_path, SymbolTensor.constant(1.0, 3, 3))
    out = tmp_path / "r.json"
    assert main(["apply", "--symbol", sym, "--out", str(out),
                 str(tmp_path / "a.json"), str(tmp_path / "b.msmt")]) == 0
    assert np.allclose(read_matrix(out), A @ B)


def test_apply_hadamard(tmp_path, rng):
    A = cgauss(rng, 3, 3)
    psi = cgauss(rng, 3, 3)
    write_matrix(tmp_path / "a.json", A)
    out = tmp_path / "r.bin"
    assert main(["apply", "--symbol", _symbol_file(tmp_path, SymbolTensor(psi)), "--out", str(out),
                 str(tmp_path / "a.json")]) == 0
    assert np.allclose(read_matrix(out), psi * A)


def test_apply_fourier(tmp_path, rng):
    G = make_cyclic(3)
    f = cgauss(rng, 3)
    write_matrix(tmp_path / "x.json", lambda_matrix(G, f))
    phi = np.array([1.0, 2.0, -1j])
    out = tmp_path / "r.json"
    argv = ["apply", "--mode", "fourier", "--symbol", _symbol_file(tmp_path, SymbolTensor(phi)),
            "--out", str(out), str(tmp_path / "x.json")]
    assert main(argv) == 2
    assert main(argv + ["--group", "cyclic:3"]) == 0
    assert np.allclose(read_matrix(out), lambda_matrix(G, phi * f))
