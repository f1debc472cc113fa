import json

import numpy as np
import pytest

from winhopf import Symbol
from winhopf.errors import SchemaError
from winhopf.io import (
    load_pair,
    load_rhs,
    load_symbol,
    named_rhs,
    read_json,
    read_matrix,
    read_samples,
    write_matrix,
    write_matrix_csv,
)
from winhopf.symbols import symbol_from_json, symbol_to_json


def test_symbol_json_round_trip():
    g = Symbol.from_zpk([0.5 - 2j], [0.3 - 1j], 1.5 - 0.5j, 2.0) * Symbol.zeta(-1)
    h = symbol_from_json(json.loads(json.dumps(symbol_to_json(g))))
    t = np.linspace(-20, 20, 101)
    assert np.max(np.abs(g(t) - h(t))) < 1e-12


def test_load_files(data_dir):
    g = load_symbol(data_dir / "zeta.json")
    assert g(np.array([0.0]))[0] == pytest.approx(-1.0)
    p = load_pair(data_dir / "pair_exponential.json")
    assert (p.nu1, p.nu2) == (-3.0, -1.0)


def test_malformed_json(data_dir):
    with pytest.raises(SchemaError):
        read_json(data_dir / "malformed.json")


def test_pair_schema_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"a": {"gain": [1.0, 0.0]}}))
    with pytest.raises(SchemaError):
        load_pair(bad)
    bad.write_text(json.dumps({"a": {"zeros": [[0.0]]}, "b": {}}))
    with pytest.raises(SchemaError):
        load_pair(bad)


def test_named_rhs():
    t = np.array([0.0, 1.0])
    assert np.allclose(named_rhs("psi0")(t), np.sqrt(2) * np.exp(-t))
    assert named_rhs("gauss:1,2")(np.array([1.0]))[0] == 1.0
    for spec in ("gauss:1", "gauss:1,-1", "sine"):
        with pytest.raises(SchemaError):
            named_rhs(spec)


def test_rhs_samples(tmp_path):
    path = tmp_path / "f.csv"
    path.write_text("t,value_re,value_im\n0,1,0\n2,3,-2\n")
    f = load_rhs(str(path))
    assert f(np.array([1.0]))[0] == pytest.approx(2 - 1j)
    assert f(np.array([5.0]))[0] == 0
    path.write_text("0,1,0\nx,1,1\n")
    with pytest.raises(SchemaError):
        read_samples(path)
    with pytest.raises(SchemaError):
        load_rhs(str(tmp_path / "missing.csv"))


def test_matrix_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    M = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    path = tmp_path / "m.bin"
    write_matrix(path, M, {"formula_id": "EqRI"})
    assert path.read_bytes()[:8] == b"WHOPMTX1"
    assert np.array_equal(read_matrix(path), M)
    meta = json.loads((tmp_path / "m.bin.json").read_text())
    assert meta["shape"] == [5, 3] and meta["formula_id"] == "EqRI"
    (tmp_path / "junk.bin").write_bytes(b"notamatrix")
    with pytest.raises(SchemaError):
        read_matrix(tmp_path / "junk.bin")


def test_matrix_csv(tmp_path):
    M = np.array([[1 + 2j, 0], [0, -1j]])
    path = tmp_path / "m.csv"
    write_matrix_csv(path, M)
    rows = [[complex(x) for x in line.split(",")] for line in path.read_text().splitlines()]
    assert np.array_equal(np.array(rows), M)
