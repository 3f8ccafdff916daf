import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from helpers import random_system
from pelemma import io


def test_system_roundtrip(tmp_path, static_identity):
    for sys in (random_system(0), static_identity):
        path = tmp_path / "sys.json"
        io.save_system(path, sys)
        back = io.load_system(path)
        for a, b in zip((sys.A, sys.B, sys.C, sys.D), (back.A, back.B, back.C, back.D)):
            np.testing.assert_array_equal(a, b)


def test_system_bad_dims():
    doc = {"n": 2, "m": 1, "p": 1, "A": [[1.0]], "B": [[1.0]], "C": [[1.0]], "D": [[0.0]]}
    with pytest.raises(ValueError):
        io.system_from_dict(doc)
    with pytest.raises(ValueError):
        io.system_from_dict({"n": 1})


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 20), st.integers(1, 3)),
              elements=st.floats(allow_nan=False, allow_infinity=False, width=64)))
def test_signal_roundtrip_exact(tmp_path_factory, u):
    path = tmp_path_factory.mktemp("sig") / "u.csv"
    io.write_signal(path, u)
    back = io.read_signal(path)
    assert back.tobytes() == u.tobytes()


def test_signal_index_order(tmp_path):
    path = tmp_path / "u.csv"
    path.write_text("k,v0\n0,1.0\n2,3.0\n")
    with pytest.raises(ValueError):
        io.read_signal(path)


def test_matrix_sidecar(tmp_path):
    path = tmp_path / "H.csv"
    M = np.arange(6.0).reshape(2, 3) / 7
    io.write_matrix(path, M, {"L": 2})
    np.testing.assert_array_equal(io.read_matrix(path), M)
    meta = json.loads((tmp_path / "H.csv.meta.json").read_text())
    assert meta == {"rows": 2, "cols": 3, "L": 2}


def test_records(tmp_path):
    recs = [{"name": "a", "steps": {"x": 1.0}}, {"name": "b", "margin": 0.5}]
    io.write_records(tmp_path / "r.json", recs)
    assert json.loads((tmp_path / "r.json").read_text()) == recs
    io.write_records(tmp_path / "r.csv", recs, "csv")
    lines = (tmp_path / "r.csv").read_text().splitlines()
    assert lines[0] == "name,steps,margin" and len(lines) == 3
    with pytest.raises(ValueError):
        io.write_records(tmp_path / "r.x", recs, "xml")
