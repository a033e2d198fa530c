import csv
import json

import numpy as np
import pytest

from dirac_hardy.clifford import build_clifford
from dirac_hardy.dirac import GridSpec, SpinorField, load_field_binary, make_annulus_bump, save_field_binary, save_field_csv
from dirac_hardy import reports


@pytest.fixture
def bump():
    return make_annulus_bump(GridSpec(2, 32, 3.0), build_clifford(2).m, 1.0, 2.0, seed=9)


def test_binary_roundtrip_is_exact(tmp_path, bump):
    p = tmp_path / "u.spinor"
    save_field_binary(bump, p)
    back = load_field_binary(p)
    assert back.grid == bump.grid
    assert back.support_annulus == bump.support_annulus
    assert np.array_equal(back.values, bump.values)


def test_binary_roundtrip_without_annulus(tmp_path):
    g = GridSpec(3, 16, 1.0)
    u = SpinorField(g, np.arange(4 * 16**3).reshape((4,) + g.shape) * (1 - 2j))
    save_field_binary(u, tmp_path / "v")
    back = load_field_binary(tmp_path / "v")
    assert back.support_annulus is None and np.array_equal(back.values, u.values)


def test_binary_rejects_foreign_file(tmp_path):
    (tmp_path / "x").write_bytes(b"not a field")
    with pytest.raises(ValueError):
        load_field_binary(tmp_path / "x")


def test_binary_rejects_truncated_payload(tmp_path, bump):
    p = tmp_path / "u"
    save_field_binary(bump, p)
    p.write_bytes(p.read_bytes()[:-16])
    with pytest.raises(ValueError):
        load_field_binary(p)


def test_csv_layout(tmp_path, bump):
    p = tmp_path / "u.csv"
    save_field_csv(bump, p)
    lines = p.read_text().splitlines()
    head = json.loads(lines[0][2:])
    assert head == {"box_halfwidth": 3.0, "m": 2, "n": 2, "points_per_axis": 32, "support_annulus": [1.0, 2.0]}
    assert lines[1] == "x1,x2,re0,im0,re1,im1"
    data = np.loadtxt(p, delimiter=",", skiprows=2)
    assert data.shape == (32 * 32, 6)
    g = bump.grid
    assert np.array_equal(data[:, 0], np.broadcast_to(g.coords[0], g.shape).ravel())
    assert np.array_equal(data[:, 4] + 1j * data[:, 5], bump.values[1].ravel())


def test_json_is_sorted_and_stable():
    a = reports.dumps({"b": 1.0, "a": [0.1, 2]})
    assert a == reports.dumps({"a": [0.1, 2], "b": 1.0})
    assert a.index('"a"') < a.index('"b"') and a.endswith("\n")
    with pytest.raises(ValueError):
        reports.dumps({"x": float("nan")})


def test_rows_use_repr_floats(tmp_path):
    p = reports.write_rows(("r", "M"), [(0.1, 1 / 3)], tmp_path / "m.csv")
    rows = list(csv.reader(p.open()))
    assert rows == [["r", "M"], ["0.1", repr(1 / 3)]]
    assert float(rows[1][1]) == 1 / 3
