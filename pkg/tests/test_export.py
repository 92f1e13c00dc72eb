import json

import numpy as np

from skyrme import export


def test_fmt_float_round_trips():
    for x in (0.1, 1e-300, -2.5e17, 1.0 / 3.0, np.float64(7.25)):
        assert float(export.fmt_float(x)) == float(x)
    assert export.fmt_float(3) == "3"
    assert export.fmt_float(float("nan")) == "nan"
    assert export.fmt_float(float("-inf")) == "-inf"


def test_write_csv_atomic(tmp_path):
    path = export.write_csv(tmp_path / "out" / "t.csv", ["t", "E"], [(0.0, 1.0 / 3.0), (0.5, 2.0)])
    assert path.read_text() == "t,E\n0.0,0.3333333333333333\n0.5,2.0\n"
    assert sorted(p.name for p in path.parent.iterdir()) == ["t.csv"]


def test_write_columns(tmp_path):
    path = export.write_columns(tmp_path / "s.csv", {"r": np.array([0.5, 1.5]), "g": np.zeros(2)})
    assert path.read_text().splitlines() == ["r,g", "0.5,0.0", "1.5,0.0"]


def test_json_is_sorted_and_finite(tmp_path):
    path = export.write_json(tmp_path / "x.json", {"b": np.float64(1.5), "a": [np.int64(2), float("inf")]})
    text = path.read_text()
    assert text.index('"a"') < text.index('"b"')
    assert json.loads(text) == {"a": [2, "inf"], "b": 1.5}


def test_svg_polyline():
    svg = export.svg_polyline([0.0, 1.0, 2.0], [1.0, 0.5, float("nan")], "E(t)")
    assert svg.startswith("<svg") and "<polyline" in svg and "E(t)" in svg
    assert "<polyline" not in export.svg_polyline([], [], "empty")
