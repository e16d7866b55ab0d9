import json
import math

import numpy as np

from ptlab import io
from ptlab.matrixpt import PtPhase


def test_fmt():
    assert io.fmt(1 / 3) == "0.333333333"
    assert io.fmt(np.float64(2.5)) == "2.5"
    assert io.fmt(7) == "7"
    assert io.fmt(True) == "true"
    assert io.fmt(math.nan) == "nan"
    assert io.fmt(-math.inf) == "-inf"
    assert io.fmt("grid") == "grid"


def test_csv_round_trip(tmp_path):
    path = tmp_path / "t.csv"
    io.write_csv(path, ("n", "E"), [(0, 1.0), (1, np.float64(2 / 3))])
    header, rows = io.read_csv(path)
    assert header == ["n", "E"]
    assert rows == [["0", "1"], ["1", "0.666666667"]]


def test_dumps_plain_types():
    out = json.loads(io.dumps({"z": 1 + 2j, "a": np.arange(2), "p": PtPhase.BROKEN, "x": math.inf}))
    assert out == {"z": {"re": 1.0, "im": 2.0}, "a": [0, 1], "p": PtPhase.BROKEN.value, "x": "inf"}
    assert io.dumps({"b": 1, "a": 2}).index('"a"') < io.dumps({"b": 1, "a": 2}).index('"b"')


def test_svg_nan_splits_series(tmp_path):
    path = tmp_path / "p.svg"
    io.svg_plot(path, [{"x": [0, 1, 2, 3, 4], "y": [0, 1, math.nan, 1, 0], "dashed": True}],
                "t", "x", "y", markers=[(2.0, 0.5)])
    text = path.read_text()
    assert text.count("<polyline") == 2
    assert "stroke-dasharray" in text and "<circle" in text
    assert f"<!-- {io.SVG_VERSION} -->" in text
    assert text.rstrip().endswith("</svg>")


def test_svg_all_nan_does_not_fail(tmp_path):
    path = tmp_path / "e.svg"
    io.svg_plot(path, [{"x": [math.nan], "y": [math.nan]}])
    assert "<polyline" not in path.read_text()
