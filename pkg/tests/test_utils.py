# tests/test_utils.py

import json
import math
from dataclasses import dataclass

import numpy as np
from rich.console import Console

from curvebound.types.common import CheckResult
from curvebound.utils import CheckTracker, canonical_json, csv_text, to_jsonable, write_csv, write_json, write_text


@dataclass
class _Point:
    x: float
    tags: tuple


def test_to_jsonable_handles_numpy_and_non_finite():
    data = {
        "array": np.array([1.0, np.nan, np.inf]),
        "flag": np.bool_(True),
        "count": np.int64(3),
        "point": _Point(x=-np.inf, tags=("a",)),
    }
    assert to_jsonable(data) == {
        "array": [1.0, None, "inf"],
        "flag": True,
        "count": 3,
        "point": {"x": "-inf", "tags": ["a"]},
    }


def test_canonical_json_sorts_keys():
    assert canonical_json({"b": 1, "a": [1.5]}) == '{"a":[1.5],"b":1}'


def test_csv_text_format():
    text = csv_text(["E", "ok"], [[0.1, True], [-2.0, False]], preamble=["scan"])
    assert text == "# scan\r\nE,ok\r\n0.1,1\r\n-2.0,0\r\n"


def test_writers_create_directories(tmp_path):
    path = write_json(tmp_path / "nested" / "out.json", {"value": math.nan})
    assert json.loads(path.read_text(encoding="utf-8")) == {"value": None}
    path = write_csv(tmp_path / "nested" / "out.csv", ["a"], [[1]])
    assert path.read_bytes() == b"a\r\n1\r\n"
    assert sorted(p.name for p in (tmp_path / "nested").iterdir()) == ["out.csv", "out.json"]


def test_write_text_replaces_existing_file(tmp_path):
    target = tmp_path / "plots" / "scan.gp"
    write_text(target, "first\n")
    path = write_text(target, "plot 1\n")
    assert path == target
    assert path.read_bytes() == b"plot 1\n"
    assert [p.name for p in target.parent.iterdir()] == ["scan.gp"]


def test_check_tracker_summary():
    console = Console(record=True, width=120)
    tracker = CheckTracker(1, console=console)
    with tracker:
        tracker.set_total(2)
        tracker.start_check("first")
        tracker.complete_check(CheckResult("first", True, detail="fine"))
        tracker.start_check("second")
        tracker.complete_check(CheckResult("second", False, error="broken"))
    tracker.display_summary()
    assert [r.name for r in tracker.failed] == ["second"]
    output = console.export_text()
    assert "broken" in output
    assert "1/2 passed" in output
