import csv
import io
import json
import math

from hypothesis import given
from hypothesis import strategies as st

from fraclap.report import EXACT, Report, from_json, to_csv, to_json


def test_empty_report_csv_is_header_only():
    r = Report("apply", columns=["x", "value"])
    assert to_csv(r) == "x,value\r\n"


def test_single_row_csv_has_two_lines():
    r = Report("apply")
    r.add_row({"x": "0.0", "value": 1.0}, {"value": 1e-12})
    lines = to_csv(r).split("\r\n")
    assert lines[0] == "x,value,value_bound" and len(lines) == 3 and lines[2] == ""


def test_csv_quoting():
    r = Report("apply")
    r.add_row({"x": "0.5,1.0", "note": 'say "hi"'})
    rows = list(csv.reader(io.StringIO(to_csv(r))))
    assert rows[1] == ["0.5,1.0", 'say "hi"']


def test_exact_marker_in_json():
    r = Report("apply")
    r.add_row({"v": 0.0}, {"v": EXACT})
    assert json.loads(to_json(r))["bounds"][0]["v"] == "exact"


def test_stable_field_names():
    d = json.loads(to_json(Report("verify")))
    assert list(d) == ["command", "inputs", "results", "bounds", "verdicts", "duration_ms"]


finite = st.floats(allow_nan=False, allow_infinity=False)


@given(st.lists(finite, min_size=1, max_size=20))
def test_json_round_trip_bit_exact(values):
    r = Report("verify")
    for i, v in enumerate(values):
        r.add_row({"i": i, "v": v}, {"v": abs(v) * 1e-3})
    back = from_json(to_json(r))
    for row, v in zip(back["results"], values):
        assert math.copysign(1.0, row["v"]) == math.copysign(1.0, v) and row["v"] == v
