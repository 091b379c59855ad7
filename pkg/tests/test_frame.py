import math
from datetime import datetime

import numpy as np
import pytest

from eventwatch.errors import DataError
from eventwatch.frame import (
    CsvOptions,
    SeriesFrame,
    emit_csv,
    parse_csv,
    select_columns,
    slice_window,
)


def test_parse_basic_with_labels():
    frame = parse_csv("Time,A,EVENT\n1,2.0,0\n2,,1\n")
    assert frame.timestamps == (1, 2)
    assert frame.column_names == ("A",)
    assert frame.values("A")[0] == 2.0
    assert math.isnan(frame.values("A")[1])
    assert list(frame.event_labels) == [False, True]


def test_parse_sensor_schema_with_column_subset():
    header = "Time,Tp,Cl,pH,Redox,Leit,Trueb,Cl_2,Fm,EVENT"
    rows = ["2016-08-14 00:0{i}:00,1,2,3,4,5,6,7,8,0".format(i=i) for i in range(3)]
    frame = parse_csv(header + "\n" + "\n".join(rows) + "\n")
    assert len(frame.column_names) == 8
    assert frame.event_labels is not None
    subset = select_columns(frame, ["Cl", "pH", "Redox", "Leit", "Trueb", "Cl_2"])
    assert subset.column_names == ("Cl", "pH", "Redox", "Leit", "Trueb", "Cl_2")
    assert subset.event_labels is not None
    assert len(subset) == 3


def test_parse_single_row_no_labels():
    frame = parse_csv("Time,X\n1,5.5\n")
    assert len(frame) == 1
    assert frame.event_labels is None


def test_parse_unparseable_cells_become_missing():
    frame = parse_csv("Time,A\n1,abc\n2,3.5\n")
    assert math.isnan(frame.values("A")[0])
    assert frame.values("A")[1] == 3.5


def test_parse_errors():
    with pytest.raises(DataError):
        parse_csv("Time,A,A\n1,2,3\n")  # duplicate names
    with pytest.raises(DataError):
        parse_csv("Time,A\n2,1\n1,2\n")  # non-monotonic
    with pytest.raises(DataError):
        parse_csv("Time,A\n")  # zero data rows
    with pytest.raises(DataError):
        parse_csv("Time,A\nnot-a-time,1\n")
    with pytest.raises(DataError):
        parse_csv("Time,A,EVENT\n1,2,maybe\n")  # label literal not recognized


def test_time_column_by_name_and_datetimes():
    text = "A,When\n1.5,2016-08-14 00:00:00\n2.5,2016-08-14 00:01:00\n"
    frame = parse_csv(text, CsvOptions(time_column="When"))
    assert frame.time_name == "When"
    assert frame.timestamps[0] == datetime(2016, 8, 14, 0, 0, 0)
    assert frame.column_names == ("A",)


def test_emit_round_trip_is_identity():
    frame = parse_csv("Time,A,EVENT\n1,2.0,0\n2,,1\n")
    again = parse_csv(emit_csv(frame))
    assert frame.equals(again)


def test_emit_missing_as_empty_field():
    frame = parse_csv("Time,A\n1,\n2,3\n")
    lines = emit_csv(frame).split("\n")
    assert lines[1] == "1,"
    assert "NaN" not in emit_csv(frame)


def test_round_trip_random_values_bit_equal():
    rng = np.random.default_rng(123)
    n = 10_000
    values = {
        "A": rng.normal(0, 1e6, n),
        "B": rng.uniform(-1e-9, 1e-9, n),
    }
    values["A"][rng.integers(0, n, 200)] = np.nan
    frame = SeriesFrame(timestamps=tuple(range(n)), columns=values)
    again = parse_csv(emit_csv(frame))
    for name in ("A", "B"):
        assert np.array_equal(frame.values(name), again.values(name), equal_nan=True)
    assert again.timestamps == frame.timestamps


def test_select_columns_errors():
    frame = parse_csv("Time,A,B\n1,1,2\n2,3,4\n")
    only_a = select_columns(frame, ["A"])
    assert only_a.column_names == ("A",)
    assert len(only_a) == 2
    with pytest.raises(DataError):
        select_columns(frame, [])
    with pytest.raises(DataError):
        select_columns(frame, ["A", "missing"])


def test_slice_window_bounds():
    frame = parse_csv("Time,A\n" + "".join(f"{i},{i}\n" for i in range(5)))
    view = slice_window(frame, 0, 3)
    assert list(view.values("A")) == [0, 1, 2]
    with pytest.raises(DataError):
        slice_window(frame, 3, 3)


def test_slices_stepping_by_five_tile_a_frame():
    n = 1000
    frame = SeriesFrame(timestamps=tuple(range(n)), columns={"A": np.arange(n, dtype=float)})
    windows = [slice_window(frame, start, 25) for start in range(0, n - 25 + 1, 5)]
    assert len(windows) == (n - 25) // 5 + 1
    for w, view in enumerate(windows):
        assert view.values("A")[0] == 5 * w
        assert len(view) == 25


def test_frame_arrays_are_immutable():
    frame = parse_csv("Time,A\n1,1\n2,2\n")
    with pytest.raises(ValueError):
        frame.values("A")[0] = 99.0


def test_mixed_timestamp_types_rejected():
    with pytest.raises(DataError):
        parse_csv("Time,A\n1,1\n2016-08-14 00:00:00,2\n")
