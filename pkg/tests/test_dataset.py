import io
from decimal import Decimal

import pytest
from hypothesis import given, strategies as st

from dsverif.dataset import (CsvParseError, Dataset, EmptyDatasetError, RaggedRowError,
                             distinct_labels, dump_csv, from_values, load_csv,
                             parse_decimal, synthetic_dataset)

EXAMPLE_CSV = b"""0.051267,0.69956,1
-0.092742,0.68494,0
-0.21371,0.69225,-1
-0.375,0.50219,-1
-0.51325,0.46564,-1
-0.52477,0.2098,-1
-0.39804,0.034357,-1
-0.30588,-0.19225,-1
0.016705,-0.40424,-1
0.13191,-0.51389,-1
"""


class TestLoadCsv:
    def test_example_file(self):
        ds = load_csv(io.BytesIO(EXAMPLE_CSV))
        assert (ds.m, ds.n) == (10, 2)
        assert ds.outputs == tuple(Decimal(x) for x in [1, 0] + [-1] * 8)
        assert ds.rows[0] == (Decimal("0.051267"), Decimal("0.69956"))
        assert ds.rows[1][0] == Decimal("-0.092742")

    def test_matches_shipped_fixture(self, example_ds):
        assert load_csv(EXAMPLE_CSV) == example_ds

    def test_single_line(self):
        ds = load_csv(b"0,0,0\n")
        assert (ds.m, ds.n) == (1, 2)
        assert ds.outputs == (Decimal(0),)

    def test_non_numeric(self):
        with pytest.raises(CsvParseError) as exc:
            load_csv(b"a,b,c\n")
        assert exc.value.row == 1
        assert exc.value.column == 1

    def test_parse_error_coordinates(self):
        with pytest.raises(CsvParseError) as exc:
            load_csv(b"1,2,3\n4,x,6\n")
        assert (exc.value.row, exc.value.column) == (2, 2)

    def test_ragged(self):
        with pytest.raises(RaggedRowError) as exc:
            load_csv(b"1,2,3\n4,5\n")
        assert exc.value.line == 2
        assert "line 2" in str(exc.value)

    def test_single_column_rejected(self):
        with pytest.raises(RaggedRowError):
            load_csv(b"1\n2\n")

    def test_empty(self):
        with pytest.raises(EmptyDatasetError):
            load_csv(b"")
        with pytest.raises(EmptyDatasetError):
            load_csv(b"\n\n")

    def test_missing_value_rejected(self):
        with pytest.raises(CsvParseError):
            load_csv(b"1,,0\n")

    @pytest.mark.parametrize("bad", ["nan", "inf", "-Infinity", "1_000", "0x10"])
    def test_non_finite_or_exotic_rejected(self, bad):
        with pytest.raises(CsvParseError):
            load_csv(f"{bad},1\n".encode())

    def test_scientific_notation_normalized(self):
        ds = load_csv(b"1e-3,2.5E2,1\n")
        assert ds.rows[0] == (Decimal("0.001"), Decimal("250"))
        assert str(ds.rows[0][0]) == "0.001"

    def test_header_skip(self):
        ds = load_csv(b"x,y,label\n1,2,0\n", skip_header=True)
        assert ds.m == 1
        with pytest.raises(CsvParseError):
            load_csv(b"x,y,label\n1,2,0\n")

    def test_path_and_whitespace(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_bytes(b" 1 , 2 ,0\r\n3,4,1\r\n\r\n")
        ds = load_csv(p)
        assert ds.m == 2
        assert ds.rows[1] == (Decimal(3), Decimal(4))

    def test_deterministic(self):
        assert load_csv(EXAMPLE_CSV) == load_csv(EXAMPLE_CSV)


class TestDataset:
    def test_invariants(self):
        with pytest.raises(EmptyDatasetError):
            Dataset((), ())
        with pytest.raises(RaggedRowError):
            from_values([[1, 2], [3]], [0, 0])
        with pytest.raises(ValueError):
            from_values([[1, 2]], [0, 1])
        with pytest.raises(ValueError):
            from_values([[float("nan")]], [0])

    def test_head(self, example_ds):
        h = example_ds.head(5)
        assert h.m == 5 and h.rows == example_ds.rows[:5]

    def test_synthetic(self):
        ds = synthetic_dataset(118, 2, seed=3)
        assert (ds.m, ds.n) == (118, 2)
        assert all(Decimal(-1) <= v <= Decimal(1) for r in ds.rows for v in r)
        assert ds == synthetic_dataset(118, 2, seed=3)


class TestDistinctLabels:
    def test_example(self, example_ds):
        ls = distinct_labels(example_ds)
        assert ls.labels == (Decimal(1), Decimal(0), Decimal(-1))
        assert ls.l == 3

    def test_unlabeled(self):
        ls = distinct_labels(from_values([[1], [2], [3]], [0, 0, 0]))
        assert ls.labels == (Decimal(0),) and ls.l == 1

    def test_first_occurrence_order(self):
        ls = distinct_labels(from_values([[0]] * 5, [5, 5, 7, 5, 7]))
        assert ls.labels == (Decimal(5), Decimal(7))

    def test_numeric_equality(self):
        ls = distinct_labels(from_values([[0]] * 2, ["1", "1.0"]))
        assert ls.l == 1


decimals = st.decimals(min_value=-1000, max_value=1000, places=4,
                       allow_nan=False, allow_infinity=False)


@st.composite
def datasets(draw):
    m = draw(st.integers(1, 12))
    n = draw(st.integers(1, 4))
    rows = draw(st.lists(st.lists(decimals, min_size=n, max_size=n), min_size=m, max_size=m))
    outputs = draw(st.lists(st.sampled_from([-1, 0, 1, 2]), min_size=m, max_size=m))
    return from_values(rows, outputs)


@given(datasets())
def test_csv_round_trip(ds):
    assert load_csv(dump_csv(ds).encode()) == ds


@given(datasets())
def test_labels_cover_outputs(ds):
    ls = distinct_labels(ds)
    assert set(ls.labels) == set(ds.outputs)
    assert len(set(ls.labels)) == ls.l <= ds.m
    assert ls.labels[0] == ds.outputs[0]


@given(decimals)
def test_parse_decimal_round_trip(v):
    assert parse_decimal(str(v)) == v
