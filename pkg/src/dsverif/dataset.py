"""Structured datasets: a real-valued feature matrix plus an output vector.

Values are kept as :class:`decimal.Decimal` so that the SMT-LIB emitted
for them is exact. The last CSV column is the expected output.
"""

from __future__ import annotations

import csv
import io
import os
import random
import re
from dataclasses import dataclass
from decimal import Decimal
from pathlib import Path
from typing import BinaryIO, Iterable, Sequence, Union

import numpy as np

__all__ = [
    "Dataset",
    "LabelSet",
    "DatasetError",
    "EmptyDatasetError",
    "RaggedRowError",
    "CsvParseError",
    "load_csv",
    "dump_csv",
    "distinct_labels",
    "load_example",
    "synthetic_dataset",
    "from_values",
    "parse_decimal",
]

_DECIMAL_RE = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")

Source = Union[str, os.PathLike, BinaryIO, bytes]


class DatasetError(ValueError):
    """Base class for dataset loading and validation failures."""


class EmptyDatasetError(DatasetError):
    pass


class RaggedRowError(DatasetError):
    def __init__(self, line: int, found: int, expected: int):
        self.line = line
        super().__init__(
            f"line {line}: expected {expected} fields, found {found}")


class CsvParseError(DatasetError):
    def __init__(self, row: int, column: int, text: str):
        self.row = row
        self.column = column
        super().__init__(
            f"row {row}, column {column}: cannot parse {text!r} as a decimal real")


def parse_decimal(text: str) -> Decimal:
    """Parse a finite decimal numeral, accepting scientific notation.

    Returns the plain-decimal normal form, so ``1e-3`` becomes ``0.001``.
    Raises ``ValueError`` for anything else (including nan/inf).
    """
    text = text.strip()
    if not _DECIMAL_RE.match(text):
        raise ValueError(text)
    value = Decimal(text)
    if "e" in text.lower():
        value = Decimal(format(value, "f"))
    return value


@dataclass(frozen=True)
class Dataset:
    """An ``m x n`` feature matrix ``rows`` and a length ``m`` vector ``outputs``."""

    rows: tuple[tuple[Decimal, ...], ...]
    outputs: tuple[Decimal, ...]

    def __post_init__(self):
        rows = tuple(tuple(_as_decimal(v) for v in r) for r in self.rows)
        outputs = tuple(_as_decimal(v) for v in self.outputs)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "outputs", outputs)
        if not rows:
            raise EmptyDatasetError("dataset has no training examples")
        n = len(rows[0])
        if n < 1:
            raise DatasetError("dataset has no features")
        for i, r in enumerate(rows):
            if len(r) != n:
                raise RaggedRowError(i + 1, len(r) + 1, n + 1)
        if len(outputs) != len(rows):
            raise DatasetError(
                f"{len(rows)} rows but {len(outputs)} outputs")

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.rows[0])

    def head(self, count: int) -> "Dataset":
        """The sub-dataset made of the first ``count`` rows."""
        return Dataset(self.rows[:count], self.outputs[:count])

    def features_array(self) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self.rows])

    def outputs_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.outputs])


@dataclass(frozen=True)
class LabelSet:
    labels: tuple[Decimal, ...]

    @property
    def l(self) -> int:  # noqa: E743
        return len(self.labels)

    def index(self, value: Decimal) -> int:
        return self.labels.index(value)


def _as_decimal(v) -> Decimal:
    if isinstance(v, Decimal):
        if not v.is_finite():
            raise DatasetError(f"non-finite value {v}")
        return v
    if isinstance(v, (int, str)):
        return parse_decimal(str(v))
    if isinstance(v, float):
        if not np.isfinite(v):
            raise DatasetError(f"non-finite value {v}")
        return Decimal(repr(v))
    raise TypeError(f"unsupported value type {type(v).__name__}")


def _read_text(source: Source) -> str:
    if isinstance(source, bytes):
        data = source
    elif isinstance(source, (str, os.PathLike)):
        data = Path(source).read_bytes()
    else:
        data = source.read()
        if isinstance(data, str):
            return data
    return data.decode("utf-8-sig")


def load_csv(source: Source, *, skip_header: bool = False) -> Dataset:
    """Load a headerless CSV whose last column is the expected output.

    ``source`` is a path, raw bytes, or a binary stream. Blank lines are
    ignored; row numbers in errors are 1-based physical line numbers.
    """
    reader = csv.reader(io.StringIO(_read_text(source)))
    rows: list[tuple[Decimal, ...]] = []
    outputs: list[Decimal] = []
    width = None
    for record in reader:
        line = reader.line_num
        if skip_header and line == 1:
            continue
        if not record or all(not f.strip() for f in record):
            continue
        if width is None:
            width = len(record)
            if width < 2:
                raise RaggedRowError(line, width, 2)
        elif len(record) != width:
            raise RaggedRowError(line, len(record), width)
        values = []
        for col, field in enumerate(record, start=1):
            try:
                values.append(parse_decimal(field))
            except ValueError:
                raise CsvParseError(line, col, field) from None
        rows.append(tuple(values[:-1]))
        outputs.append(values[-1])
    if not rows:
        raise EmptyDatasetError("CSV contains no records")
    return Dataset(tuple(rows), tuple(outputs))


def dump_csv(ds: Dataset) -> str:
    """Serialize back to CSV text; values are printed exactly as stored."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    for row, o in zip(ds.rows, ds.outputs):
        writer.writerow([str(v) for v in row] + [str(o)])
    return out.getvalue()


def distinct_labels(ds: Dataset) -> LabelSet:
    """Distinct outputs in first-occurrence order."""
    seen: list[Decimal] = []
    for o in ds.outputs:
        if o not in seen:
            seen.append(o)
    return LabelSet(tuple(seen))


def load_example() -> Dataset:
    """The ten-row, two-feature dataset with labels 1, 0 and -1 shipped with the package."""
    return load_csv(Path(__file__).with_name("data") / "example.csv")


def synthetic_dataset(m: int = 118, n: int = 2, *, seed: int = 0,
                      labels: Sequence[int] = (1, 0, -1),
                      low: float = -1.0, high: float = 1.0,
                      decimals: int = 6) -> Dataset:
    """Random dataset with features uniform in ``[low, high]``.

    Used as a stand-in for benchmark data that is not publicly available.
    Values are rounded to ``decimals`` places so they are exact decimals.
    """
    rng = random.Random(seed)
    q = Decimal(1).scaleb(-decimals)
    lo, hi = Decimal(str(low)), Decimal(str(high))
    rows = []
    for _ in range(m):
        rows.append(tuple(
            min(hi, max(lo, Decimal(rng.uniform(low, high)).quantize(q)))
            for _ in range(n)))
    outputs = [Decimal(rng.choice(labels)) for _ in range(m)]
    return Dataset(tuple(rows), tuple(outputs))


def from_values(rows: Iterable[Iterable], outputs: Iterable) -> Dataset:
    """Convenience constructor from plain Python numbers or strings."""
    return Dataset(tuple(tuple(r) for r in rows), tuple(outputs))
