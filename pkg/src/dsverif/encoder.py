"""Translate a dataset into an SMT-LIB 2 script.

The dataset becomes a conjunction over the symbols

    m, n, l : Int
    D       : (Array Int (Array Int Real))   D[i][j] = feature j of row i
    O       : (Array Int Real)               O[i]    = output of row i
    L       : (Array Int Real)               L[k]    = k-th distinct label

Indexing is 0-based. Cells outside the dataset's extent are unconstrained,
so properties must bound their own quantifiers.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Union

from .dataset import Dataset, LabelSet, distinct_labels

__all__ = [
    "SmtScript",
    "ENVIRONMENT",
    "LOGIC",
    "serialize_real",
    "serialize_int",
    "encode_dataset",
    "environment_script",
    "render",
]

LOGIC = "ALL"

# name -> sort, in declaration order
ENVIRONMENT: dict[str, str] = {
    "m": "Int",
    "n": "Int",
    "l": "Int",
    "D": "(Array Int (Array Int Real))",
    "O": "(Array Int Real)",
    "L": "(Array Int Real)",
}

Real = Union[Decimal, int, Fraction]


def serialize_real(v: Real) -> str:
    """Exact SMT-LIB Real literal for ``v``.

    >>> serialize_real(Decimal("0"))
    '0.0'
    >>> serialize_real(Decimal("-0.092742"))
    '(- 0.092742)'
    """
    if isinstance(v, Fraction):
        if v.denominator == 1:
            return serialize_real(v.numerator)
        num = serialize_real(abs(v.numerator))
        text = f"(/ {num} {serialize_real(v.denominator)})"
        return f"(- {text})" if v < 0 else text
    if isinstance(v, int):
        v = Decimal(v)
    if not v.is_finite():
        raise ValueError(f"cannot serialize non-finite value {v}")
    text = format(v.copy_abs(), "f")
    if "." not in text:
        text += ".0"
    return f"(- {text})" if v < 0 else text


def serialize_int(v: int) -> str:
    return f"(- {-v})" if v < 0 else str(v)


@dataclass(frozen=True)
class SmtScript:
    """An ordered SMT-LIB 2 script.

    ``declarations`` and ``assertions`` hold complete commands, one per
    entry. Property text (which may contain ``define-fun-rec``) is appended
    to ``assertions``.
    """

    declarations: tuple[str, ...] = ()
    assertions: tuple[str, ...] = ()
    epilogue: tuple[str, ...] = ("(check-sat)",)
    logic: str = LOGIC
    options: tuple[tuple[str, str], ...] = ()
    symbols: tuple[str, ...] = field(default=())

    def extend(self, commands: Iterable[str],
               declarations: Iterable[str] = (),
               symbols: Iterable[str] = ()) -> "SmtScript":
        return dataclasses.replace(
            self,
            declarations=self.declarations + tuple(declarations),
            assertions=self.assertions + tuple(commands),
            symbols=self.symbols + tuple(symbols),
        )

    def with_models(self) -> "SmtScript":
        opts = dict(self.options)
        opts[":produce-models"] = "true"
        return dataclasses.replace(
            self,
            options=tuple(opts.items()),
            epilogue=("(check-sat)", "(get-model)"),
        )


def _declare(name: str, sort: str) -> str:
    return f"(declare-const {name} {sort})"


def environment_script() -> SmtScript:
    """Declarations of ``m, n, l, D, O, L`` with no dataset values."""
    return SmtScript(
        declarations=tuple(_declare(k, s) for k, s in ENVIRONMENT.items()),
        symbols=tuple(ENVIRONMENT),
    )


def encode_dataset(ds: Dataset, ls: LabelSet | None = None) -> SmtScript:
    """Encode ``ds`` following the dataset-encoding algorithm.

    Assertion order: ``m``, ``n``, then for each row its feature cells,
    its output, and (on a label's first occurrence) the label entry;
    finally ``l``.
    """
    if ls is None:
        ls = distinct_labels(ds)
    cmds = [f"(assert (= m {ds.m}))", f"(assert (= n {ds.n}))"]
    seen: list[Decimal] = []
    for i, (row, out) in enumerate(zip(ds.rows, ds.outputs)):
        for j, v in enumerate(row):
            cmds.append(f"(assert (= (select (select D {i}) {j}) {serialize_real(v)}))")
        cmds.append(f"(assert (= (select O {i}) {serialize_real(out)}))")
        if out not in seen:
            cmds.append(f"(assert (= (select L {len(seen)}) {serialize_real(out)}))")
            seen.append(out)
    if tuple(seen) != ls.labels:
        raise ValueError("label set is inconsistent with the dataset outputs")
    cmds.append(f"(assert (= l {len(seen)}))")
    return environment_script().extend(cmds)


def render(script: SmtScript) -> str:
    """Render ``script`` as text, one command per line."""
    lines = [f"(set-logic {script.logic})"] if script.logic else []
    lines = [f"(set-option {k} {v})" for k, v in script.options] + lines
    lines.extend(script.declarations)
    lines.extend(script.assertions)
    lines.extend(script.epilogue)
    return "\n".join(lines) + "\n"
