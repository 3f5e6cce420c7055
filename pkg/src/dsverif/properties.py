"""Dataset properties: built-in parameterized properties and SMT-LIB files.

A property is a formula over the dataset symbols ``m, n, l, D, O, L``.
The dataset *holds* a property when the dataset encoding conjoined with
the property is satisfiable. Every built-in carries a native oracle that
decides the same question directly on the in-memory data, except the
array form of the coverage property.
"""

from __future__ import annotations

import dataclasses
import difflib
import itertools
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence, Union

import numpy as np

from .dataset import Dataset, distinct_labels, parse_decimal
from .encoder import ENVIRONMENT, serialize_int, serialize_real
from .sexpr import Atom, SExprSyntaxError, SList, is_symbol, parse

__all__ = [
    "Schema",
    "Property",
    "Specification",
    "PropertyError",
    "PropertyFileError",
    "UnknownSymbolError",
    "ExpansionLimitError",
    "builtin_min_cardinality",
    "builtin_minmax_normalized",
    "builtin_coverage_array",
    "builtin_coverage_expanded",
    "builtin_balanced",
    "builtin_no_contradictions",
    "load_property_file",
    "parse_property_text",
    "parse_param_value",
    "read_params_file",
    "coverage_grid_search",
    "BUILTINS",
    "DEFAULT_EXPANSION_LIMIT",
]

DEFAULT_EXPANSION_LIMIT = 8

ParamValue = Union[int, Decimal, Fraction]

_BUILTIN_SYMBOLS = frozenset("""
    true false not => and or xor = distinct ite
    + - * / div mod abs < <= > >= to_real to_int is_int ^
    select store const as _ !
    Int Real Bool Array
""".split())


class PropertyError(ValueError):
    pass


class PropertyFileError(PropertyError):
    """Malformed property file: syntax error or disallowed command."""

    def __init__(self, message: str, line: int | None = None,
                 column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class UnknownSymbolError(PropertyError):
    def __init__(self, symbol: str, line: int, column: int,
                 candidates: Sequence[str]):
        self.symbol = symbol
        self.line = line
        self.column = column
        self.candidates = tuple(candidates)
        super().__init__(
            f"unknown symbol {symbol!r} at line {line}, column {column}; "
            f"candidates: {', '.join(self.candidates) or '(none)'}")


class ExpansionLimitError(PropertyError):
    pass


@dataclass(frozen=True)
class Schema:
    """Dataset shape available when a property is compiled.

    Either field may be unknown, as in a consistency check with no data.
    """

    n: int | None = None
    m: int | None = None

    @classmethod
    def of(cls, ds: Dataset) -> "Schema":
        return cls(n=ds.n, m=ds.m)


Fragment = Union[str, tuple[str, ...], Callable[[Schema], Sequence[str]]]


@dataclass(frozen=True)
class Property:
    """A named property.

    ``smt_fragment`` is SMT-LIB command text (one string or a tuple of
    commands) or a function producing the commands for a given
    :class:`Schema`. ``oracle`` returns True when the dataset holds the
    property. ``timeout``, when set, caps the solver time for this property
    below the run-wide timeout.
    """

    name: str
    smt_fragment: Fragment
    params: Mapping[str, ParamValue] = field(default_factory=dict)
    oracle: Callable[[Dataset], bool] | None = None
    timeout: float | None = None

    def __post_init__(self):
        if self.timeout is not None and not self.timeout > 0:
            raise PropertyError("property timeout must be positive")

    def with_timeout(self, seconds: float | None) -> "Property":
        return dataclasses.replace(self, timeout=seconds)

    def commands(self, schema: Schema = Schema()) -> tuple[str, ...]:
        frag = self.smt_fragment
        if callable(frag):
            return tuple(frag(schema))
        if isinstance(frag, tuple):
            return frag
        return (frag,)

    def holds_natively(self, ds: Dataset) -> bool:
        if self.oracle is None:
            raise PropertyError(f"property {self.name!r} has no native oracle")
        return bool(self.oracle(ds))


class Specification(tuple):
    """Non-empty ordered collection of properties with unique names."""

    def __new__(cls, properties: Iterable[Property]):
        props = tuple(properties)
        if not props:
            raise PropertyError("a specification needs at least one property")
        names = Counter(p.name for p in props)
        dup = sorted(k for k, c in names.items() if c > 1)
        if dup:
            raise PropertyError(f"duplicate property names: {', '.join(dup)}")
        return super().__new__(cls, props)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self)


# -- value helpers -------------------------------------------------------

def _real(v) -> ParamValue:
    if isinstance(v, bool):
        raise TypeError("boolean is not a real value")
    if isinstance(v, (int, Decimal, Fraction)):
        return v
    if isinstance(v, float):
        return Decimal(repr(v))
    if isinstance(v, str):
        return parse_param_value(v)
    raise TypeError(f"unsupported parameter type {type(v).__name__}")


def _fraction(v: ParamValue) -> Fraction:
    return Fraction(v)


def _literal(v: ParamValue) -> str:
    """Exact Real literal, preferring decimal notation."""
    f = Fraction(v)
    den = f.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return serialize_real(f)
    k = max(twos, fives)
    scaled = abs(f.numerator) * (10 ** k // f.denominator)
    digits = str(scaled).rjust(k + 1, "0")
    text = digits[:len(digits) - k] + "." + (digits[len(digits) - k:] if k else "0")
    return f"(- {text})" if f < 0 else text


def parse_param_value(text: str) -> ParamValue:
    """``"100"`` -> int, ``"-0.5"``/``"1e-3"`` -> Decimal, ``"3/2"`` -> Fraction."""
    text = text.strip()
    if re.fullmatch(r"[+-]?\d+", text):
        return int(text)
    if re.fullmatch(r"[+-]?\d+/\d+", text):
        return Fraction(text)
    try:
        return parse_decimal(text)
    except ValueError:
        raise PropertyError(f"invalid parameter value {text!r}") from None


def read_params_file(path) -> dict[str, ParamValue]:
    """Read ``key=value`` lines; ``#`` starts a comment."""
    params: dict[str, ParamValue] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", key):
            raise PropertyError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        params[key] = parse_param_value(value)
    return params


def _in_range(var: str, bound: str) -> str:
    return f"(>= {var} 0) (< {var} {bound})"


# -- built-ins -----------------------------------------------------------

def builtin_min_cardinality(T: int) -> Property:
    """At least ``T`` training examples."""
    if isinstance(T, bool) or not isinstance(T, int) or T < 0:
        raise PropertyError("T must be a non-negative integer")
    return Property(
        name=f"min_cardinality[T={T}]",
        smt_fragment=f"(assert (>= m {serialize_int(T)}))",
        params={"T": T},
        oracle=lambda ds: ds.m >= T,
    )


def builtin_minmax_normalized(lo, hi) -> Property:
    """Every feature value lies in ``[lo, hi]``."""
    lo, hi = _real(lo), _real(hi)
    if not _fraction(lo) < _fraction(hi):
        raise PropertyError("lo must be smaller than hi")
    cell = "(select (select D i) j)"
    text = (
        "(assert (not (exists ((i Int) (j Int)) (and "
        f"{_in_range('i', 'm')} {_in_range('j', 'n')} "
        f"(or (< {cell} {_literal(lo)}) (> {cell} {_literal(hi)}))))))"
    )
    flo, fhi = _fraction(lo), _fraction(hi)

    def oracle(ds: Dataset) -> bool:
        return all(flo <= Fraction(v) <= fhi for row in ds.rows for v in row)

    return Property(f"minmax_normalized[{lo},{hi}]", text,
                    {"min": lo, "max": hi}, oracle)


def _check_coverage_params(delta, lo, hi):
    delta, lo, hi = _real(delta), _real(lo), _real(hi)
    if not _fraction(delta) > 0:
        raise PropertyError("delta must be positive")
    if not _fraction(lo) < _fraction(hi):
        raise PropertyError("lo must be smaller than hi")
    return delta, lo, hi


def builtin_coverage_array(delta, lo, hi) -> Property:
    """No point of ``[lo, hi]^n`` is farther than ``delta`` from every row.

    The witness point is an existentially quantified ``(Array Int Real)``
    and distances are compared squared. Solvers rarely decide this form;
    there is no oracle attached.
    """
    delta, lo, hi = _check_coverage_params(delta, lo, hi)
    d2 = _literal(_fraction(delta) ** 2)

    def fragment(schema: Schema) -> list[str]:
        if schema.n is None:
            raise PropertyError("coverage property needs the feature count n")
        terms = " ".join(
            f"(* (- (select p {j}) (select (select D i) {j})) "
            f"(- (select p {j}) (select (select D i) {j})))"
            for j in range(schema.n))
        sq = f"(+ {terms})" if schema.n > 1 else terms
        return [
            "(assert (not (exists ((p (Array Int Real))) (and "
            f"(forall ((k Int)) (=> (and {_in_range('k', 'n')}) "
            f"(and (<= {_literal(lo)} (select p k)) (<= (select p k) {_literal(hi)})))) "
            f"(forall ((i Int)) (=> (and {_in_range('i', 'm')}) (> {sq} {d2})))))))"
        ]

    return Property(f"coverage_array[delta={delta},{lo},{hi}]", fragment,
                    {"delta": delta, "min": lo, "max": hi})


def coverage_grid_search(ds: Dataset, lo, hi, step=Decimal("0.01"),
                         chunk: int = 1 << 16) -> tuple[float, np.ndarray]:
    """Brute-force the largest squared distance from a grid point of
    ``[lo, hi]^n`` to its nearest row.

    Returns ``(max_min_sq_distance, argmax_point)``.
    """
    flo, fhi, fstep = Fraction(lo), Fraction(hi), Fraction(step)
    count = int((fhi - flo) / fstep) + 1
    axis = np.array([float(flo + k * fstep) for k in range(count)])
    if axis[-1] < float(fhi):
        axis = np.append(axis, float(fhi))
    X = ds.features_array()
    n = X.shape[1]
    total = len(axis) ** n
    best, best_pt = -1.0, None
    for start in range(0, total, chunk):
        idx = np.unravel_index(np.arange(start, min(total, start + chunk)),
                               (len(axis),) * n)
        pts = np.stack([axis[k] for k in idx], axis=1)
        d = ((pts[:, None, :] - X[None, :, :]) ** 2).sum(axis=2).min(axis=1)
        k = int(d.argmax())
        if d[k] > best:
            best, best_pt = float(d[k]), pts[k]
    return best, best_pt


def builtin_coverage_expanded(delta, lo, hi, n: int | None = None, *,
                              expansion_limit: int = DEFAULT_EXPANSION_LIMIT,
                              grid_step=Decimal("0.01")) -> Property:
    """Coverage with the witness point as ``n`` scalar reals.

    Both the coordinates and the per-row distance constraints are expanded
    when compiled against a dataset shape, so ``Schema.m`` must be known.
    The oracle is a grid search at ``grid_step``.
    """
    delta, lo, hi = _check_coverage_params(delta, lo, hi)
    if n is not None and n > expansion_limit:
        raise ExpansionLimitError(
            f"n={n} exceeds the expansion limit of {expansion_limit}")
    d2 = _fraction(delta) ** 2
    d2_lit = _literal(d2)

    def fragment(schema: Schema) -> list[str]:
        width = schema.n if schema.n is not None else n
        if width is None or schema.m is None:
            raise PropertyError("expanded coverage needs the dataset shape (m and n)")
        if n is not None and width != n:
            raise PropertyError(f"property compiled for n={n}, dataset has n={width}")
        if width > expansion_limit:
            raise ExpansionLimitError(
                f"n={width} exceeds the expansion limit of {expansion_limit}")
        ps = [f"p{j}" for j in range(width)]
        binders = " ".join(f"({p} Real)" for p in ps)
        box = " ".join(f"(<= {_literal(lo)} {p}) (<= {p} {_literal(hi)})" for p in ps)
        far = []
        for i in range(schema.m):
            terms = [f"(* (- {p} (select (select D {i}) {j})) (- {p} (select (select D {i}) {j})))"
                     for j, p in enumerate(ps)]
            sq = f"(+ {' '.join(terms)})" if width > 1 else terms[0]
            far.append(f"(> {sq} {d2_lit})")
        return [f"(assert (not (exists ({binders}) (and {box} {' '.join(far)}))))"]

    def oracle(ds: Dataset) -> bool:
        best, _ = coverage_grid_search(ds, lo, hi, grid_step)
        return not best > float(d2)

    params = {"delta": delta, "min": lo, "max": hi}
    if n is not None:
        params["n"] = n
    return Property(f"coverage_expanded[delta={delta},{lo},{hi}]", fragment,
                    params, oracle)


_LABEL_COUNT = (
    "(define-fun-rec label_count ((A (Array Int Real)) (v Real) (s Int)) Int "
    "(ite (<= s 0) 0 (+ (label_count A v (- s 1)) (ite (= (select A (- s 1)) v) 1 0))))"
)


def builtin_balanced(beta) -> Property:
    """No label occurs fewer than ``m / (beta * l)`` times.

    Emitted as ``p*l*count < q*m`` for ``beta = p/q`` so that no division
    appears; ``label_count(A, v, s)`` counts ``v`` in ``A[0..s)``.
    """
    if isinstance(beta, float):
        beta = Decimal(repr(beta))
    b = Fraction(_real(beta)) if not isinstance(beta, Fraction) else beta
    if b < 1:
        raise PropertyError("beta must be at least 1")
    p, q = b.numerator, b.denominator
    lhs = f"(* {p} l (label_count O (select L i) m))" if p != 1 else "(* l (label_count O (select L i) m))"
    rhs = "m" if q == 1 else f"(* {q} m)"
    text = (f"(assert (not (exists ((i Int)) (and {_in_range('i', 'l')} "
            f"(< {lhs} {rhs})))))")

    def oracle(ds: Dataset) -> bool:
        counts = Counter(ds.outputs)
        l = distinct_labels(ds).l  # noqa: E741
        return not any(p * l * c < q * ds.m for c in counts.values())

    return Property(f"balanced[beta={beta}]", (_LABEL_COUNT, text),
                    {"beta": b}, oracle)


def builtin_no_contradictions() -> Property:
    """No two distinct rows with identical features have different outputs."""

    def fragment(schema: Schema) -> list[str]:
        if schema.n is None:
            raise PropertyError("no_contradictions needs the feature count n")
        same = " ".join(f"(= (select (select D i) {j}) (select (select D k) {j}))"
                        for j in range(schema.n))
        return [
            "(assert (not (exists ((i Int) (k Int)) (and "
            f"{_in_range('i', 'm')} {_in_range('k', 'm')} (not (= i k)) "
            f"{same} (not (= (select O i) (select O k)))))))"
        ]

    def oracle(ds: Dataset) -> bool:
        seen: dict[tuple, set] = defaultdict(set)
        for row, o in zip(ds.rows, ds.outputs):
            seen[row].add(o)
        return all(len(v) == 1 for v in seen.values())

    return Property("no_contradictions", fragment, {}, oracle)


# -- property files ------------------------------------------------------

_ALLOWED_COMMANDS = {"assert", "define-fun", "define-fun-rec", "define-funs-rec"}


def _symbol_name(atom: Atom) -> str:
    return atom.text[1:-1] if atom.kind == "quoted" else atom.text


class _SymbolChecker:
    def __init__(self, known: Iterable[str]):
        self.known = set(known)

    def fail(self, atom: Atom, scope: set[str]):
        name = _symbol_name(atom)
        pool = sorted((self.known | scope) - _BUILTIN_SYMBOLS)
        cands = difflib.get_close_matches(name, pool, n=5, cutoff=0.5)
        raise UnknownSymbolError(name, atom.line, atom.column, cands or pool)

    def term(self, node, scope: set[str]):
        if isinstance(node, Atom):
            if node.kind == "string" or not is_symbol(node):
                return
            name = _symbol_name(node)
            if name not in scope and name not in self.known and name not in _BUILTIN_SYMBOLS:
                self.fail(node, scope)
            return
        head = node.head()
        items = node.items
        if head in ("forall", "exists") and len(items) == 3 and isinstance(items[1], SList):
            bound = {_symbol_name(b.items[0]) for b in items[1].items
                     if isinstance(b, SList) and b.items and isinstance(b.items[0], Atom)}
            self.term(items[2], scope | bound)
        elif head == "let" and len(items) == 3 and isinstance(items[1], SList):
            bound = set()
            for b in items[1].items:
                if isinstance(b, SList) and len(b.items) == 2:
                    self.term(b.items[1], scope)
                    bound.add(_symbol_name(b.items[0]))
            self.term(items[2], scope | bound)
        elif head == "!":
            self.term(items[1], scope)
        elif head in ("as", "_"):
            return
        else:
            for child in items:
                self.term(child, scope)


def _params_of(sig: SList) -> set[str]:
    return {_symbol_name(b.items[0]) for b in sig.items
            if isinstance(b, SList) and b.items and isinstance(b.items[0], Atom)}


def _check_commands(nodes, text: str, params: Mapping[str, ParamValue]) -> tuple[list[str], set[str]]:
    """Validate the file's commands; returns their verbatim text and the
    parameter names referenced."""
    checker = _SymbolChecker(set(ENVIRONMENT) | set(params))
    commands = []
    for node in nodes:
        if not isinstance(node, SList) or node.head() is None:
            line, col = (node.line, node.column)
            raise PropertyFileError("expected an SMT-LIB command", line, col)
        head = node.head()
        if head not in _ALLOWED_COMMANDS:
            raise PropertyFileError(
                f"command {head!r} is not allowed in a property file "
                "(only assert and define-fun*)", node.line, node.column)
        items = node.items
        if head == "assert":
            if len(items) != 2:
                raise PropertyFileError("assert takes one term", node.line, node.column)
            checker.term(items[1], set())
        elif head in ("define-fun", "define-fun-rec"):
            if len(items) != 5 or not is_symbol(items[1]) or not isinstance(items[2], SList):
                raise PropertyFileError(f"malformed {head}", node.line, node.column)
            name = _symbol_name(items[1])
            scope = _params_of(items[2])
            if head == "define-fun-rec":
                checker.known.add(name)
            checker.term(items[4], scope)
            checker.known.add(name)
        else:  # define-funs-rec
            if len(items) != 3 or not all(isinstance(x, SList) for x in items[1:]):
                raise PropertyFileError("malformed define-funs-rec", node.line, node.column)
            decls = items[1].items
            for d in decls:
                checker.known.add(_symbol_name(d.items[0]))
            for d, body in zip(decls, items[2].items):
                checker.term(body, _params_of(d.items[1]))
        commands.append(text[node.start:node.end])
    used = {p for p in params if _mentions(nodes, p)}
    return commands, used


def _mentions(nodes, name: str) -> bool:
    for node in nodes:
        if isinstance(node, Atom):
            if is_symbol(node) and _symbol_name(node) == name:
                return True
        elif _mentions(node.items, name):
            return True
    return False


def _param_commands(name: str, value: ParamValue) -> list[str]:
    if isinstance(value, int):
        return [f"(declare-const {name} Int)", f"(assert (= {name} {serialize_int(value)}))"]
    return [f"(declare-const {name} Real)", f"(assert (= {name} {_literal(value)}))"]


def parse_property_text(text: str, params: Mapping[str, ParamValue] | None = None,
                        name: str = "property") -> Property:
    """Build a :class:`Property` from SMT-LIB command text."""
    params = {k: _real(v) for k, v in (params or {}).items()}
    try:
        nodes = parse(text)
    except SExprSyntaxError as exc:
        raise PropertyFileError(str(exc).rsplit(" at line", 1)[0], exc.line, exc.column) from None
    if not nodes:
        raise PropertyFileError("property file contains no commands")
    commands, used = _check_commands(nodes, text, params)
    preamble = list(itertools.chain.from_iterable(
        _param_commands(k, params[k]) for k in sorted(used)))
    return Property(name, tuple(preamble + commands),
                    {k: params[k] for k in sorted(used)})


def load_property_file(path, params: Mapping[str, ParamValue] | None = None) -> Property:
    """Load one property from an SMT-LIB file; the name is the file stem.

    Parameter symbols the file references are declared and fixed to the
    supplied values ahead of the property text.
    """
    path = Path(path)
    return parse_property_text(path.read_text(encoding="utf-8"), params, name=path.stem)


# name -> (factory, parameter keys)
BUILTINS: dict[str, tuple[Callable[..., Property], tuple[str, ...]]] = {
    "min_cardinality": (builtin_min_cardinality, ("T",)),
    "minmax_normalized": (builtin_minmax_normalized, ("min", "max")),
    "coverage_array": (builtin_coverage_array, ("delta", "min", "max")),
    "coverage_expanded": (builtin_coverage_expanded, ("delta", "min", "max")),
    "balanced": (builtin_balanced, ("beta",)),
    "no_contradictions": (builtin_no_contradictions, ()),
}
