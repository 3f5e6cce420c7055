"""Verify a dataset against a specification, property by property.

Each property is checked as its own conjunction with the dataset
encoding, in a separate solver process. The encoding is built once per run.
"""

from __future__ import annotations

import csv
import dataclasses
import enum
import io
import itertools
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .dataset import Dataset, distinct_labels
from .encoder import SmtScript, encode_dataset, environment_script
from .properties import Property, PropertyError, Schema, Specification
from .solver import Outcome, SolverConfig, Verdict, check_sat

__all__ = [
    "RunStatus",
    "Entry",
    "Report",
    "ConsistencyMatrix",
    "verify",
    "check_consistency",
    "incremental_verify",
    "prefix_sizes",
    "series_csv",
]


class RunStatus(enum.Enum):
    HOLDS = "holds"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"
    ERROR = "error"

    @property
    def exit_code(self) -> int:
        return {"holds": 0, "violated": 1, "inconclusive": 2, "error": 3}[self.value]


def classify(outcomes: Iterable[Outcome]) -> RunStatus:
    """Overall status: any VIOLATED wins, then ERROR, then UNKNOWN."""
    seen = set(outcomes)
    if Outcome.VIOLATED in seen:
        return RunStatus.VIOLATED
    if Outcome.ERROR in seen:
        return RunStatus.ERROR
    if Outcome.UNKNOWN in seen:
        return RunStatus.INCONCLUSIVE
    return RunStatus.HOLDS


@dataclass(frozen=True)
class Entry:
    name: str
    verdict: Verdict

    @property
    def outcome(self) -> Outcome:
        return self.verdict.outcome

    @property
    def seconds(self) -> float:
        return self.verdict.seconds


@dataclass(frozen=True)
class Report:
    dataset: str
    entries: tuple[Entry, ...]

    @property
    def status(self) -> RunStatus:
        return classify(e.outcome for e in self.entries)

    @property
    def holds(self) -> bool:
        return self.status is RunStatus.HOLDS

    def __getitem__(self, name: str) -> Entry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def outcomes(self) -> tuple[Outcome, ...]:
        return tuple(e.outcome for e in self.entries)

    def to_text(self) -> str:
        width = max(len(e.name) for e in self.entries)
        lines = [f"dataset: {self.dataset}"]
        for e in self.entries:
            line = f"  {e.name:<{width}}  {e.outcome.value:<9} {e.seconds:8.3f}s"
            if e.verdict.reason:
                line += f"  ({e.verdict.reason.splitlines()[0]})"
            lines.append(line)
            if e.verdict.model:
                lines.extend("    " + ln for ln in e.verdict.model.splitlines())
        lines.append(f"overall: {self.status.value}")
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["property", "verdict", "seconds"])
        for e in self.entries:
            w.writerow([e.name, e.outcome.value, f"{e.seconds:.6f}"])
        return out.getvalue()

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "status": self.status.value,
            "properties": [
                {"name": e.name, "verdict": e.outcome.value,
                 "seconds": e.seconds, "reason": e.verdict.reason or None,
                 "model": e.verdict.model}
                for e in self.entries
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _compose(base: SmtScript, props: Sequence[Property], schema: Schema) -> SmtScript:
    # identical commands (shared parameter declarations, helper definitions)
    # are emitted once
    seen = set(base.assertions)
    cmds = []
    for p in props:
        for c in p.commands(schema):
            if c not in seen:
                seen.add(c)
                cmds.append(c)
    return base.extend(cmds)


def _check(base: SmtScript, props: Sequence[Property], schema: Schema,
           cfg: SolverConfig) -> Verdict:
    try:
        script = _compose(base, props, schema)
    except PropertyError as exc:
        return Verdict(Outcome.ERROR, 0.0, str(exc))
    caps = [p.timeout for p in props if p.timeout is not None]
    if caps and min(caps) < cfg.timeout:
        cfg = dataclasses.replace(cfg, timeout=min(caps))
    return check_sat(script, cfg)


def _run(jobs, parallelism: int) -> list:
    if parallelism <= 1 or len(jobs) <= 1:
        return [job() for job in jobs]
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(lambda job: job(), jobs))


def verify(ds: Dataset, spec: Specification | Sequence[Property],
           cfg: SolverConfig | None = None, *, name: str = "dataset",
           parallelism: int = 1) -> Report:
    """Check every property of ``spec`` against ``ds``.

    Entries come back in specification order whatever ``parallelism`` is.
    Failures of one property never stop the others.
    """
    spec = spec if isinstance(spec, Specification) else Specification(spec)
    cfg = cfg or SolverConfig()
    base = encode_dataset(ds, distinct_labels(ds))
    schema = Schema.of(ds)
    jobs = [lambda p=p: _check(base, [p], schema, cfg) for p in spec]
    verdicts = _run(jobs, parallelism)
    return Report(name, tuple(Entry(p.name, v) for p, v in zip(spec, verdicts)))


@dataclass(frozen=True)
class ConsistencyMatrix:
    """Pairwise satisfiability of properties without any dataset.

    ``verdicts`` maps index pairs ``(i, j)`` with ``i <= j``; the diagonal
    is each property's own satisfiability.
    """

    names: tuple[str, ...]
    verdicts: dict = field(default_factory=dict)
    full: Verdict | None = None

    def verdict(self, x: int | str, y: int | str) -> Verdict:
        i = self.names.index(x) if isinstance(x, str) else x
        j = self.names.index(y) if isinstance(y, str) else y
        return self.verdicts[(min(i, j), max(i, j))]

    def violated_pairs(self) -> list[tuple[str, str]]:
        return [(self.names[i], self.names[j])
                for (i, j), v in sorted(self.verdicts.items())
                if v.outcome is Outcome.VIOLATED]

    def inconclusive_pairs(self) -> list[tuple[str, str]]:
        return [(self.names[i], self.names[j])
                for (i, j), v in sorted(self.verdicts.items())
                if not v.outcome.definitive]

    @property
    def admissible(self) -> bool:
        if self.full is not None and self.full.outcome is Outcome.VIOLATED:
            return False
        return not self.violated_pairs()

    def to_text(self) -> str:
        k = len(self.names)
        width = max(len(s) for s in self.names)
        lines = []
        for i in range(k):
            cells = []
            for j in range(k):
                cells.append(f"{self.verdict(i, j).outcome.value:<9}")
            lines.append(f"{self.names[i]:<{width}}  " + " ".join(cells))
        if self.full is not None:
            lines.append(f"full conjunction: {self.full.outcome.value}")
        for a, b in self.violated_pairs():
            lines.append(f"contradiction: {a} & {b}")
        for a, b in self.inconclusive_pairs():
            lines.append(f"inconclusive: {a} & {b}")
        lines.append("admissible" if self.admissible else "inadmissible")
        return "\n".join(lines) + "\n"


def check_consistency(spec: Specification | Sequence[Property],
                      schema: Schema = Schema(), cfg: SolverConfig | None = None,
                      *, full: bool = False, parallelism: int = 1) -> ConsistencyMatrix:
    """Check every pair of properties for joint satisfiability.

    The dataset symbols are declared but left unconstrained. With
    ``full=True`` the conjunction of all properties is checked as well.
    """
    spec = spec if isinstance(spec, Specification) else Specification(spec)
    cfg = cfg or SolverConfig()
    base = environment_script()
    pairs = list(itertools.combinations_with_replacement(range(len(spec)), 2))
    jobs = [lambda i=i, j=j: _check(base, [spec[i], spec[j]] if i != j else [spec[i]], schema, cfg)
            for i, j in pairs]
    if full:
        jobs.append(lambda: _check(base, list(spec), schema, cfg))
    results = _run(jobs, parallelism)
    return ConsistencyMatrix(
        spec.names,
        dict(zip(pairs, results)),
        results[-1] if full else None,
    )


def prefix_sizes(m: int, step: int) -> list[int]:
    """``step, 2*step, ...`` up to ``m``, always ending with ``m``."""
    if step < 1:
        raise ValueError("step must be at least 1")
    sizes = list(range(step, m + 1, step))
    if not sizes or sizes[-1] != m:
        sizes.append(m)
    return sizes


def incremental_verify(ds: Dataset, spec: Specification | Sequence[Property],
                       cfg: SolverConfig | None = None, step: int = 10, *,
                       name: str = "dataset", parallelism: int = 1
                       ) -> list[tuple[int, Report]]:
    """Verify growing prefixes of ``ds`` (first ``step``, ``2*step``, ... rows)."""
    spec = spec if isinstance(spec, Specification) else Specification(spec)
    return [(k, verify(ds.head(k), spec, cfg, name=f"{name}[:{k}]",
                       parallelism=parallelism))
            for k in prefix_sizes(ds.m, step)]


def series_csv(series: Sequence[tuple[int, Report]]) -> str:
    """CSV with columns ``m, property, verdict, seconds``."""
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["m", "property", "verdict", "seconds"])
    for k, report in series:
        for e in report.entries:
            w.writerow([k, e.name, e.outcome.value, f"{e.seconds:.6f}"])
    return out.getvalue()
