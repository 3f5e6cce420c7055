"""Command-line interface: ``dsverif {verify,encode,check-spec,bench}``.

Exit codes for ``verify``: 0 all properties hold, 1 some property is
violated, 2 inconclusive (unknown verdicts, none violated), 3 error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from .dataset import DatasetError, load_csv, synthetic_dataset
from .encoder import encode_dataset, render
from .properties import (BUILTINS, Property, PropertyError, Schema, Specification,
                         load_property_file, parse_param_value, read_params_file)
from .solver import DEFAULT_TIMEOUT, SOLVER_ENV, SolverConfig, SolverError, probe
from .verifier import check_consistency, incremental_verify, series_csv, verify

log = logging.getLogger("dsverif")

EXIT_ERROR = 3
_ALIASES = {"lo": "min", "hi": "max", "δ": "delta", "β": "beta"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_solver_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("solver")
    g.add_argument("--solver", help=f"solver executable (default: ${SOLVER_ENV} or z3)")
    g.add_argument("--solver-arg", action="append", dest="solver_args", metavar="ARG",
                   help="argument passed to the solver (repeatable; replaces the defaults)")
    g.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT,
                   help="seconds per property check (default: %(default)s)")
    g.add_argument("--parallelism", type=int, default=1,
                   help="concurrent solver processes (default: %(default)s)")
    g.add_argument("--property-timeout", action="append", default=[], metavar="NAME=SECONDS",
                   dest="property_timeouts",
                   help="cap the solver time of one property below --timeout (repeatable)")


def _add_property_options(p: argparse.ArgumentParser, *, dir_required: bool = False) -> None:
    g = p.add_argument_group("properties")
    g.add_argument("--properties", "-p", type=Path, metavar="DIR", required=dir_required,
                   help="directory of SMT-LIB property files (*.smt2)")
    g.add_argument("--builtin", "-b", action="append", default=[], metavar="NAME",
                   choices=sorted(BUILTINS), help="built-in property to include (repeatable)")
    g.add_argument("--param", "-P", action="append", default=[], metavar="KEY=VALUE",
                   help="parameter value (repeatable)")
    g.add_argument("--params-file", type=Path, metavar="FILE",
                   help="file of key=value parameter lines")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dsverif", description="Formally verify datasets with an SMT solver.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="check a dataset against properties")
    p.add_argument("dataset", type=Path)
    p.add_argument("--skip-header", action="store_true")
    _add_property_options(p)
    _add_solver_options(p)
    p.add_argument("--format", "-f", choices=["text", "csv", "json", "structured"], default="text")
    p.add_argument("--models", action="store_true", help="print models of holding properties")
    p.add_argument("--output", "-o", type=Path)

    p = sub.add_parser("encode", help="write the SMT-LIB encoding of a dataset")
    p.add_argument("dataset", type=Path)
    p.add_argument("--skip-header", action="store_true")
    p.add_argument("--output", "-o", type=Path)

    p = sub.add_parser("check-spec", help="check that properties do not contradict each other")
    _add_property_options(p)
    _add_solver_options(p)
    p.add_argument("--n", type=int, help="feature count, for properties that need it")
    p.add_argument("--m", type=int, help="row count, for properties that need it")
    p.add_argument("--full", action="store_true", help="also check the conjunction of all properties")

    p = sub.add_parser("bench", help="verify growing prefixes and emit a timing CSV")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("dataset", type=Path, nargs="?")
    src.add_argument("--synthetic", type=int, metavar="M",
                     help="use a synthetic M-row dataset instead of a file")
    p.add_argument("--features", type=int, default=2, help="features of the synthetic dataset")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--skip-header", action="store_true")
    p.add_argument("--step", type=int, default=10)
    _add_property_options(p)
    _add_solver_options(p)
    p.add_argument("--output", "-o", type=Path)
    return parser


def collect_params(args) -> dict:
    params = {}
    if args.params_file:
        params.update(read_params_file(args.params_file))
    for item in args.param:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"--param expects KEY=VALUE, got {item!r}")
        params[key.strip()] = parse_param_value(value)
    return {_ALIASES.get(k, k): v for k, v in params.items()}


def make_builtin(name: str, params: dict) -> Property:
    factory, keys = BUILTINS[name]
    missing = [k for k in keys if k not in params]
    if missing:
        raise UsageError(f"built-in {name} needs parameter(s): {', '.join(missing)}")
    values = [params[k] for k in keys]
    if name == "min_cardinality" and not isinstance(values[0], int):
        raise UsageError("parameter T must be an integer")
    kwargs = {}
    if name == "coverage_expanded":
        for extra in ("grid_step", "expansion_limit"):
            if extra in params:
                kwargs[extra] = params[extra]
    return factory(*values, **kwargs)


def build_specification(args) -> Specification:
    params = collect_params(args)
    props: list[Property] = []
    if args.properties is not None:
        if not args.properties.is_dir():
            raise UsageError(f"properties directory not found: {args.properties}")
        for path in sorted(args.properties.glob("*.smt2")):
            props.append(load_property_file(path, params))
            log.info("loaded property file %s", path)
    for name in args.builtin:
        props.append(make_builtin(name, params))
    if not props:
        raise UsageError("no properties given (use --properties and/or --builtin)")
    return Specification(_apply_timeouts(props, args.property_timeouts))


def _apply_timeouts(props: list[Property], items: Sequence[str]) -> list[Property]:
    # NAME matches a full property name or its base (the part before "[")
    for item in items:
        key, sep, value = item.rpartition("=")
        try:
            seconds = float(value)
        except ValueError:
            seconds = 0.0
        if not sep or not key or not seconds > 0:
            raise UsageError(f"--property-timeout expects NAME=SECONDS, got {item!r}")
        hits = [i for i, p in enumerate(props) if key in (p.name, p.name.split("[")[0])]
        if not hits:
            raise UsageError(f"--property-timeout: no property named {key!r}")
        for i in hits:
            props[i] = props[i].with_timeout(seconds)
    return props


def solver_config(args, produce_models: bool = False) -> SolverConfig:
    kwargs = {}
    if args.solver:
        kwargs["executable"] = args.solver
    cfg = SolverConfig(args=tuple(args.solver_args) if args.solver_args else None,
                       timeout=args.timeout, produce_models=produce_models, **kwargs)
    probe(cfg)
    return cfg


def _emit(text: str, output: Path | None) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text)


def _cmd_verify(args) -> int:
    ds = load_csv(args.dataset, skip_header=args.skip_header)
    spec = build_specification(args)
    cfg = solver_config(args, produce_models=args.models)
    report = verify(ds, spec, cfg, name=str(args.dataset), parallelism=args.parallelism)
    fmt = {"text": report.to_text, "csv": report.to_csv,
           "json": report.to_json, "structured": report.to_json}[args.format]
    _emit(fmt(), args.output)
    return report.status.exit_code


def _cmd_encode(args) -> int:
    ds = load_csv(args.dataset, skip_header=args.skip_header)
    _emit(render(encode_dataset(ds)), args.output)
    return 0


def _cmd_check_spec(args) -> int:
    spec = build_specification(args)
    cfg = solver_config(args)
    matrix = check_consistency(spec, Schema(n=args.n, m=args.m), cfg,
                               full=args.full, parallelism=args.parallelism)
    sys.stdout.write(matrix.to_text())
    if not matrix.admissible:
        return 1
    return 2 if matrix.inconclusive_pairs() else 0


def _cmd_bench(args) -> int:
    if args.synthetic is not None:
        ds = synthetic_dataset(args.synthetic, args.features, seed=args.seed)
        name = f"synthetic-{args.synthetic}"
    else:
        ds = load_csv(args.dataset, skip_header=args.skip_header)
        name = str(args.dataset)
    spec = build_specification(args)
    cfg = solver_config(args)
    series = incremental_verify(ds, spec, cfg, args.step, name=name,
                                parallelism=args.parallelism)
    _emit(series_csv(series), args.output)
    return 0


_COMMANDS = {"verify": _cmd_verify, "encode": _cmd_encode,
             "check-spec": _cmd_check_spec, "bench": _cmd_bench}


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_ERROR
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except (UsageError, DatasetError, PropertyError, SolverError, OSError) as exc:
        print(f"dsverif: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
