"""Run an external SMT-LIB 2 solver as a child process, one query per process."""

from __future__ import annotations

import enum
import os
import re
import shutil
import subprocess
import time
from dataclasses import dataclass, field

from .encoder import SmtScript, render

__all__ = [
    "Outcome",
    "Verdict",
    "SolverConfig",
    "SolverError",
    "check_sat",
    "check_text",
    "get_model",
    "probe",
    "SOLVER_ENV",
    "DEFAULT_TIMEOUT",
    "GRACE_PERIOD",
]

SOLVER_ENV = "DSVERIF_SOLVER"
DEFAULT_TIMEOUT = 30.0
# seconds allowed for the child to die after being killed
GRACE_PERIOD = 2.0

_STATUS = re.compile(r"^\s*(sat|unsat|unknown)\s*$")


class SolverError(RuntimeError):
    pass


class Outcome(enum.Enum):
    HOLDS = "holds"          # sat
    VIOLATED = "violated"    # unsat
    UNKNOWN = "unknown"      # solver unknown or timeout
    ERROR = "error"          # process or parse failure

    @property
    def definitive(self) -> bool:
        return self in (Outcome.HOLDS, Outcome.VIOLATED)


@dataclass(frozen=True)
class Verdict:
    outcome: Outcome
    seconds: float
    reason: str = ""
    model: str | None = None

    @property
    def timed_out(self) -> bool:
        return self.outcome is Outcome.UNKNOWN and self.reason == "timeout"


def _default_executable() -> str:
    return os.environ.get(SOLVER_ENV) or "z3"


def _default_args(executable: str) -> tuple[str, ...]:
    base = os.path.basename(executable)
    if base.startswith("z3"):
        return ("-in",)
    if base.startswith("cvc5") or base.startswith("cvc4"):
        return ("--lang=smt2", "-")
    return ()


@dataclass(frozen=True)
class SolverConfig:
    """How to run the solver.

    ``args`` defaults to the flags that make known solvers read SMT-LIB
    from stdin (``-in`` for z3).
    """

    executable: str = field(default_factory=_default_executable)
    args: tuple[str, ...] | None = None
    timeout: float = DEFAULT_TIMEOUT
    produce_models: bool = False

    def __post_init__(self):
        if not self.timeout > 0:
            raise ValueError("timeout must be positive")
        if self.args is None:
            object.__setattr__(self, "args", _default_args(self.executable))
        else:
            object.__setattr__(self, "args", tuple(self.args))

    def command(self) -> list[str]:
        exe = shutil.which(self.executable)
        if exe is None:
            raise SolverError(f"solver executable not found: {self.executable}")
        return [exe, *self.args]


def _parse_output(stdout: str, stderr: str, returncode: int) -> tuple[Outcome, str, str | None]:
    lines = stdout.splitlines()
    for idx, line in enumerate(lines):
        if not line.strip() or line.strip() in ("success", "unsupported"):
            continue
        if line.lstrip().startswith("(error"):
            return Outcome.ERROR, line.strip(), None
        mt = _STATUS.match(line)
        if mt is None:
            return Outcome.ERROR, f"malformed status token: {line.strip()[:200]}", None
        rest = "\n".join(lines[idx + 1:]).strip()
        status = mt.group(1)
        if status == "sat":
            return Outcome.HOLDS, "", rest or None
        if status == "unsat":
            return Outcome.VIOLATED, "", None
        return Outcome.UNKNOWN, "solver", None
    msg = stderr.strip() or f"solver exited with code {returncode} and no status"
    return Outcome.ERROR, msg, None


def check_text(text: str, cfg: SolverConfig) -> Verdict:
    """Feed already-rendered SMT-LIB ``text`` to the solver."""
    try:
        cmd = cfg.command()
    except SolverError as exc:
        return Verdict(Outcome.ERROR, 0.0, str(exc))
    start = time.perf_counter()
    try:
        proc = subprocess.Popen(cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                                stderr=subprocess.PIPE, text=True)
    except OSError as exc:
        return Verdict(Outcome.ERROR, 0.0, str(exc))
    try:
        stdout, stderr = proc.communicate(text, timeout=cfg.timeout)
    except subprocess.TimeoutExpired:
        proc.kill()
        try:
            proc.communicate(timeout=GRACE_PERIOD)
        except subprocess.TimeoutExpired:
            pass
        return Verdict(Outcome.UNKNOWN, time.perf_counter() - start, "timeout")
    elapsed = time.perf_counter() - start
    outcome, reason, rest = _parse_output(stdout, stderr, proc.returncode)
    if outcome is Outcome.HOLDS and cfg.produce_models and rest:
        return Verdict(outcome, elapsed, reason, rest)
    if outcome is Outcome.ERROR and proc.returncode and stderr.strip() and stderr.strip() not in reason:
        reason = f"{reason}\n{stderr.strip()}".strip()
    return Verdict(outcome, elapsed, reason)


def check_sat(script: SmtScript, cfg: SolverConfig) -> Verdict:
    """Decide satisfiability of ``script``.

    sat -> HOLDS, unsat -> VIOLATED, unknown or deadline -> UNKNOWN.
    With ``cfg.produce_models`` the model text is attached to HOLDS verdicts.
    """
    if cfg.produce_models:
        script = script.with_models()
    return check_text(render(script), cfg)


def get_model(script: SmtScript, cfg: SolverConfig) -> str:
    """Return the solver's model block for a satisfiable ``script``.

    Raises :class:`SolverError` when the script is not satisfiable or the
    solver produced no model.
    """
    if not cfg.produce_models:
        cfg = SolverConfig(cfg.executable, cfg.args, cfg.timeout, True)
    verdict = check_sat(script, cfg)
    if verdict.outcome is not Outcome.HOLDS:
        raise SolverError(f"no model: check returned {verdict.outcome.value}"
                          + (f" ({verdict.reason})" if verdict.reason else ""))
    if verdict.model is None:
        raise SolverError("solver did not return a model")
    return verdict.model


def probe(cfg: SolverConfig) -> None:
    """Check that the configured solver answers ``sat`` to a trivial script."""
    verdict = check_text("(check-sat)\n", cfg)
    if verdict.outcome is not Outcome.HOLDS:
        raise SolverError(
            f"solver {cfg.executable!r} failed the conformance probe: "
            f"{verdict.outcome.value} {verdict.reason}".strip())
