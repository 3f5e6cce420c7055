import random
import shutil
from decimal import Decimal

import pytest

from dsverif.dataset import from_values, load_example
from dsverif.solver import SolverConfig

HAVE_SOLVER = shutil.which("z3") is not None

requires_solver = pytest.mark.skipif(not HAVE_SOLVER, reason="z3 executable not on PATH")

# Normalization property in its reference form. Note the bounds: i runs
# below n and j below m, transposed relative to D's row/column layout.
NORMALIZED_TEXT = """\
(assert
 (not
  (exists ((i Int) (j Int))
   (and
    (>= i 0)
    (< i n)
    (>= j 0)
    (< j m)
    (or
     (< (select (select D i) j) min )
     (> (select (select D i) j) max )
    )
   )
  )
 )
)
"""

# The same text with the row index bounded by m and the column index by n.
NORMALIZED_ROWS_COLS = NORMALIZED_TEXT.replace("(< i n)", "(< i m)").replace("(< j m)", "(< j n)")

GRID = [Decimal(k) / 4 for k in range(-6, 7)]  # -1.5 .. 1.5 step 0.25


def random_dataset(rng: random.Random, m_max: int = 30, n_max: int = 4,
                   grid=GRID, labels=(0, 1, 2)):
    """Small grid-valued dataset; duplicates rows now and then so that
    contradiction checks see both outcomes."""
    m = rng.randint(1, m_max)
    n = rng.randint(1, n_max)
    narrow = rng.random() < 0.5
    pool = grid[2:-2] if narrow else grid
    rows = [[rng.choice(pool) for _ in range(n)] for _ in range(m)]
    k = rng.choice(labels[1:]) + 1
    outputs = [rng.choice(labels[:k]) for _ in range(m)]
    if m > 1 and rng.random() < 0.4:
        a, b = rng.sample(range(m), 2)
        rows[b] = list(rows[a])
    return from_values(rows, outputs)


@pytest.fixture(scope="session")
def example_ds():
    return load_example()


@pytest.fixture(scope="session")
def cfg():
    return SolverConfig(timeout=30)


@pytest.fixture(scope="session")
def short_cfg():
    """For checks that are expected to run into the deadline."""
    return SolverConfig(timeout=2)


# -- acceptance criterion summary -----------------------------------------

_CRITERIA: dict = {}


@pytest.fixture
def criterion(request):
    """Record pass/fail of an acceptance criterion for the summary lines."""
    def record(number: int, title: str):
        _CRITERIA.setdefault(number, {"title": title, "passed": True})
        request.node._criterion = number
    yield record
    number = getattr(request.node, "_criterion", None)
    if number is not None:
        rep = getattr(request.node, "rep_call", None)
        if rep is None or not rep.passed:
            _CRITERIA[number]["passed"] = False


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        c = _CRITERIA[number]
        status = "PASS" if c["passed"] else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {c['title']}")
