from __future__ import annotations

import pytest

from geodd.catalogs import YEAR7_TEXT, load_catalog
from geodd.core import PointTable, make_fact
from geodd.engine import Problem, compile_rule

THEOREM1_P = """\
include('year7.ax').
fof(theorem1,conjecture,(![A,B,C,D] :
                         parallelogram(A,B,C,D) => cong(A,B,C,D) & cong(A,D,B,C) )).
"""

THEOREM2_P = """\
include('year7.ax').
fof(theorem2,conjecture,(![A,B,C,D] : rectangle(A,B,C,D) => cong(A,C,B,D) )).
"""

FALSE_P = """\
include('year7.ax').
fof(bad,conjecture,(![A,B,C,D] : parallelogram(A,B,C,D) => cong(A,B,A,C) )).
"""

# Theorem 1 runs on the rule subset the derivation actually needs.
THEOREM1_RULE_NAMES = [
    "ruleR1a", "ruleR1b", "ruleD40", "ruleD58", "rulerD61", "ruleR4a", "ruleR4b", "ruleR4c",
]


@pytest.fixture(scope="session")
def year7_units():
    return load_catalog("year7")


@pytest.fixture(scope="session")
def year7_rules(year7_units):
    return [compile_rule(u, source="builtin") for u in year7_units]


@pytest.fixture(scope="session")
def units_by_name(year7_units):
    return {u.name: u for u in year7_units}


@pytest.fixture()
def theorem1_rules(units_by_name):
    return [compile_rule(units_by_name[n], source="builtin") for n in THEOREM1_RULE_NAMES]


def make_theorem1_problem() -> Problem:
    points = PointTable()
    a, b, c, d = (points.intern(x) for x in "ABCD")
    return Problem(
        points=points,
        hypotheses=[make_fact("parallelogram", (a, b, c, d))],
        goals=[make_fact("cong", (a, b, c, d)), make_fact("cong", (a, d, b, c))],
        rule_units=[],
        name="theorem1",
    )


def make_theorem2_problem() -> Problem:
    points = PointTable()
    a, b, c, d = (points.intern(x) for x in "ABCD")
    return Problem(
        points=points,
        hypotheses=[make_fact("rectangle", (a, b, c, d))],
        goals=[make_fact("cong", (a, c, b, d))],
        rule_units=[],
        name="theorem2",
    )


@pytest.fixture()
def theorem1_problem():
    return make_theorem1_problem()


@pytest.fixture()
def theorem2_problem():
    return make_theorem2_problem()


@pytest.fixture()
def problem_dir(tmp_path):
    """Problem files next to a real year7.ax so includes resolve."""
    (tmp_path / "year7.ax").write_text(YEAR7_TEXT)
    (tmp_path / "theorem1.p").write_text(THEOREM1_P)
    (tmp_path / "theorem2.p").write_text(THEOREM2_P)
    (tmp_path / "false.p").write_text(FALSE_P)
    return tmp_path
