from fractions import Fraction

import pytest

from isodrum.gassmann import gassmann_pair
from isodrum.pipeline import drum_pair
from isodrum.unfolding import BaseTriangle, GluingDiagram, unfold

# criterion -> list of (clause ok, detail); one summary line per criterion
ACCEPTANCE = {}

SCALENE = BaseTriangle(((0, 0), (1, 0), (Fraction(1, 4), Fraction(2, 3))))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda n: int(n.split()[0])):
        clauses = ACCEPTANCE[name]
        ok = all(c for c, _ in clauses)
        detail = "; ".join(f"{d} [{'ok' if c else 'FAIL'}]" for c, d in clauses)
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")


@pytest.fixture
def record():
    def _record(name, ok, detail=""):
        ACCEPTANCE.setdefault(name, []).append((bool(ok), detail))
        return ok

    return _record


@pytest.fixture(scope="session")
def fano():
    return gassmann_pair()


@pytest.fixture(scope="session")
def drums():
    return drum_pair()


@pytest.fixture(scope="session")
def right_base():
    return BaseTriangle.right_isosceles()


@pytest.fixture(scope="session")
def unit_square(right_base):
    return unfold(GluingDiagram(((1, 0), (None, None), (None, None))), right_base)


@pytest.fixture(scope="session")
def unit_triangle(right_base):
    return unfold(GluingDiagram(((None,), (None,), (None,))), right_base)
