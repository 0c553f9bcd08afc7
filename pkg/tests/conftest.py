import json
from pathlib import Path

import pytest
import sympy as sp

from tpk.coeff import Polynomial

DATA = Path(__file__).resolve().parents[1] / "src" / "tpk" / "data"


def symbols(n):
    return sp.symbols(f"x1:{n + 1}")


def poly_to_sympy(p: Polynomial):
    xs = symbols(p.dim)
    return sum((sp.Rational(int(c.numerator), int(c.denominator)) * sp.Mul(*[x ** e for x, e in zip(xs, exp)])
                for exp, c in p.terms.items()), sp.Integer(0))


def to_sympy(f):
    if isinstance(f, Polynomial):
        return poly_to_sympy(f)
    return poly_to_sympy(f.num) / poly_to_sympy(f.den)


def sympy_equal(a, b) -> bool:
    return sp.simplify(sp.together(a - b)) == 0


def load(name):
    return json.loads((DATA / name).read_text())


@pytest.fixture
def data():
    return load


ACCEPTANCE = {}


@pytest.fixture
def report_ac():
    """Record and print one pass/fail line for an acceptance criterion."""

    def record(label, ok, detail=""):
        line = f"{label} {'PASS' if ok else 'FAIL'}: {detail}"
        ACCEPTANCE[label] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for label in sorted(ACCEPTANCE, key=lambda s: int(s[2:])):
            terminalreporter.write_line(ACCEPTANCE[label])
