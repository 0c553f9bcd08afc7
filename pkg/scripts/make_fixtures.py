"""Regenerate the JSON fixtures shipped in src/tpk/data.

The twisted-symplectic bivector is inverted with sympy, independently of the
package's own adjugate code, and stored as a golden file.
"""

import json
from pathlib import Path

import sympy as sp

DATA = Path(__file__).resolve().parents[1] / "src" / "tpk" / "data"


def poly_json(expr, xs):
    p = sp.Poly(sp.expand(expr), *xs)
    terms = [{"exp": list(m), "coef": str(sp.Rational(c))} for m, c in sorted(p.terms())]
    return {"dim": len(xs), "terms": terms}


def ratfun_json(expr, xs):
    num, den = sp.fraction(sp.together(expr))
    return {"num": poly_json(num, xs), "den": poly_json(den, xs)}


def graded(kind, degree, entries, xs):
    terms = [{"indices": list(idx), "coef": ratfun_json(c, xs)}
             for idx, c in sorted(entries.items()) if sp.simplify(c) != 0]
    return {"dim": len(xs), "degree": degree, "kind": kind, "terms": terms}


def write(name, data):
    (DATA / name).write_text(json.dumps(data, indent=1, sort_keys=True) + "\n")


def main():
    x1, x2, x3 = xs3 = sp.symbols("x1:4")
    so3 = {(2, 3): x1, (1, 3): -x2, (1, 2): x3}
    vol3 = {(1, 2, 3): sp.Integer(3)}
    write("lie_poisson_so3.json", {
        "pi": graded("multivector", 2, so3, xs3),
        "phi": graded("form", 3, vol3, xs3),
        "lambda": "1",
    })
    write("so3_B_lambda1.json", graded("form", 2, {(2, 3): x1, (1, 3): -x2, (1, 2): x3}, xs3))
    write("so3_minus_B_lambda1.json", graded("form", 2, {(2, 3): -x1, (1, 3): x2, (1, 2): -x3}, xs3))
    write("so3_minus_B_lambda_neg1.json", graded("form", 2, {(2, 3): x1, (1, 3): -x2, (1, 2): x3}, xs3))
    write("zero_B_r3.json", graded("form", 2, {}, xs3))
    write("b_nonclosed_r3.json", graded("form", 2, {(1, 2): x3 ** 2}, xs3))

    y = sp.symbols("x1:5")
    W = sp.zeros(4, 4)
    W[0, 1], W[2, 3], W[0, 3] = 1, 1, y[2]
    W = W - W.T
    P = -W.inv()
    pi = {(i + 1, j + 1): sp.simplify(P[i, j]) for i in range(4) for j in range(i + 1, 4)}
    omega = {(1, 2): sp.Integer(1), (3, 4): sp.Integer(1), (1, 4): y[2]}
    phi = {(1, 3, 4): sp.Integer(-1)}  # d(x3 dx1^dx4) = dx3^dx1^dx4
    write("twisted_symplectic_r4.json", {
        "pi": graded("multivector", 2, pi, y),
        "omega": graded("form", 2, omega, y),
        "phi": graded("form", 3, phi, y),
    })
    broken = dict(pi)
    broken[(2, 3)] = 2 * y[2]
    write("twisted_symplectic_r4_broken.json", {
        "pi": graded("multivector", 2, broken, y),
        "phi": graded("form", 3, phi, y),
    })
    write("phi_nonclosed_r4.json", graded("form", 3, {(2, 3, 4): y[0]}, y))
    write("phi_closed_r3.json", graded("form", 3, vol3, xs3))


if __name__ == "__main__":
    main()
