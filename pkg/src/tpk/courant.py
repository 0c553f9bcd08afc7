"""The twisted Courant algebroid E_phi = TM + T*M.

Bracket (non-skew, Leibniz form)::

    [(X1, xi1), (X2, xi2)]_phi = ([X1, X2], L_X1 xi2 - i_X2 d xi1 + phi(X1, X2, .))

with ``phi(X1, X2, .) = i_X2 i_X1 phi``. Gauge transformations
``tau_B(X, xi) = (X, xi + B(X, .))`` carry E_phi to E_{phi - dB}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional

from .coeff import DimensionMismatch, RationalFunction, as_rational, to_ratfun
from .exterior import (
    DifferentialForm,
    MultivectorField,
    de_rham_d,
    differential,
    evaluate_on,
    graded_from_json,
    interior_product,
    lie_derivative,
    schouten_bracket,
)
from .randgen import random_form, random_multivector, rng_from


class NotClosedError(ValueError):
    """The 3-form used to twist the bracket is not closed."""


class CourantSection:
    """A section (X, xi) of TM + T*M."""

    __slots__ = ("X", "xi")

    def __init__(self, X: MultivectorField, xi: DifferentialForm):
        if not isinstance(X, MultivectorField) or X.degree != 1:
            raise TypeError("X must be a vector field")
        if not isinstance(xi, DifferentialForm) or xi.degree != 1:
            raise TypeError("xi must be a 1-form")
        if X.dim != xi.dim:
            raise DimensionMismatch(f"dimension mismatch: {X.dim} vs {xi.dim}")
        self.X = X
        self.xi = xi

    @property
    def dim(self) -> int:
        return self.X.dim

    @classmethod
    def zero(cls, dim: int) -> "CourantSection":
        return cls(MultivectorField.zero(dim, 1), DifferentialForm.zero(dim, 1))

    @classmethod
    def from_vector(cls, X: MultivectorField) -> "CourantSection":
        return cls(X, DifferentialForm.zero(X.dim, 1))

    @classmethod
    def from_form(cls, xi: DifferentialForm) -> "CourantSection":
        return cls(MultivectorField.zero(xi.dim, 1), xi)

    def __add__(self, other: "CourantSection") -> "CourantSection":
        return CourantSection(self.X + other.X, self.xi + other.xi)

    def __sub__(self, other: "CourantSection") -> "CourantSection":
        return CourantSection(self.X - other.X, self.xi - other.xi)

    def __neg__(self):
        return CourantSection(-self.X, -self.xi)

    def scale(self, f) -> "CourantSection":
        return CourantSection(self.X.scale(f), self.xi.scale(f))

    def is_zero(self) -> bool:
        return self.X.is_zero() and self.xi.is_zero()

    def __eq__(self, other):
        if not isinstance(other, CourantSection):
            return NotImplemented
        return self.X == other.X and self.xi == other.xi

    __hash__ = None

    def to_json(self) -> dict:
        return {"X": self.X.to_json(), "xi": self.xi.to_json()}

    @classmethod
    def from_json(cls, data) -> "CourantSection":
        return cls(graded_from_json(data["X"]), graded_from_json(data["xi"]))

    def __repr__(self):
        return f"CourantSection(X={self.X!r}, xi={self.xi!r})"


def pairing(e1: CourantSection, e2: CourantSection) -> RationalFunction:
    """((X1, xi1), (X2, xi2)) = xi1(X2) + xi2(X1)."""
    if e1.dim != e2.dim:
        raise DimensionMismatch(f"dimension mismatch: {e1.dim} vs {e2.dim}")
    return evaluate_on(e1.xi, e2.X) + evaluate_on(e2.xi, e1.X)


def anchor(e: CourantSection) -> MultivectorField:
    return e.X


class TwistedCourantAlgebroid:
    """TM + T*M with the bracket twisted by a 3-form ``phi``.

    ``check_closed=False`` admits a non-closed phi; the result is then not a
    Courant algebroid, which is exactly what the negative axiom checks need.
    """

    def __init__(self, dim: int, phi: DifferentialForm | None = None, check_closed: bool = True):
        if phi is None:
            phi = DifferentialForm.zero(dim, 3)
        if not isinstance(phi, DifferentialForm) or (phi.degree != 3 and not phi.is_zero()):
            raise TypeError("phi must be a 3-form")
        if phi.dim != dim:
            raise DimensionMismatch(f"phi has dim {phi.dim}, algebroid has dim {dim}")
        if phi.degree != 3:
            phi = DifferentialForm.zero(dim, 3)
        if check_closed and not de_rham_d(phi).is_zero():
            raise NotClosedError("the twisting 3-form must be closed (d phi != 0)")
        self.dim = dim
        self.phi = phi

    def _check(self, *sections: CourantSection):
        for e in sections:
            if e.dim != self.dim:
                raise DimensionMismatch(f"section has dim {e.dim}, algebroid has dim {self.dim}")

    def bracket(self, e1: CourantSection, e2: CourantSection) -> CourantSection:
        self._check(e1, e2)
        X = schouten_bracket(e1.X, e2.X)
        xi = lie_derivative(e1.X, e2.xi) - interior_product(e2.X, de_rham_d(e1.xi))
        if not self.phi.is_zero():
            xi = xi + interior_product(e2.X, interior_product(e1.X, self.phi))
        return CourantSection(X, xi)

    def D(self, f) -> CourantSection:
        """D f = (0, df/2), characterised by (D f, e) = rho(e) f / 2."""
        f = to_ratfun(f, self.dim)
        return CourantSection.from_form(differential(f, self.dim).scale(as_rational(1) / 2))

    pairing = staticmethod(pairing)
    anchor = staticmethod(anchor)

    def __repr__(self):
        return f"TwistedCourantAlgebroid(dim={self.dim}, phi={self.phi!r})"


def bracket(E: TwistedCourantAlgebroid, e1: CourantSection, e2: CourantSection) -> CourantSection:
    return E.bracket(e1, e2)


def D_operator(E: TwistedCourantAlgebroid, f) -> CourantSection:
    return E.D(f)


def _is_zero(obj) -> bool:
    return obj.is_zero()


@dataclass
class AxiomReport:
    """Outcome of the five Courant axioms on concrete sections.

    ``residuals[k]`` is the difference of the two sides of axiom ``k``; the
    axiom passes exactly when it is the zero object.
    """

    residuals: Dict[int, object] = field(default_factory=dict)

    @property
    def passed(self) -> Dict[int, bool]:
        return {k: _is_zero(v) for k, v in sorted(self.residuals.items())}

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    def failing(self):
        return [k for k, ok in self.passed.items() if not ok]

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "axioms": [
                {"axiom": k, "pass": _is_zero(v), "residual": None if _is_zero(v) else v.to_json()}
                for k, v in sorted(self.residuals.items())
            ],
        }


def verify_axioms(E: TwistedCourantAlgebroid, e1: CourantSection, e2: CourantSection,
                  e3: CourantSection, f) -> AxiomReport:
    E._check(e1, e2, e3)
    f = to_ratfun(f, E.dim)
    br = E.bracket
    res: Dict[int, object] = {}
    # 1: [e1,[e2,e3]] = [[e1,e2],e3] + [e2,[e1,e3]]
    res[1] = br(e1, br(e2, e3)) - (br(br(e1, e2), e3) + br(e2, br(e1, e3)))
    # 2: rho[e1,e2] = [rho e1, rho e2]
    res[2] = br(e1, e2).X - schouten_bracket(e1.X, e2.X)
    # 3: [e1, f e2] = f [e1,e2] + (rho(e1) f) e2
    res[3] = br(e1, e2.scale(f)) - (br(e1, e2).scale(f) + e2.scale(evaluate_on(differential(f, E.dim), e1.X)))
    # 4: rho(e)(h1,h2) = ([e,h1],h2) + (h1,[e,h2])
    lhs4 = evaluate_on(differential(pairing(e2, e3), E.dim), e1.X)
    res[4] = MultivectorField.function(lhs4 - (pairing(br(e1, e2), e3) + pairing(e2, br(e1, e3))), E.dim)
    # 5: [e,e] = D(e,e), checked on each section
    r5 = CourantSection.zero(E.dim)
    for e in (e1, e2, e3):
        r = br(e, e) - E.D(pairing(e, e))
        if not r.is_zero():
            r5 = r
            break
    res[5] = r5
    return AxiomReport(res)


def tau_B(e: CourantSection, B: DifferentialForm) -> CourantSection:
    """tau_B(X, xi) = (X, xi + B(X, .))."""
    if B.dim != e.dim:
        raise DimensionMismatch(f"dimension mismatch: {B.dim} vs {e.dim}")
    if B.is_zero():
        return e
    return CourantSection(e.X, e.xi + interior_product(e.X, B))


def verify_gauge_morphism(phi: DifferentialForm, B: DifferentialForm, e1: CourantSection,
                          e2: CourantSection, target_phi: Optional[DifferentialForm] = None) -> CourantSection:
    """tau_B([e1,e2]_phi) - [tau_B e1, tau_B e2]_target, target defaulting to phi - dB."""
    source = TwistedCourantAlgebroid(phi.dim, phi)
    if target_phi is None:
        target_phi = phi - de_rham_d(B) if B.degree == 2 else phi
    target = TwistedCourantAlgebroid(phi.dim, target_phi, check_closed=False)
    return tau_B(source.bracket(e1, e2), B) - target.bracket(tau_B(e1, B), tau_B(e2, B))


def random_section(rng, dim: int, max_degree: int = 2, density: float = 0.4) -> CourantSection:
    rng = rng_from(rng)
    return CourantSection(
        random_multivector(rng, dim, 1, max_degree, density),
        random_form(rng, dim, 1, max_degree, density),
    )


def section_from_json_or_graded(data) -> CourantSection:
    if "X" in data:
        return CourantSection.from_json(data)
    obj = graded_from_json(data)
    if isinstance(obj, MultivectorField):
        return CourantSection.from_vector(obj)
    return CourantSection.from_form(obj)


__all__ = [
    "AxiomReport",
    "CourantSection",
    "NotClosedError",
    "TwistedCourantAlgebroid",
    "D_operator",
    "anchor",
    "bracket",
    "pairing",
    "random_section",
    "tau_B",
    "verify_axioms",
    "verify_gauge_morphism",
]
