"""Dirac structures given as graphs, twisted Poisson identities and gauge transformations.

Sign conventions (all fixed, all consistent with one another):

* ``pi~ alpha = pi(alpha, .)`` and ``B~ X = B(X, .)``;
* ``{f, g} = pi(df, dg)`` and ``H_f = {., f} = -pi~ df``;
* the bivector graph is ``L_pi = {(pi~ alpha, alpha)}``, the 2-form graph is
  ``L_omega = {(X, -omega~ X)}``; with these choices L_pi is a Dirac structure of
  E_phi exactly when ``[pi, pi] = CALIBRATION * (wedge^3 pi~)(phi)`` and L_omega
  exactly when ``d omega = phi``.

``CALIBRATION`` is -2. Contracting the defect ``[pi,pi] - CALIBRATION * (wedge^3 pi~)(phi)``
with ``(df, dg, dh)`` gives ``JACOBIATOR_FACTOR`` (also -2) times the twisted
jacobiator ``{{f,g},h} + c.p. + phi(H_f, H_g, H_h)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Union

import numpy as np

from .coeff import DimensionMismatch, PoleError, RationalFunction, as_rational, coordinates, to_ratfun
from .courant import CourantSection, NotClosedError, TwistedCourantAlgebroid
from .exterior import (
    DifferentialForm,
    LinearMapField,
    MultivectorField,
    adjugate,
    bivector_from_matrix,
    bivector_matrix,
    coordinate_form,
    coordinate_vector,
    de_rham_d,
    derivation_from_pairs,
    determinant,
    differential,
    evaluate_on,
    flat,
    graded_from_json,
    interior_product,
    lie_derivative,
    matmul,
    raise_all,
    raise_two_of_three,
    schouten_bracket,
    sharp,
    two_form_matrix,
)
from .randgen import random_form, random_multivector, rng_from

CALIBRATION = -2
JACOBIATOR_FACTOR = -2

Function = Union[RationalFunction, int]


class CheckResult(NamedTuple):
    ok: bool
    defect: object


def _require_closed(phi: DifferentialForm):
    if not de_rham_d(phi).is_zero():
        raise NotClosedError("phi must be closed (d phi != 0)")


def _same_dim(*objs):
    dims = {o.dim for o in objs}
    if len(dims) > 1:
        raise DimensionMismatch(f"dimension mismatch: {sorted(dims)}")


def _zero_phi(dim: int) -> DifferentialForm:
    return DifferentialForm.zero(dim, 3)


# -- graphs -------------------------------------------------------------------

@dataclass
class BivectorGraph:
    """L_pi = {(pi~ alpha, alpha)} inside E_phi."""

    pi: MultivectorField
    phi: DifferentialForm = None

    def __post_init__(self):
        if self.pi.degree != 2:
            raise TypeError("pi must be a bivector")
        if self.phi is None:
            self.phi = _zero_phi(self.pi.dim)
        _same_dim(self.pi, self.phi)
        _require_closed(self.phi)

    @property
    def dim(self) -> int:
        return self.pi.dim

    def section(self, alpha: DifferentialForm) -> CourantSection:
        return CourantSection(sharp(self.pi)(alpha), alpha)

    def membership_residual(self, e: CourantSection) -> MultivectorField:
        return e.X - sharp(self.pi)(e.xi)

    def probes(self):
        return [coordinate_form(self.dim, i) for i in range(1, self.dim + 1)]

    def random_probe(self, rng):
        return random_form(rng, self.dim, 1, 2)

    def to_json(self) -> dict:
        return {"pi": self.pi.to_json(), "phi": self.phi.to_json()}

    @classmethod
    def from_json(cls, data) -> "BivectorGraph":
        pi = graded_from_json(data["pi"])
        phi = graded_from_json(data["phi"]) if data.get("phi") else None
        return cls(pi, phi)


@dataclass
class TwoFormGraph:
    """L_omega = {(X, -omega~ X)} inside E_phi."""

    omega: DifferentialForm
    phi: DifferentialForm = None

    def __post_init__(self):
        if self.omega.degree != 2:
            raise TypeError("omega must be a 2-form")
        if self.phi is None:
            self.phi = _zero_phi(self.omega.dim)
        _same_dim(self.omega, self.phi)
        _require_closed(self.phi)

    @property
    def dim(self) -> int:
        return self.omega.dim

    def section(self, X: MultivectorField) -> CourantSection:
        return CourantSection(X, -interior_product(X, self.omega))

    def membership_residual(self, e: CourantSection) -> DifferentialForm:
        return e.xi + interior_product(e.X, self.omega)

    def probes(self):
        return [coordinate_vector(self.dim, i) for i in range(1, self.dim + 1)]

    def random_probe(self, rng):
        return random_multivector(rng, self.dim, 1, 2)

    def to_json(self) -> dict:
        return {"omega": self.omega.to_json(), "phi": self.phi.to_json()}

    @classmethod
    def from_json(cls, data) -> "TwoFormGraph":
        omega = graded_from_json(data["omega"])
        phi = graded_from_json(data["phi"]) if data.get("phi") else None
        return cls(omega, phi)


def graph_from_json(data):
    if "pi" in data:
        return BivectorGraph.from_json(data)
    if "omega" in data:
        return TwoFormGraph.from_json(data)
    raise ValueError("graph JSON needs a 'pi' or an 'omega' entry")


@dataclass
class ClosureReport:
    closed: bool
    checked: int
    witness: Optional[dict] = None

    def to_json(self) -> dict:
        return {"closed": self.closed, "checked": self.checked, "witness": self.witness}


def graph_closed_under_bracket(L: Union[BivectorGraph, TwoFormGraph], trials: int = 5, seed=42) -> ClosureReport:
    """Bracket graph sections in E_phi and test that the result stays in the graph.

    The closure defect of an isotropic subbundle is tensorial, so the coordinate
    probes already decide the question; the random probes are a cross-check.
    """
    E = TwistedCourantAlgebroid(L.dim, L.phi)
    rng = rng_from(seed)
    probes = L.probes()
    pairs = [(a, b) for i, a in enumerate(probes) for b in probes[i + 1:]]
    pairs += [(L.random_probe(rng), L.random_probe(rng)) for _ in range(trials)]
    for n, (a, b) in enumerate(pairs, 1):
        e1, e2 = L.section(a), L.section(b)
        r = L.membership_residual(E.bracket(e1, e2))
        if not r.is_zero():
            return ClosureReport(False, n, {"e1": e1.to_json(), "e2": e2.to_json(), "residual": r.to_json()})
    return ClosureReport(True, len(pairs))


# -- twisted Poisson identities -------------------------------------------------

def is_phi_poisson(pi: MultivectorField, phi: DifferentialForm) -> CheckResult:
    """Defect ``[pi,pi] - CALIBRATION * (wedge^3 pi~)(phi)``."""
    _same_dim(pi, phi)
    _require_closed(phi)
    defect = schouten_bracket(pi, pi) - raise_all(pi, phi).scale(CALIBRATION)
    return CheckResult(defect.is_zero(), defect)


def is_phi_closed(omega: DifferentialForm, phi: DifferentialForm) -> CheckResult:
    _same_dim(omega, phi)
    defect = de_rham_d(omega) - phi
    return CheckResult(defect.is_zero(), defect)


def poisson_bracket(pi: MultivectorField, f, g) -> RationalFunction:
    n = pi.dim
    return evaluate_on(pi, differential(f, n), differential(g, n))


def hamiltonian_field(pi: MultivectorField, f) -> MultivectorField:
    """H_f = {., f} = -pi~ df."""
    return -sharp(pi)(differential(f, pi.dim))


def twisted_jacobiator(pi, phi, f, g, h) -> RationalFunction:
    def br(a, b):
        return poisson_bracket(pi, a, b)

    cyclic = br(br(f, g), h) + br(br(g, h), f) + br(br(h, f), g)
    if phi.is_zero():
        return cyclic
    H = [hamiltonian_field(pi, a) for a in (f, g, h)]
    return cyclic + evaluate_on(phi, *H)


def phi_contract(phi: DifferentialForm, X: MultivectorField, Y: MultivectorField) -> DifferentialForm:
    """phi(X, Y, .)."""
    return interior_product(Y, interior_product(X, phi))


def cotangent_bracket(pi, phi, w1: DifferentialForm, w2: DifferentialForm) -> DifferentialForm:
    """L_{pi~ w1} w2 - L_{pi~ w2} w1 - d pi(w1, w2) + phi(pi~ w1, pi~ w2, .)."""
    p = sharp(pi)
    X1, X2 = p(w1), p(w2)
    out = lie_derivative(X1, w2) - lie_derivative(X2, w1) - differential(evaluate_on(pi, w1, w2), pi.dim)
    if not phi.is_zero():
        out = out + phi_contract(phi, X1, X2)
    return out


def hamiltonian_anomaly(pi, phi, f, g) -> MultivectorField:
    """H_{f,g} + [H_f, H_g] - pi~(phi(H_f, H_g, .)); zero for phi-Poisson pi."""
    Hf, Hg = hamiltonian_field(pi, f), hamiltonian_field(pi, g)
    out = hamiltonian_field(pi, poisson_bracket(pi, f, g)) + schouten_bracket(Hf, Hg)
    if not phi.is_zero():
        out = out - sharp(pi)(phi_contract(phi, Hf, Hg))
    return out


def d_pi_phi(pi: MultivectorField, phi: DifferentialForm, T) -> MultivectorField:
    """[pi, T] - sum_k beta_k ^ i_{dx_k} T with beta_k(a, b) = phi(pi~ a, pi~ b, d_k).

    On a function this is H_f; on a vector field X its value on (w1, w2) is
    ``-(L_X pi)(w1, w2) - phi(pi~ w1, pi~ w2, X)``.
    """
    if not isinstance(T, MultivectorField):
        T = MultivectorField.function(to_ratfun(T, pi.dim), pi.dim)
    out = schouten_bracket(pi, T)
    if T.degree and not phi.is_zero():
        out = out - derivation_from_pairs(raise_two_of_three(pi, phi), T)
    return out


def lhf_pi_identity(pi, phi, f, w1: DifferentialForm, w2: DifferentialForm) -> RationalFunction:
    """(L_{H_f} pi)(w1, w2) + phi(pi~ w1, pi~ w2, H_f); zero for phi-Poisson pi."""
    Hf = hamiltonian_field(pi, f)
    out = evaluate_on(lie_derivative(Hf, pi), w1, w2)
    if not phi.is_zero():
        p = sharp(pi)
        out = out + evaluate_on(phi, p(w1), p(w2), Hf)
    return out


# -- gauge transformations ------------------------------------------------------

@dataclass
class GaugeResult:
    det: RationalFunction
    pi_prime: Optional[MultivectorField] = None

    @property
    def singular(self) -> bool:
        """The determinant vanishes identically: the gauged graph is no bivector graph."""
        return self.pi_prime is None

    @property
    def ok(self) -> bool:
        return not self.singular

    def singular_locus(self):
        """Numerator of det(1 + B~ pi~); the bivector blows up on its zero set."""
        return self.det.num

    def to_json(self) -> dict:
        out = {"ok": self.ok, "det": self.det.to_json(), "singular": self.singular}
        if self.pi_prime is not None:
            out["pi_prime"] = self.pi_prime.to_json()
        return out


def gauge_operator(pi: MultivectorField, B: DifferentialForm, sign: int = 1) -> LinearMapField:
    """1 + sign * B~ pi~ acting on 1-forms."""
    _same_dim(pi, B)
    n = pi.dim
    BP = flat(B).compose(sharp(pi)).matrix
    one, zero = RationalFunction.one(n), RationalFunction.zero(n)
    m = [[(one if i == j else zero) + (BP[i][j] if sign > 0 else -BP[i][j]) for j in range(n)] for i in range(n)]
    return LinearMapField(n, m, "forms->forms")


def gauge_bivector(pi: MultivectorField, B: DifferentialForm) -> GaugeResult:
    """pi~' = pi~ (1 + B~ pi~)^{-1}, inverted by adjugate over the rational functions."""
    M = gauge_operator(pi, B).matrix
    det = determinant(M)
    if det.is_zero():
        return GaugeResult(det)
    adj = adjugate(M)
    Pt = sharp(pi).matrix
    sharp_new = [[c / det for c in row] for row in matmul(Pt, adj)]
    # sharp matrix is P^T, so P'[i][j] = sharp_new[j][i]
    n = pi.dim
    for i in range(n):
        for j in range(i, n):
            if sharp_new[i][j] != -sharp_new[j][i]:
                raise ArithmeticError("gauged bivector is not antisymmetric")
    P_new = [[sharp_new[j][i] for j in range(n)] for i in range(n)]
    return GaugeResult(det, bivector_from_matrix(P_new))


def lie_algebroid_intertwining(pi, phi, B, w1, w2, sign: int = 1) -> DifferentialForm:
    """[M w1, M w2]' - M [w1, w2] with M = 1 + sign * B~ pi~.

    The primed bracket is the cotangent bracket of the gauged bivector for phi - dB.
    """
    res = gauge_bivector(pi, B)
    if res.singular:
        raise ArithmeticError("1 + B~ pi~ is not invertible")
    M = gauge_operator(pi, B, sign)
    phi_new = phi - de_rham_d(B)
    lhs = cotangent_bracket(res.pi_prime, phi_new, M(w1), M(w2))
    return lhs - M(cotangent_bracket(pi, phi, w1, w2))


# -- symplectic inverse and leaves ------------------------------------------------

def bivector_from_symplectic(omega: DifferentialForm) -> MultivectorField:
    """The bivector whose graph is L_omega: pi~ = -(omega~)^{-1}."""
    W = two_form_matrix(omega)
    det = determinant(W)
    if det.is_zero():
        raise ArithmeticError("omega is degenerate")
    adj = adjugate(W)
    return bivector_from_matrix([[-c / det for c in row] for row in adj])


@dataclass
class LeafData:
    point: List[float]
    rank: int
    leaf_basis: np.ndarray
    leaf_two_form: np.ndarray
    singular_values: List[float] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "point": list(self.point),
            "rank": self.rank,
            "leaf_basis": self.leaf_basis.T.tolist(),
            "leaf_two_form": self.leaf_two_form.tolist(),
        }


def bivector_matrix_at(pi: MultivectorField, point: Sequence[float], eps: float = 1e-12) -> np.ndarray:
    return np.array([[c.evaluate(point, eps) for c in row] for row in bivector_matrix(pi)], dtype=float)


def leaf_data_at(pi: MultivectorField, phi: DifferentialForm | None, point: Sequence[float],
                 tol: float = 1e-10) -> LeafData:
    """Pointwise leaf: image of pi~, its rank and the leaf 2-form on an orthonormal basis.

    The 2-form ``S`` satisfies ``S(pi~ a, pi~ b) = pi(a, b)``; it is
    ``-(U^T P U)^{-1}`` for an orthonormal basis ``U`` of the image. ``phi``
    does not enter the pointwise data (it is the leaf form's differential).
    """
    P = bivector_matrix_at(pi, point)
    U, s, _ = np.linalg.svd(P)
    rank = int(np.sum(s > tol))
    basis = U[:, :rank]
    if rank:
        S = -np.linalg.inv(basis.T @ P @ basis)
        S = (S - S.T) / 2
    else:
        S = np.zeros((0, 0))
    return LeafData([float(p) for p in point], rank, basis, S, [float(v) for v in s])


def rank_at(pi: MultivectorField, point: Sequence[float], tol: float = 1e-10) -> int:
    return leaf_data_at(pi, None, point, tol).rank


# -- Lie-Poisson example data ---------------------------------------------------

def lie_poisson_so3() -> MultivectorField:
    """x1 d2^d3 + x2 d3^d1 + x3 d1^d2."""
    x = coordinates(3)
    return MultivectorField(3, 2, {(2, 3): x[0], (1, 3): -x[1], (1, 2): x[2]})


def lie_poisson_B(lam) -> DifferentialForm:
    """lam (x1 dx2^dx3 + x2 dx3^dx1 + x3 dx1^dx2)."""
    lam = as_rational(lam)
    x = coordinates(3)
    return DifferentialForm(3, 2, {(2, 3): x[0] * lam, (1, 3): x[1] * (-lam), (1, 2): x[2] * lam})


__all__ = [
    "CALIBRATION",
    "JACOBIATOR_FACTOR",
    "BivectorGraph",
    "CheckResult",
    "ClosureReport",
    "GaugeResult",
    "LeafData",
    "PoleError",
    "TwoFormGraph",
    "bivector_from_symplectic",
    "bivector_matrix_at",
    "cotangent_bracket",
    "d_pi_phi",
    "lie_poisson_B",
    "gauge_bivector",
    "gauge_operator",
    "graph_closed_under_bracket",
    "graph_from_json",
    "hamiltonian_anomaly",
    "hamiltonian_field",
    "is_phi_closed",
    "is_phi_poisson",
    "leaf_data_at",
    "lhf_pi_identity",
    "lie_algebroid_intertwining",
    "lie_poisson_so3",
    "phi_contract",
    "poisson_bracket",
    "rank_at",
    "twisted_jacobiator",
]
