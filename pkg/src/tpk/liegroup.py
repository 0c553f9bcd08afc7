"""Matrix Lie groups with a bi-invariant metric: the Dirac structure spanned by
``e_a = (a^L - a^R, (a^L + a^R)/2)`` in E_{-phi}, its bivector and the quasi-Poisson pi_1.

Tangent vectors at ``g`` are stored in body coordinates ``g^{-1} X``; a covector
``xi`` is stored by its values ``xi(e_k^L)`` on the left-invariant frame.
``a^L(g) = g a`` and ``a^R(g) = a g``, so ``[a^L, b^L] = [a, b]^L``,
``[a^R, b^R] = -[a, b]^R`` and ``[a^L, b^R] = 0``.

Every algebra below uses a metric-orthonormal basis (signs allowed), which
fixes the scale of the Cartan form ``phi(u, v, w) = [u, v].w / 2``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.linalg import expm


class LieGroupError(ValueError):
    pass


class InvalidGroupPoint(LieGroupError):
    pass


class SingularPointError(LieGroupError):
    """Ad_g + 1 is not invertible: there is no bivector at this point."""


class ChartStepError(LieGroupError):
    """Finite differences in the exponential chart disagree with the exact rules."""


# -- algebras -------------------------------------------------------------------

class QuadraticLieAlgebra:
    """Structure constants ``[e_i, e_j] = sum_k c[i, j, k] e_k``, an invariant metric
    and a faithful matrix realisation."""

    def __init__(self, name: str, structure, metric, generators, group: str = "", check: bool = True):
        self.name = name
        self.c = np.asarray(structure, dtype=float)
        self.metric = np.asarray(metric, dtype=float)
        self.generators = [np.asarray(m, dtype=float) for m in generators]
        self.dim = self.metric.shape[0]
        self.group = group or name
        if self.c.shape != (self.dim,) * 3:
            raise LieGroupError("structure constants must be d x d x d")
        if len(self.generators) != self.dim:
            raise LieGroupError("need one generator matrix per basis element")
        self.metric_inv = np.linalg.inv(self.metric)
        flat_gens = np.stack([m.ravel() for m in self.generators], axis=1)
        self._coords = np.linalg.pinv(flat_gens)
        if check:
            self.check()

    @classmethod
    def from_generators(cls, name: str, generators, metric, group: str = "") -> "QuadraticLieAlgebra":
        gens = [np.asarray(m, dtype=float) for m in generators]
        d = len(gens)
        flat_gens = np.stack([m.ravel() for m in gens], axis=1)
        pinv = np.linalg.pinv(flat_gens)
        c = np.zeros((d, d, d))
        for i in range(d):
            for j in range(d):
                comm = gens[i] @ gens[j] - gens[j] @ gens[i]
                c[i, j] = np.round(pinv @ comm.ravel(), 12)
        return cls(name, c, metric, gens, group)

    def check(self, tol: float = 1e-12):
        c, G = self.c, self.metric
        if np.abs(c + c.transpose(1, 0, 2)).max() > tol:
            raise LieGroupError("structure constants are not antisymmetric")
        # Jacobi: sum_l c[j,k,l] c[i,l,m] + cyclic
        jac = (np.einsum("jkl,ilm->ijkm", c, c) + np.einsum("kil,jlm->ijkm", c, c)
               + np.einsum("ijl,klm->ijkm", c, c))
        if np.abs(jac).max() > tol:
            raise LieGroupError("structure constants violate Jacobi")
        if np.abs(G - G.T).max() > tol or abs(np.linalg.det(G)) < tol:
            raise LieGroupError("metric must be symmetric and nondegenerate")
        # invariance: [u,v].w + v.[u,w] = 0, i.e. c[i,j,l] G[l,k] + G[j,l] c[i,k,l] = 0
        inv = np.einsum("ijl,lk->ijk", c, G) + np.einsum("jl,ikl->ijk", G, c)
        if np.abs(inv).max() > tol:
            raise LieGroupError("metric is not ad-invariant")
        for i in range(self.dim):
            for j in range(self.dim):
                ei, ej = self.generators[i], self.generators[j]
                if np.abs(ei @ ej - ej @ ei - self.matrix(c[i, j])).max() > tol:
                    raise LieGroupError("structure constants do not match the matrix realisation")

    def matrix(self, u) -> np.ndarray:
        return sum(float(x) * m for x, m in zip(u, self.generators))

    def coords(self, m: np.ndarray) -> np.ndarray:
        return self._coords @ np.asarray(m).ravel()

    def inner(self, u, v) -> float:
        return float(np.asarray(u) @ self.metric @ np.asarray(v))

    def ad(self, u) -> np.ndarray:
        """Matrix of v |-> [u, v]."""
        return np.einsum("i,ijk->kj", np.asarray(u, dtype=float), self.c)

    def basis(self, i: int) -> np.ndarray:
        e = np.zeros(self.dim)
        e[i] = 1.0
        return e

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "group": self.group,
            "structure": self.c.tolist(),
            "metric": self.metric.tolist(),
            "generators": [m.tolist() for m in self.generators],
        }

    @classmethod
    def from_json(cls, data) -> "QuadraticLieAlgebra":
        if isinstance(data, str):
            data = json.loads(data)
        alg = cls(data["name"], data["structure"], data["metric"], data["generators"], data.get("group", ""))
        if data.get("dim", alg.dim) != alg.dim:
            raise LieGroupError("declared dim does not match the metric")
        return alg

    def __repr__(self):
        return f"QuadraticLieAlgebra({self.name!r}, dim={self.dim})"


def _so3_generators():
    gens = []
    for i in range(3):
        m = np.zeros((3, 3))
        j, k = (i + 1) % 3, (i + 2) % 3
        m[k, j], m[j, k] = 1.0, -1.0
        gens.append(m)
    return gens


def _realify(z: np.ndarray) -> np.ndarray:
    a, b = z.real, z.imag
    return np.block([[a, -b], [b, a]])


def so3() -> QuadraticLieAlgebra:
    """Rotation generators with [e1, e2] = e3; metric -tr(uv)/2."""
    return QuadraticLieAlgebra.from_generators("so3", _so3_generators(), np.eye(3), "SO(3)")


def su2() -> QuadraticLieAlgebra:
    """-i sigma_k / 2 realified to 4x4, so [e1, e2] = e3; metric -tr_R(uv)."""
    sigma = [np.array([[0, 1], [1, 0]], dtype=complex),
             np.array([[0, -1j], [1j, 0]], dtype=complex),
             np.array([[1, 0], [0, -1]], dtype=complex)]
    gens = [_realify(-0.5j * s) for s in sigma]
    return QuadraticLieAlgebra.from_generators("su2", gens, np.eye(3), "SU(2)")


def sl2r() -> QuadraticLieAlgebra:
    """diag(1,-1)/2, offdiag(1,1)/2, offdiag(1,-1)/2; metric 2 tr(uv) = diag(1, 1, -1)."""
    gens = [np.array([[0.5, 0], [0, -0.5]]), np.array([[0, 0.5], [0.5, 0]]), np.array([[0, 0.5], [-0.5, 0]])]
    return QuadraticLieAlgebra.from_generators("sl2r", gens, np.diag([1.0, 1.0, -1.0]), "SL(2,R)")


def _so_n(name: str, n: int, group: str) -> QuadraticLieAlgebra:
    gens = []
    for i in range(n):
        for j in range(i + 1, n):
            m = np.zeros((n, n))
            m[i, j], m[j, i] = 1.0, -1.0
            gens.append(m)
    return QuadraticLieAlgebra.from_generators(name, gens, np.eye(len(gens)), group)


def so4() -> QuadraticLieAlgebra:
    """E_ij - E_ji (i < j); metric -tr(uv)/2."""
    return _so_n("so4", 4, "SO(4)")


def so5() -> QuadraticLieAlgebra:
    """E_ij - E_ji (i < j); metric -tr(uv)/2. The smallest shipped algebra whose
    generic conjugacy classes have dimension above 3."""
    return _so_n("so5", 5, "SO(5)")


ALGEBRAS = {"so3": so3, "su2": su2, "sl2r": sl2r, "so4": so4, "so5": so5}


def get_algebra(name: str) -> QuadraticLieAlgebra:
    try:
        return ALGEBRAS[name]()
    except KeyError:
        raise LieGroupError(f"unknown algebra {name!r}; choose from {sorted(ALGEBRAS)}") from None


# -- group points -----------------------------------------------------------------

class GroupPoint:
    def __init__(self, A: QuadraticLieAlgebra, g, tol: float = 1e-9):
        g = np.asarray(g, dtype=float)
        size = A.generators[0].shape[0]
        if g.shape != (size, size):
            raise InvalidGroupPoint(f"expected a {size}x{size} matrix")
        self.algebra = A
        self.g = g
        self.group = A.group
        self._validate(tol)
        self.g_inv = np.linalg.inv(g)

    def _validate(self, tol: float):
        g, n = self.g, self.g.shape[0]
        if abs(np.linalg.det(g) - 1) > tol:
            raise InvalidGroupPoint("det g != 1")
        if self.group in COMPACT and np.abs(g.T @ g - np.eye(n)).max() > tol:
            raise InvalidGroupPoint("g is not orthogonal")
        if self.group == "SU(2)":
            h = n // 2
            J = np.block([[np.zeros((h, h)), -np.eye(h)], [np.eye(h), np.zeros((h, h))]])
            if np.abs(g @ J - J @ g).max() > tol:
                raise InvalidGroupPoint("g is not complex linear")
            z = g[:h, :h] + 1j * g[h:, :h]
            if abs(np.linalg.det(z) - 1) > tol:
                raise InvalidGroupPoint("complex det g != 1")

    @classmethod
    def identity(cls, A: QuadraticLieAlgebra) -> "GroupPoint":
        return cls(A, np.eye(A.generators[0].shape[0]))

    @classmethod
    def exp(cls, A: QuadraticLieAlgebra, u) -> "GroupPoint":
        return cls(A, expm(A.matrix(u)))

    def __matmul__(self, other: "GroupPoint") -> "GroupPoint":
        return GroupPoint(self.algebra, self.g @ other.g)


COMPACT = ("SO(3)", "SU(2)", "SO(4)", "SO(5)")


def random_point(A: QuadraticLieAlgebra, rng, scale: Optional[float] = None) -> GroupPoint:
    """Product of two exponentials (reaches beyond the image of exp for SL(2,R)).

    Noncompact groups are sampled closer to the identity: far out, the entries of
    Ad_g grow exponentially and chart finite differences lose accuracy to roundoff.
    """
    if scale is None:
        scale = 1.5 if A.group in COMPACT else 0.8
    u = rng.normal(size=A.dim) * scale
    v = rng.normal(size=A.dim) * scale / 2
    return GroupPoint(A, expm(A.matrix(u)) @ expm(A.matrix(v)))


# -- algebra operations --------------------------------------------------------------

def ad_bracket(A: QuadraticLieAlgebra, u, v) -> np.ndarray:
    return np.einsum("i,j,ijk->k", np.asarray(u, dtype=float), np.asarray(v, dtype=float), A.c)


def Ad_at(A: QuadraticLieAlgebra, g: GroupPoint) -> np.ndarray:
    """Column j holds the coordinates of g e_j g^{-1}."""
    return np.stack([A.coords(g.g @ m @ g.g_inv) for m in A.generators], axis=1)


def cartan_form(A: QuadraticLieAlgebra, u, v, w) -> float:
    return 0.5 * A.inner(ad_bracket(A, u, v), w)


def cartan_tensor(A: QuadraticLieAlgebra) -> np.ndarray:
    """phi_{abc} on the basis."""
    return 0.5 * np.einsum("abl,lc->abc", A.c, A.metric)


def cartan_trivector(A: QuadraticLieAlgebra) -> np.ndarray:
    """The Cartan form with all three slots raised by the metric."""
    Gi = A.metric_inv
    return np.einsum("ia,jb,kc,abc->ijk", Gi, Gi, Gi, cartan_tensor(A))


# -- invariant sections ---------------------------------------------------------------

@dataclass(frozen=True)
class InvariantSection:
    """Vector part ``a^L + b^R`` and 1-form part the metric dual of ``c^L + d^R``."""

    a: Tuple[float, ...]
    b: Tuple[float, ...]
    c: Tuple[float, ...]
    d: Tuple[float, ...]

    @classmethod
    def make(cls, a, b, c, d) -> "InvariantSection":
        return cls(*(tuple(float(x) for x in v) for v in (a, b, c, d)))

    @classmethod
    def e(cls, u) -> "InvariantSection":
        """e_u = (u^L - u^R, (u^L + u^R)/2)."""
        u = np.asarray(u, dtype=float)
        return cls.make(u, -u, u / 2, u / 2)


@dataclass
class SectionValue:
    """A section of TG + T*G at one point: body vector and covector on the left frame."""

    X: np.ndarray
    xi: np.ndarray

    def __sub__(self, other: "SectionValue") -> "SectionValue":
        return SectionValue(self.X - other.X, self.xi - other.xi)

    def norm(self) -> float:
        return float(max(np.abs(self.X).max(initial=0.0), np.abs(self.xi).max(initial=0.0)))

    def vector(self) -> np.ndarray:
        return np.concatenate([self.X, self.xi])


def section_value(A: QuadraticLieAlgebra, g: GroupPoint, s: InvariantSection) -> SectionValue:
    Ad_inv = np.linalg.inv(Ad_at(A, g))
    X = np.asarray(s.a) + Ad_inv @ np.asarray(s.b)
    dual = np.asarray(s.c) + Ad_inv @ np.asarray(s.d)
    return SectionValue(X, A.metric @ dual)


def e_value(A: QuadraticLieAlgebra, g: GroupPoint, u) -> SectionValue:
    return section_value(A, g, InvariantSection.e(u))


class _Rules:
    """Invariant calculus at one point.

    Fields are pairs (left, right) of algebra elements; 1-forms are the metric
    duals of such pairs. Pairings are functions of the form <p, Ad_g q>.
    """

    def __init__(self, A: QuadraticLieAlgebra, g: GroupPoint):
        self.A = A
        self.Ad = Ad_at(A, g)
        self.Ad_inv = np.linalg.inv(self.Ad)

    def field_bracket(self, X, Y):
        A = self.A
        return ad_bracket(A, X[0], Y[0]), -ad_bracket(A, X[1], Y[1])

    def pair(self, xi, X) -> float:
        A, Ad = self.A, self.Ad
        c, d = xi
        a, b = X
        return A.inner(c, a) + A.inner(d, b) + A.inner(d, Ad @ a) + A.inner(Ad @ c, b)

    def _d_mixed(self, W, p, q) -> float:
        """W(<p, Ad_g q>) for W = u^L + v^R."""
        A, Ad = self.A, self.Ad
        u, v = W
        return A.inner(p, Ad @ ad_bracket(A, u, q)) + A.inner(p, ad_bracket(A, v, Ad @ q))

    def derive_pair(self, W, xi, X) -> float:
        """W(xi(X)); the constant parts drop out."""
        c, d = xi
        a, b = X
        return self._d_mixed(W, d, a) + self._d_mixed(W, b, c)

    def body(self, X) -> np.ndarray:
        return np.asarray(X[0]) + self.Ad_inv @ np.asarray(X[1])


def courant_bracket_rules(A: QuadraticLieAlgebra, g: GroupPoint, s1: InvariantSection,
                          s2: InvariantSection, twist_sign: int = -1) -> SectionValue:
    R = _Rules(A, g)
    X1, X2 = (np.asarray(s1.a), np.asarray(s1.b)), (np.asarray(s2.a), np.asarray(s2.b))
    xi1, xi2 = (np.asarray(s1.c), np.asarray(s1.d)), (np.asarray(s2.c), np.asarray(s2.d))
    zero = np.zeros(A.dim)
    Xb = R.field_bracket(X1, X2)
    phi_b = cartan_tensor(A)
    x1, x2 = R.body(X1), R.body(X2)
    out = np.zeros(A.dim)
    for k in range(A.dim):
        Z = (A.basis(k), zero)
        # (L_X1 xi2)(Z) = X1(xi2(Z)) - xi2([X1, Z])
        lie = R.derive_pair(X1, xi2, Z) - R.pair(xi2, R.field_bracket(X1, Z))
        # (i_X2 d xi1)(Z) = X2(xi1(Z)) - Z(xi1(X2)) - xi1([X2, Z])
        dxi = R.derive_pair(X2, xi1, Z) - R.derive_pair(Z, xi1, X2) - R.pair(xi1, R.field_bracket(X2, Z))
        twist = np.einsum("a,b,c,abc->", x1, x2, A.basis(k), phi_b)
        out[k] = lie - dxi + twist_sign * twist
    return SectionValue(R.body(Xb), out)


# -- exponential chart oracle ----------------------------------------------------------

def _J(A: QuadraticLieAlgebra, s: np.ndarray) -> np.ndarray:
    """Body derivative of exp: g exp(s)^{-1} d exp(s) = J(s) ds, J = (1 - e^{-ad s}) / ad s."""
    ad = A.ad(s)
    out = np.eye(A.dim)
    term = np.eye(A.dim)
    for n in range(1, 40):
        term = term @ (-ad) / (n + 1)
        out = out + term
        if np.abs(term).max() < 1e-18:
            break
    return out


class _Chart:
    def __init__(self, A: QuadraticLieAlgebra, g: GroupPoint, step: float):
        self.A, self.g, self.step = A, g, step

    def point(self, s) -> GroupPoint:
        return GroupPoint(self.A, self.g.g @ expm(self.A.matrix(s)), tol=1e-6)

    def vector(self, s, body_fn) -> np.ndarray:
        return np.linalg.solve(_J(self.A, s), body_fn(self.point(s)))

    def covector(self, s, frame_fn) -> np.ndarray:
        return _J(self.A, s).T @ frame_fn(self.point(s))

    def derivative(self, fn) -> np.ndarray:
        """D[l] = d/ds_l fn(s) at 0, central differences."""
        d, h = self.A.dim, self.step
        rows = []
        for l in range(d):
            e = np.zeros(d)
            e[l] = h
            rows.append((fn(e) - fn(-e)) / (2 * h))
        return np.stack(rows)


def courant_bracket_fd(A: QuadraticLieAlgebra, g: GroupPoint, s1: InvariantSection,
                       s2: InvariantSection, twist_sign: int = -1, fd_step: float = 1e-5) -> SectionValue:
    """The same bracket by coordinate formulas in the chart h = g exp(s)."""
    C = _Chart(A, g, fd_step)

    def vec(s_):
        return lambda s: C.vector(s, lambda p: section_value(A, p, s_).X)

    def cov(s_):
        return lambda s: C.covector(s, lambda p: section_value(A, p, s_).xi)

    X1f, X2f, xi1f, xi2f = vec(s1), vec(s2), cov(s1), cov(s2)
    zero = np.zeros(A.dim)
    X1, X2, xi2 = X1f(zero), X2f(zero), xi2f(zero)
    dX1, dX2, dxi1, dxi2 = (C.derivative(f) for f in (X1f, X2f, xi1f, xi2f))  # [l, i] = d_l comp_i
    bracket = X1 @ dX2 - X2 @ dX1
    lie = X1 @ dxi2 + dX1 @ xi2
    i_dxi = X2 @ dxi1 - dxi1 @ X2
    twist = np.einsum("a,b,abc->c", X1, X2, cartan_tensor(A))
    return SectionValue(bracket, lie - i_dxi + twist_sign * twist)


def fd_tolerance(fd_step: float) -> float:
    return max(1e-7, 10 * fd_step ** 2)


def courant_bracket_at(A: QuadraticLieAlgebra, g: GroupPoint, s1: InvariantSection, s2: InvariantSection,
                       twist_sign: int = -1, validate: bool = False, fd_step: float = 1e-5) -> SectionValue:
    """Bracket of invariant sections in E_{twist_sign * phi} at g.

    With ``validate`` the exact rules are cross-checked against chart finite
    differences and :class:`ChartStepError` is raised on disagreement.
    """
    exact = courant_bracket_rules(A, g, s1, s2, twist_sign)
    if validate:
        approx = courant_bracket_fd(A, g, s1, s2, twist_sign, fd_step)
        err = (exact - approx).norm()
        if err > fd_tolerance(fd_step):
            raise ChartStepError(f"finite differences disagree by {err:.3e} at step {fd_step}")
    return exact


# -- isotropy, pi~ and leaves ------------------------------------------------------------

def isotropy_exact(A: QuadraticLieAlgebra, u, v) -> Tuple[Fraction, Dict[Tuple[int, int], Fraction]]:
    """(e_u, e_v) from the invariant rules, exactly.

    The pairing is ``const + sum K[i, j] <e_i, Ad_g e_j>``; returns ``(const, K)``
    with zero entries dropped. ``u``, ``v`` and the metric must be rational.
    """
    G = [[Fraction(x) for x in row] for row in A.metric]

    def vec(w, s=Fraction(1)):
        return [s * Fraction(x) for x in w]

    def inner(p, r):
        return sum(p[i] * G[i][j] * r[j] for i in range(A.dim) for j in range(A.dim))

    eu = (vec(u), vec(u, -1), vec(u, Fraction(1, 2)), vec(u, Fraction(1, 2)))
    ev = (vec(v), vec(v, -1), vec(v, Fraction(1, 2)), vec(v, Fraction(1, 2)))
    const = Fraction(0)
    K: Dict[Tuple[int, int], Fraction] = {}

    def add_mixed(p, r, s=Fraction(1)):
        # <p, Ad_g r> expanded on the basis
        for i in range(A.dim):
            for j in range(A.dim):
                coef = sum(p[k] * G[k][i] for k in range(A.dim)) * r[j] * s
                if coef:
                    K[(i, j)] = K.get((i, j), Fraction(0)) + coef

    for xi_owner, X_owner in ((eu, ev), (ev, eu)):
        a, b = X_owner[0], X_owner[1]
        c, d = xi_owner[2], xi_owner[3]
        const += inner(c, a) + inner(d, b)
        add_mixed(d, a)
        # <c, Ad_{g^-1} b> = <Ad_g c, b> = sum b^T G Ad c
        add_mixed(b, c)
    return const, {k: v for k, v in K.items() if v}


def pairing_at(A: QuadraticLieAlgebra, e1: SectionValue, e2: SectionValue) -> float:
    return float(e1.xi @ e2.X + e2.xi @ e1.X)


def pi_tilde_at(A: QuadraticLieAlgebra, g: GroupPoint, cond_max: float = 1e8) -> np.ndarray:
    """2 (Ad_g - 1)(Ad_g + 1)^{-1}, acting on metric duals of covectors in body coordinates."""
    Ad = Ad_at(A, g)
    M = Ad + np.eye(A.dim)
    if np.linalg.cond(M) > cond_max:
        raise SingularPointError("Ad_g + 1 is singular: not a bivector here")
    return 2 * (Ad - np.eye(A.dim)) @ np.linalg.inv(M)


def e_span_at(A: QuadraticLieAlgebra, g: GroupPoint) -> np.ndarray:
    """2d x d matrix whose columns are e_1(g), ..., e_d(g)."""
    return np.stack([e_value(A, g, A.basis(i)).vector() for i in range(A.dim)], axis=1)


def graph_residual(A: QuadraticLieAlgebra, g: GroupPoint, alpha) -> float:
    """Distance of (pi~ alpha, alpha) from span{e_a(g)}; alpha given on the left frame."""
    alpha = np.asarray(alpha, dtype=float)
    X = pi_tilde_at(A, g) @ (A.metric_inv @ alpha)
    target = np.concatenate([X, alpha])
    S = e_span_at(A, g)
    coef, *_ = np.linalg.lstsq(S, target, rcond=None)
    return float(np.abs(S @ coef - target).max())


def leaf_tangent_at(A: QuadraticLieAlgebra, g: GroupPoint, tol: float = 1e-10) -> np.ndarray:
    """Orthonormal basis (columns, body coordinates) of span{a^L(g) - a^R(g)}."""
    M = np.eye(A.dim) - np.linalg.inv(Ad_at(A, g))
    U, s, _ = np.linalg.svd(M)
    return U[:, : int(np.sum(s > tol))]


# -- quasi-Poisson pi_1 -------------------------------------------------------------------

def pi1_body(A: QuadraticLieAlgebra, g: GroupPoint) -> np.ndarray:
    """pi_1 = (1/2) sum G^{ab} e_a^R ^ e_b^L in body coordinates: the metric-antisymmetric
    part of Ad_{g^{-1}}, raised."""
    Ai = np.linalg.inv(Ad_at(A, g))
    Gi = A.metric_inv
    return 0.5 * (Ai @ Gi - Gi @ Ai.T)


def fd_schouten_half_square(A_dim: int, pi_fn, step: float) -> np.ndarray:
    """(1/2)[pi, pi]^{ijk} at s = 0 for a chart bivector s |-> pi(s).

    Uses ``(1/2)[pi, pi](dx_i, dx_j, dx_k) = -sum_l (pi^{li} d_l pi^{jk} + c.p.)``,
    the same normalisation as the exact Schouten bracket.
    """
    P = pi_fn(np.zeros(A_dim))
    dP = []
    for l in range(A_dim):
        e = np.zeros(A_dim)
        e[l] = step
        dP.append((pi_fn(e) - pi_fn(-e)) / (2 * step))
    dP = np.stack(dP)  # [l, j, k]
    T = np.einsum("li,ljk->ijk", P, dP)
    return -(T + T.transpose(1, 2, 0) + T.transpose(2, 0, 1))


def action_trivector(A: QuadraticLieAlgebra, g: GroupPoint) -> np.ndarray:
    """The Cartan form pushed through the conjugation-action fields:
    ``psi^{ijk} = sum phi_{abc} rho_a^i rho_b^j rho_c^k`` with ``rho_a = a^L - a^R`` (body)."""
    rho = np.eye(A.dim) - np.linalg.inv(Ad_at(A, g))
    return np.einsum("abc,ia,jb,kc->ijk", cartan_tensor(A), rho, rho, rho)


def _fit(T: np.ndarray, ref: np.ndarray) -> Tuple[float, float]:
    """Least-squares constant k with T ~ k ref, and the residual relative to
    max(|T|, |ref|, 1). The unit floor keeps T = 0 = ref (both finite-difference
    noise) from reading as a large relative error; a vanishing ref gives k = 0."""
    nref = float(np.linalg.norm(ref))
    k = float(np.sum(T * ref)) / nref ** 2 if nref > 1e-8 else 0.0
    scale = max(float(np.linalg.norm(T)), nref, 1.0)
    return k, float(np.linalg.norm(T - k * ref)) / scale


@dataclass
class QuasiPoissonDefect:
    half_square: np.ndarray
    constant: float
    residual: float
    action_constant: float
    action_residual: float

    def to_json(self) -> dict:
        return {
            "cartan_constant": self.constant,
            "cartan_relative_residual": self.residual,
            "action_constant": self.action_constant,
            "action_relative_residual": self.action_residual,
        }


def quasi_poisson_defect(A: QuadraticLieAlgebra, g: GroupPoint, fd_step: float = 1e-4) -> QuasiPoissonDefect:
    """(1/2)[pi_1, pi_1] at g by chart finite differences, fitted against the raised
    Cartan trivector and against :func:`action_trivector`."""
    C = _Chart(A, g, fd_step)

    def pi_chart(s):
        Ji = np.linalg.inv(_J(A, s))
        return Ji @ pi1_body(A, C.point(s)) @ Ji.T

    T = fd_schouten_half_square(A.dim, pi_chart, fd_step)
    k, res = _fit(T, cartan_trivector(A))
    ka, res_a = _fit(T, action_trivector(A, g))
    return QuasiPoissonDefect(T, k, res, ka, res_a)


__all__ = [
    "ALGEBRAS",
    "Ad_at",
    "ChartStepError",
    "GroupPoint",
    "InvalidGroupPoint",
    "InvariantSection",
    "LieGroupError",
    "QuadraticLieAlgebra",
    "QuasiPoissonDefect",
    "SectionValue",
    "SingularPointError",
    "action_trivector",
    "ad_bracket",
    "cartan_form",
    "cartan_tensor",
    "cartan_trivector",
    "courant_bracket_at",
    "courant_bracket_fd",
    "courant_bracket_rules",
    "e_span_at",
    "e_value",
    "fd_schouten_half_square",
    "fd_tolerance",
    "get_algebra",
    "graph_residual",
    "isotropy_exact",
    "leaf_tangent_at",
    "pairing_at",
    "pi1_body",
    "pi_tilde_at",
    "quasi_poisson_defect",
    "random_point",
    "section_value",
    "so3",
    "so4",
    "so5",
    "sl2r",
    "su2",
]
