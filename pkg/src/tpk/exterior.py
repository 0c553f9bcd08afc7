"""Multivector fields and differential forms on R^n with exact coefficients.

Indices are 1-based throughout (``x1 .. xn``), matching the JSON encoding.
Conventions, fixed once and relied on everywhere else:

* ``(d1^d2)(dx1, dx2) = 1`` (determinant pairing), so a bivector ``pi`` has the
  antisymmetric matrix ``P[i][j] = pi(dx_i, dx_j)``.
* ``(i_X w)(Y, ...) = w(X, Y, ...)`` and ``i_{X^Y} = i_Y o i_X``.
* ``sharp(pi)(a) = pi(a, .)`` and ``flat(B)(X) = B(X, .)``.
* Schouten bracket: ``[X, f] = X(f)``, ``[X, Y]`` the commutator, extended by
  graded Leibniz. With these choices ``[pi, f] = -sharp(pi)(df)``.
"""

from __future__ import annotations

from itertools import combinations
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

from .coeff import (
    RATIONAL_TYPES,
    DimensionMismatch,
    RationalFunction,
    ratfun_eq,
    to_ratfun,
)

Index = Tuple[int, ...]


class ExteriorError(ValueError):
    pass


class KindMismatch(ExteriorError):
    pass


class DegreeMismatch(ExteriorError):
    pass


def sort_sign(indices: Sequence[int]) -> Tuple[int, Index]:
    """Sign of the permutation sorting ``indices``; 0 if an index repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, ()
    sign = 1
    # insertion sort, counting transpositions
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


def _merge(a: Index, b: Index) -> Tuple[int, Index]:
    if set(a) & set(b):
        return 0, ()
    return sort_sign(a + b)


class GradedField:
    """Homogeneous antisymmetric tensor field of fixed kind and degree."""

    kind = "graded"
    __slots__ = ("dim", "degree", "terms")

    def __init__(self, dim: int, degree: int, terms: Mapping[Iterable[int], object] | None = None):
        if degree < 0:
            raise DegreeMismatch("degree must be non-negative")
        self.dim = dim
        self.degree = degree
        clean: Dict[Index, RationalFunction] = {}
        for idx, coef in (terms or {}).items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != degree:
                raise DegreeMismatch(f"index tuple {idx} does not have length {degree}")
            if any(not 1 <= i <= dim for i in idx):
                raise ExteriorError(f"index out of range 1..{dim} in {idx}")
            sign, key = sort_sign(idx)
            if sign == 0:
                continue
            c = to_ratfun(coef, dim)
            if sign < 0:
                c = -c
            if key in clean:
                c = clean[key] + c
            clean[key] = c
        self.terms = {k: v for k, v in clean.items() if not v.is_zero()}

    @classmethod
    def _raw(cls, dim: int, degree: int, terms: Dict[Index, RationalFunction]):
        obj = cls.__new__(cls)
        obj.dim = dim
        obj.degree = degree
        obj.terms = {k: v for k, v in terms.items() if not v.is_zero()}
        return obj

    @classmethod
    def zero(cls, dim: int, degree: int):
        return cls._raw(dim, degree, {})

    @classmethod
    def function(cls, f, dim: int | None = None):
        if dim is None:
            dim = f.dim
        return cls._raw(dim, 0, {(): to_ratfun(f, dim)})

    def is_zero(self) -> bool:
        return not self.terms

    def coef(self, *indices: int) -> RationalFunction:
        sign, key = sort_sign(indices)
        if sign == 0 or key not in self.terms:
            return RationalFunction.zero(self.dim)
        c = self.terms[key]
        return c if sign > 0 else -c

    def as_function(self) -> RationalFunction:
        if self.degree != 0:
            raise DegreeMismatch(f"degree-{self.degree} object is not a function")
        return self.terms.get((), RationalFunction.zero(self.dim))

    def _check(self, other: "GradedField"):
        if type(self) is not type(other):
            raise KindMismatch(f"cannot combine {self.kind} with {other.kind}")
        if self.dim != other.dim:
            raise DimensionMismatch(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other):
        if not isinstance(other, GradedField):
            return NotImplemented
        self._check(other)
        if other.degree != self.degree:
            if other.is_zero():
                return self
            if self.is_zero():
                return other
            raise DegreeMismatch(f"cannot add degree {self.degree} and {other.degree}")
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out[k] + v if k in out else v
        return type(self)._raw(self.dim, self.degree, out)

    def __neg__(self):
        return type(self)._raw(self.dim, self.degree, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, GradedField):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "GradedField":
        if isinstance(c, RATIONAL_TYPES):
            return type(self)._raw(self.dim, self.degree, {k: v * c for k, v in self.terms.items()})
        c = to_ratfun(c, self.dim)
        return type(self)._raw(self.dim, self.degree, {k: c * v for k, v in self.terms.items()})

    def __mul__(self, c):
        if isinstance(c, GradedField):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, GradedField):
            return NotImplemented
        if type(self) is not type(other) or self.dim != other.dim:
            return False
        if self.degree != other.degree:
            return self.is_zero() and other.is_zero()
        keys = set(self.terms) | set(other.terms)
        zero = RationalFunction.zero(self.dim)
        return all(ratfun_eq(self.terms.get(k, zero), other.terms.get(k, zero)) for k in keys)

    __hash__ = None

    def map_coefficients(self, fn):
        return type(self)._raw(self.dim, self.degree, {k: fn(v) for k, v in self.terms.items()})

    def partial(self, i: int):
        """Componentwise coordinate derivative (not a tensorial operation)."""
        return self.map_coefficients(lambda c: c.partial(i))

    def evaluate(self, point: Sequence[float], eps: float = 1e-12) -> Dict[Index, float]:
        return {k: v.evaluate(point, eps) for k, v in self.terms.items()}

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "degree": self.degree,
            "kind": self.kind,
            "terms": [{"indices": list(k), "coef": v.to_json()} for k, v in sorted(self.terms.items())],
        }

    def __repr__(self):
        if not self.terms:
            return f"{type(self).__name__}(0, deg={self.degree})"
        sym = "d" if self.kind == "multivector" else "dx"
        parts = []
        for k, v in sorted(self.terms.items()):
            basis = "^".join(f"{sym}{i}" for i in k) or "1"
            parts.append(f"({v!r})*{basis}")
        return " + ".join(parts)


class MultivectorField(GradedField):
    kind = "multivector"
    __slots__ = ()


class DifferentialForm(GradedField):
    kind = "form"
    __slots__ = ()


def graded_from_json(data: Mapping) -> GradedField:
    kind = data.get("kind")
    cls = {"multivector": MultivectorField, "form": DifferentialForm}.get(kind)
    if cls is None:
        raise ExteriorError(f"unknown graded-object kind {kind!r}")
    dim = int(data["dim"])
    degree = int(data["degree"])
    terms: Dict[Index, RationalFunction] = {}
    for t in data.get("terms", []):
        idx = tuple(int(i) for i in t["indices"])
        if list(idx) != sorted(set(idx)):
            raise ExteriorError(f"indices must be strictly increasing, got {list(idx)}")
        c = RationalFunction.from_json(t["coef"])
        if c.dim != dim:
            raise DimensionMismatch(f"coefficient dim {c.dim} does not match object dim {dim}")
        terms[idx] = terms[idx] + c if idx in terms else c
    return cls(dim, degree, terms)


# -- convenience constructors -------------------------------------------------

def vector_field(dim: int, components: Mapping[int, object] | Sequence) -> MultivectorField:
    if not isinstance(components, Mapping):
        components = {i + 1: c for i, c in enumerate(components)}
    return MultivectorField(dim, 1, {(i,): c for i, c in components.items()})


def one_form(dim: int, components: Mapping[int, object] | Sequence) -> DifferentialForm:
    if not isinstance(components, Mapping):
        components = {i + 1: c for i, c in enumerate(components)}
    return DifferentialForm(dim, 1, {(i,): c for i, c in components.items()})


def coordinate_vector(dim: int, *indices: int, coef=1) -> MultivectorField:
    """The multivector coef * d_{i1} ^ ... ^ d_{ik}."""
    return MultivectorField(dim, len(indices), {indices: coef})


def coordinate_form(dim: int, *indices: int, coef=1) -> DifferentialForm:
    """The form coef * dx_{i1} ^ ... ^ dx_{ik}."""
    return DifferentialForm(dim, len(indices), {indices: coef})


def function_field(f, dim: int | None = None) -> MultivectorField:
    return MultivectorField.function(f, dim)


# -- algebraic operations ------------------------------------------------------

def wedge(a: GradedField, b: GradedField) -> GradedField:
    a._check(b)
    deg = a.degree + b.degree
    cls = type(a)
    if deg > a.dim:
        return cls.zero(a.dim, deg)
    out: Dict[Index, RationalFunction] = {}
    for ka, va in a.terms.items():
        for kb, vb in b.terms.items():
            sign, key = _merge(ka, kb)
            if not sign:
                continue
            v = va * vb
            if sign < 0:
                v = -v
            out[key] = out[key] + v if key in out else v
    return cls._raw(a.dim, deg, out)


def _drop(idx: Index, i: int) -> Tuple[int, Index]:
    """Remove index ``i`` from the front: sign (-1)^position and the remainder."""
    pos = idx.index(i)
    return (-1 if pos % 2 else 1), idx[:pos] + idx[pos + 1:]


def _interior_basis(i: int, form: DifferentialForm) -> DifferentialForm:
    out: Dict[Index, RationalFunction] = {}
    for k, v in form.terms.items():
        if i in k:
            sign, rest = _drop(k, i)
            out[rest] = v if sign > 0 else -v
    return DifferentialForm._raw(form.dim, form.degree - 1, out)


def interior_product(X: MultivectorField, w: DifferentialForm) -> DifferentialForm:
    """i_X w with i_{X^Y} = i_Y o i_X."""
    if not isinstance(X, MultivectorField) or not isinstance(w, DifferentialForm):
        raise KindMismatch("interior_product expects (multivector, form)")
    if X.dim != w.dim:
        raise DimensionMismatch(f"dimension mismatch: {X.dim} vs {w.dim}")
    if X.degree > w.degree:
        raise DegreeMismatch(f"cannot contract degree {X.degree} into degree {w.degree}")
    result = DifferentialForm.zero(w.dim, w.degree - X.degree)
    for k, v in X.terms.items():
        part = w
        for i in k:
            part = _interior_basis(i, part)
            if part.is_zero():
                break
        if not part.is_zero():
            result = result + part.scale(v)
    return result


def contract_covector(alpha: DifferentialForm, T: MultivectorField) -> MultivectorField:
    """i_alpha T for a 1-form alpha: the odd derivation with i_alpha(X) = alpha(X)."""
    if alpha.degree != 1:
        raise DegreeMismatch("contract_covector expects a 1-form")
    if T.degree == 0:
        raise DegreeMismatch("cannot contract a 1-form into a function")
    if alpha.dim != T.dim:
        raise DimensionMismatch(f"dimension mismatch: {alpha.dim} vs {T.dim}")
    out: Dict[Index, RationalFunction] = {}
    for (i,), a in alpha.terms.items():
        for k, v in T.terms.items():
            if i in k:
                sign, rest = _drop(k, i)
                term = a * v
                if sign < 0:
                    term = -term
                out[rest] = out[rest] + term if rest in out else term
    return MultivectorField._raw(T.dim, T.degree - 1, out)


def evaluate_on(T: GradedField, *args: GradedField) -> RationalFunction:
    """T(a1, ..., ak): a form on vector fields or a multivector on 1-forms."""
    if len(args) != T.degree:
        raise DegreeMismatch(f"degree-{T.degree} object needs {T.degree} arguments, got {len(args)}")
    cur = T
    for a in args:
        if isinstance(cur, DifferentialForm):
            cur = interior_product(a, cur)
        else:
            cur = contract_covector(a, cur)
    return cur.as_function()


def apply_vector(X: MultivectorField, f) -> RationalFunction:
    """X(f) for a vector field X and function f."""
    if X.degree != 1:
        raise DegreeMismatch("apply_vector expects a vector field")
    f = to_ratfun(f, X.dim)
    total = RationalFunction.zero(X.dim)
    for (i,), v in X.terms.items():
        total = total + v * f.partial(i)
    return total


def differential(f, dim: int | None = None) -> DifferentialForm:
    if isinstance(f, GradedField):
        f = f.as_function()
    if dim is None:
        dim = f.dim
    f = to_ratfun(f, dim)
    return DifferentialForm._raw(dim, 1, {(i,): f.partial(i) for i in range(1, dim + 1)})


def de_rham_d(w: DifferentialForm) -> DifferentialForm:
    if not isinstance(w, DifferentialForm):
        raise KindMismatch("de_rham_d expects a differential form")
    deg = w.degree + 1
    if deg > w.dim:
        return DifferentialForm.zero(w.dim, deg)
    out: Dict[Index, RationalFunction] = {}
    for k, v in w.terms.items():
        for i in range(1, w.dim + 1):
            if i in k:
                continue
            dv = v.partial(i)
            if dv.is_zero():
                continue
            sign, key = sort_sign((i,) + k)
            if sign < 0:
                dv = -dv
            out[key] = out[key] + dv if key in out else dv
    return DifferentialForm._raw(w.dim, deg, out)


def _right_drop(idx: Index, pos: int) -> Tuple[int, Index]:
    # right derivative d/dtheta_{idx[pos]}: move that odd variable to the end
    sign = -1 if (len(idx) - 1 - pos) % 2 else 1
    return sign, idx[:pos] + idx[pos + 1:]


def _half_bracket(P: MultivectorField, Q: MultivectorField, out: Dict[Index, RationalFunction], outer_sign: int):
    """Accumulate outer_sign * sum_i (P <-d/dtheta_i) ^ (dQ/dx_i) into ``out``."""
    dq_cache: Dict[Tuple[Index, int], RationalFunction] = {}
    for kp, vp in P.terms.items():
        for pos, i in enumerate(kp):
            s1, rest = _right_drop(kp, pos)
            for kq, vq in Q.terms.items():
                s2, key = _merge(rest, kq)
                if not s2:
                    continue
                ck = (kq, i)
                if ck not in dq_cache:
                    dq_cache[ck] = vq.partial(i)
                d = dq_cache[ck]
                if d.is_zero():
                    continue
                term = vp * d
                if s1 * s2 * outer_sign < 0:
                    term = -term
                out[key] = out[key] + term if key in out else term


def schouten_bracket(P: MultivectorField, Q: MultivectorField) -> MultivectorField:
    """Schouten-Nijenhuis bracket of homogeneous multivector fields.

    In odd coordinates theta_i = d_i:
    [P, Q] = sum_i P<-d_theta_i ^ d_x_i Q - (-1)^{(p-1)(q-1)} Q<-d_theta_i ^ d_x_i P.
    """
    if not isinstance(P, MultivectorField) or not isinstance(Q, MultivectorField):
        raise KindMismatch("schouten_bracket expects multivector fields")
    if P.dim != Q.dim:
        raise DimensionMismatch(f"dimension mismatch: {P.dim} vs {Q.dim}")
    p, q = P.degree, Q.degree
    deg = p + q - 1
    if deg < 0:
        return MultivectorField.zero(P.dim, 0)
    if deg > P.dim:
        return MultivectorField.zero(P.dim, deg)
    out: Dict[Index, RationalFunction] = {}
    _half_bracket(P, Q, out, 1)
    _half_bracket(Q, P, out, -1 if ((p - 1) * (q - 1)) % 2 == 0 else 1)
    return MultivectorField._raw(P.dim, deg, out)


def lie_derivative(X: MultivectorField, T: GradedField) -> GradedField:
    if not isinstance(X, MultivectorField) or X.degree != 1:
        raise DegreeMismatch("lie_derivative needs a vector field as first argument")
    if isinstance(T, DifferentialForm):
        if T.degree == 0:
            return DifferentialForm.function(apply_vector(X, T.as_function()), T.dim)
        first = interior_product(X, de_rham_d(T))
        second = de_rham_d(interior_product(X, T))
        return first + second
    return schouten_bracket(X, T)


# -- index raising / lowering -------------------------------------------------

class LinearMapField:
    """n x n matrix of rational functions; ``out[i] = sum_j m[i][j] * in[j]``."""

    TAGS = ("forms->vectors", "vectors->forms", "vectors->vectors", "forms->forms")

    __slots__ = ("dim", "matrix", "tag")

    def __init__(self, dim: int, matrix: Sequence[Sequence], tag: str):
        if tag not in self.TAGS:
            raise ExteriorError(f"unknown linear-map tag {tag!r}")
        if len(matrix) != dim or any(len(row) != dim for row in matrix):
            raise DimensionMismatch(f"matrix must be {dim}x{dim}")
        self.dim = dim
        self.matrix = [[to_ratfun(c, dim) for c in row] for row in matrix]
        self.tag = tag

    @property
    def source(self) -> str:
        return self.tag.split("->")[0]

    @property
    def target(self) -> str:
        return self.tag.split("->")[1]

    def entry(self, i: int, j: int) -> RationalFunction:
        """1-based entry."""
        return self.matrix[i - 1][j - 1]

    def __call__(self, arg: GradedField) -> GradedField:
        want = DifferentialForm if self.source == "forms" else MultivectorField
        if not isinstance(arg, want) or arg.degree != 1:
            raise KindMismatch(f"map {self.tag} cannot act on a degree-{arg.degree} {arg.kind}")
        if arg.dim != self.dim:
            raise DimensionMismatch(f"dimension mismatch: {arg.dim} vs {self.dim}")
        comps = []
        for i in range(self.dim):
            total = RationalFunction.zero(self.dim)
            for (j,), v in arg.terms.items():
                m = self.matrix[i][j - 1]
                if not m.is_zero():
                    total = total + m * v
            comps.append(total)
        if self.target == "vectors":
            return vector_field(self.dim, comps)
        return one_form(self.dim, comps)

    def compose(self, other: "LinearMapField") -> "LinearMapField":
        """self o other."""
        if other.target != self.source:
            raise KindMismatch(f"cannot compose {self.tag} after {other.tag}")
        m = matmul(self.matrix, other.matrix)
        return LinearMapField(self.dim, m, f"{other.source}->{self.target}")

    def transpose_matrix(self) -> List[List[RationalFunction]]:
        return [list(r) for r in zip(*self.matrix)]

    def evaluate(self, point: Sequence[float], eps: float = 1e-12):
        import numpy as np

        return np.array([[c.evaluate(point, eps) for c in row] for row in self.matrix], dtype=float)

    def is_zero(self) -> bool:
        return all(c.is_zero() for row in self.matrix for c in row)


def matmul(a: Sequence[Sequence[RationalFunction]], b: Sequence[Sequence[RationalFunction]]):
    n = len(a)
    out = []
    for i in range(n):
        row = []
        for j in range(len(b[0])):
            total = None
            for k in range(len(b)):
                if a[i][k].is_zero() or b[k][j].is_zero():
                    continue
                t = a[i][k] * b[k][j]
                total = t if total is None else total + t
            row.append(total if total is not None else RationalFunction.zero(a[0][0].dim))
        out.append(row)
    return out


def determinant(m: Sequence[Sequence[RationalFunction]]) -> RationalFunction:
    """Exact determinant by cofactor expansion with memoised minors (no division)."""
    n = len(m)
    if n == 0:
        raise ExteriorError("empty matrix")
    dim = m[0][0].dim
    memo: Dict[Tuple[int, ...], RationalFunction] = {}

    def minor(row: int, cols: Tuple[int, ...]) -> RationalFunction:
        if row == n:
            return RationalFunction.one(dim)
        if cols in memo:
            return memo[cols]
        total = RationalFunction.zero(dim)
        for pos, c in enumerate(cols):
            entry = m[row][c]
            if entry.is_zero():
                continue
            sub = minor(row + 1, cols[:pos] + cols[pos + 1:])
            if sub.is_zero():
                continue
            term = entry * sub
            total = total - term if pos % 2 else total + term
        memo[cols] = total
        return total

    return minor(0, tuple(range(n)))


def adjugate(m: Sequence[Sequence[RationalFunction]]) -> List[List[RationalFunction]]:
    n = len(m)
    adj = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            sub = [[m[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            cof = determinant(sub) if sub else RationalFunction.one(m[0][0].dim)
            adj[j][i] = -cof if (i + j) % 2 else cof
    return adj


def bivector_matrix(pi: MultivectorField) -> List[List[RationalFunction]]:
    """Full antisymmetric matrix P with P[i][j] = pi(dx_{i+1}, dx_{j+1})."""
    if pi.degree != 2:
        raise DegreeMismatch("expected a bivector")
    return _antisym_matrix(pi)


def two_form_matrix(B: DifferentialForm) -> List[List[RationalFunction]]:
    """Full antisymmetric matrix with entry [i][j] = B(d_{i+1}, d_{j+1})."""
    if B.degree != 2:
        raise DegreeMismatch("expected a 2-form")
    return _antisym_matrix(B)


def _antisym_matrix(T: GradedField):
    n = T.dim
    zero = RationalFunction.zero(n)
    m = [[zero] * n for _ in range(n)]
    for (i, j), v in T.terms.items():
        m[i - 1][j - 1] = v
        m[j - 1][i - 1] = -v
    return m


def bivector_from_matrix(m: Sequence[Sequence[RationalFunction]]) -> MultivectorField:
    n = len(m)
    return MultivectorField(n, 2, {(i + 1, j + 1): m[i][j] for i in range(n) for j in range(i + 1, n)})


def two_form_from_matrix(m: Sequence[Sequence[RationalFunction]]) -> DifferentialForm:
    n = len(m)
    return DifferentialForm(n, 2, {(i + 1, j + 1): m[i][j] for i in range(n) for j in range(i + 1, n)})


def sharp(pi: MultivectorField) -> LinearMapField:
    """pi~ : T*M -> TM, alpha |-> pi(alpha, .)."""
    P = bivector_matrix(pi)
    return LinearMapField(pi.dim, [list(r) for r in zip(*P)], "forms->vectors")


def flat(B: DifferentialForm) -> LinearMapField:
    """B~ : TM -> T*M, X |-> B(X, .)."""
    Bm = two_form_matrix(B)
    return LinearMapField(B.dim, [list(r) for r in zip(*Bm)], "vectors->forms")


def raise_all(pi: MultivectorField, phi: DifferentialForm) -> MultivectorField:
    """(wedge^k pi~)(phi): the k-vector (a1..ak) |-> phi(pi~ a1, ..., pi~ ak)."""
    if pi.degree != 2:
        raise DegreeMismatch("raise_all expects a bivector")
    if pi.dim != phi.dim:
        raise DimensionMismatch(f"dimension mismatch: {pi.dim} vs {phi.dim}")
    n, k = pi.dim, phi.degree
    P = bivector_matrix(pi)
    out: Dict[Index, RationalFunction] = {}
    for I in combinations(range(1, n + 1), k):
        total = RationalFunction.zero(n)
        for J, c in phi.terms.items():
            # phi_J * det(P[I, J]); sharp(pi)(dx_i) has components P[i][.]
            sub = [[P[i - 1][j - 1] for j in J] for i in I]
            if all(e.is_zero() for row in sub for e in row):
                continue
            det = determinant(sub) if k else RationalFunction.one(n)
            if not det.is_zero():
                total = total + c * det
        if not total.is_zero():
            out[I] = total
    return MultivectorField._raw(n, k, out)


def raise_two_of_three(pi: MultivectorField, phi: DifferentialForm) -> List[Tuple[MultivectorField, DifferentialForm]]:
    """(wedge^2 pi~ (x) 1)(phi) as pairs (beta_k, dx_k) with
    beta_k(a1, a2) = phi(pi~ a1, pi~ a2, d_k)."""
    if phi.degree != 3:
        raise DegreeMismatch("raise_two_of_three expects a 3-form")
    if pi.dim != phi.dim:
        raise DimensionMismatch(f"dimension mismatch: {pi.dim} vs {phi.dim}")
    n = pi.dim
    pairs = []
    for k in range(1, n + 1):
        # the 2-form phi(., ., d_k)
        terms: Dict[Index, RationalFunction] = {}
        for J, c in phi.terms.items():
            if k not in J:
                continue
            pos = J.index(k)
            rest = J[:pos] + J[pos + 1:]
            if (2 - pos) % 2:
                c = -c
            terms[rest] = terms[rest] + c if rest in terms else c
        partial_phi = DifferentialForm._raw(n, 2, terms)
        if partial_phi.is_zero():
            continue
        beta = raise_all(pi, partial_phi)
        if not beta.is_zero():
            pairs.append((beta, coordinate_form(n, k)))
    return pairs


def contract_pairs(pairs: List[Tuple[MultivectorField, DifferentialForm]], X: MultivectorField) -> MultivectorField:
    """sum_k beta_k * xi_k(X) for a section of wedge^2 TM (x) T*M stored as pairs."""
    n = X.dim
    total = MultivectorField.zero(n, 2)
    for beta, xi in pairs:
        c = evaluate_on(xi, X)
        if not c.is_zero():
            total = total + beta.scale(c)
    return total


def derivation_from_pairs(pairs, T: MultivectorField) -> MultivectorField:
    """Degree +1 operator on multivectors: sum_k beta_k ^ i_{xi_k} T."""
    n = T.dim
    if T.degree == 0:
        return MultivectorField.zero(n, 1)
    total = MultivectorField.zero(n, T.degree + 1)
    for beta, xi in pairs:
        c = contract_covector(xi, T)
        if not c.is_zero():
            total = total + wedge(beta, c)
    return total
