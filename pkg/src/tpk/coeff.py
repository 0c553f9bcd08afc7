"""Exact coefficient ring: rationals, multivariate polynomials, rational functions.

Rational functions are kept as unreduced ``num/den`` pairs; equality is decided
by cross-multiplication, so no multivariate gcd is ever needed.
"""

from __future__ import annotations

import os
from operator import add
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Sequence, Tuple, Union

from gmpy2 import mpq

Exponent = Tuple[int, ...]
Rational = type(mpq())
Scalar = Union[int, Fraction, Rational]
RATIONAL_TYPES = (int, Fraction, Rational)

DEFAULT_DEGREE_CAP = 64


class CoeffError(ValueError):
    """Base class for coefficient-ring errors."""


class DimensionMismatch(CoeffError):
    pass


class DegreeCapExceeded(CoeffError):
    pass


class PoleError(CoeffError):
    """Raised when a rational function is evaluated on (or near) its pole set."""


def _cap_from_env() -> int:
    raw = os.environ.get("TPK_DEGREE_CAP")
    if raw is None:
        return DEFAULT_DEGREE_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise CoeffError(f"TPK_DEGREE_CAP must be an integer, got {raw!r}") from None
    if cap < 1:
        raise CoeffError("TPK_DEGREE_CAP must be positive")
    return cap


_degree_cap = _cap_from_env()


def degree_cap() -> int:
    return _degree_cap


def set_degree_cap(cap: int | None) -> int:
    """Set the total-degree guardrail; ``None`` re-reads ``TPK_DEGREE_CAP``. Returns the old cap."""
    global _degree_cap
    old = _degree_cap
    _degree_cap = _cap_from_env() if cap is None else int(cap)
    return old


def as_rational(value) -> Rational:
    """Coerce int, Fraction, mpq or a "p/q" string to an exact rational."""
    if isinstance(value, Rational):
        return value
    if isinstance(value, bool):
        return mpq(int(value))
    if isinstance(value, int):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        return mpq(Fraction(value.strip()))
    raise TypeError(f"cannot use {type(value).__name__} as an exact rational")


def rational_to_str(q) -> str:
    return f"{q.numerator}/{q.denominator}"


class Polynomial:
    """Sparse polynomial in ``dim`` variables with rational coefficients.

    ``terms`` maps exponent tuples to nonzero rational (``mpq``) coefficients.
    Instances are treated as immutable.
    """

    __slots__ = ("dim", "terms", "_hash")

    def __init__(self, dim: int, terms: Mapping[Exponent, Scalar] | None = None):
        if dim < 0:
            raise CoeffError("dim must be non-negative")
        self.dim = dim
        clean: Dict[Exponent, Rational] = {}
        if terms:
            for exp, c in terms.items():
                exp = tuple(int(e) for e in exp)
                if len(exp) != dim:
                    raise DimensionMismatch(f"exponent {exp} has length {len(exp)}, expected {dim}")
                if any(e < 0 for e in exp):
                    raise CoeffError(f"negative exponent in {exp}")
                c = as_rational(c)
                if c:
                    clean[exp] = clean.get(exp, mpq(0)) + c
                    if not clean[exp]:
                        del clean[exp]
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, dim: int, terms: Dict[Exponent, Rational]) -> "Polynomial":
        # trusted constructor: terms already pruned and well-formed
        p = cls.__new__(cls)
        p.dim = dim
        p.terms = terms
        p._hash = None
        return p

    @classmethod
    def zero(cls, dim: int) -> "Polynomial":
        return cls._raw(dim, {})

    @classmethod
    def constant(cls, dim: int, c: Scalar) -> "Polynomial":
        c = as_rational(c)
        return cls._raw(dim, {(0,) * dim: c} if c else {})

    @classmethod
    def one(cls, dim: int) -> "Polynomial":
        return cls.constant(dim, 1)

    @classmethod
    def variable(cls, dim: int, i: int) -> "Polynomial":
        """The coordinate function x_i (1-based, as in the JSON encoding)."""
        if not 1 <= i <= dim:
            raise CoeffError(f"variable index {i} out of range 1..{dim}")
        exp = [0] * dim
        exp[i - 1] = 1
        return cls._raw(dim, {tuple(exp): mpq(1)})

    @classmethod
    def monomial(cls, exp: Sequence[int], c: Scalar = 1) -> "Polynomial":
        return cls(len(exp), {tuple(exp): c})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_value(self) -> Rational:
        if not self.is_constant():
            raise CoeffError("polynomial is not constant")
        return self.terms.get((0,) * self.dim, mpq(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def _check(self, other: "Polynomial"):
        if self.dim != other.dim:
            raise DimensionMismatch(f"dimension mismatch: {self.dim} vs {other.dim}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, RATIONAL_TYPES):
            return Polynomial.constant(self.dim, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v += c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return Polynomial._raw(self.dim, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.dim, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, RATIONAL_TYPES):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.terms or not other.terms:
            return Polynomial._raw(self.dim, {})
        if self.total_degree() + other.total_degree() > _degree_cap:
            raise DegreeCapExceeded(
                f"product degree {self.total_degree() + other.total_degree()} exceeds cap {_degree_cap}"
            )
        out: Dict[Exponent, Rational] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(map(add, e1, e2))
                v = out.get(e)
                out[e] = c1 * c2 if v is None else v + c1 * c2
        return Polynomial._raw(self.dim, {e: c for e, c in out.items() if c})

    __rmul__ = __mul__

    def scale(self, c: Scalar) -> "Polynomial":
        c = as_rational(c)
        if not c:
            return Polynomial._raw(self.dim, {})
        if c == 1:
            return self
        return Polynomial._raw(self.dim, {e: v * c for e, v in self.terms.items()})

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise CoeffError("negative power of a polynomial")
        result = Polynomial.one(self.dim)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.dim == other.dim and self.terms == other.terms
        if isinstance(other, RATIONAL_TYPES):
            return self.terms == Polynomial.constant(self.dim, other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.dim, frozenset(self.terms.items())))
        return self._hash

    def partial(self, i: int) -> "Polynomial":
        """Formal partial derivative in x_i (1-based)."""
        if not 1 <= i <= self.dim:
            raise CoeffError(f"variable index {i} out of range 1..{self.dim}")
        k = i - 1
        out: Dict[Exponent, Rational] = {}
        for e, c in self.terms.items():
            if e[k]:
                ne = e[:k] + (e[k] - 1,) + e[k + 1:]
                out[ne] = c * e[k]
        return Polynomial._raw(self.dim, out)

    def evaluate(self, point: Sequence) -> float:
        if len(point) != self.dim:
            raise DimensionMismatch(f"point has {len(point)} coordinates, expected {self.dim}")
        total = 0.0
        for e, c in self.terms.items():
            term = float(c)
            for x, k in zip(point, e):
                if k:
                    term *= x ** k
            total += term
        return total

    def evaluate_exact(self, point: Sequence) -> Rational:
        if len(point) != self.dim:
            raise DimensionMismatch(f"point has {len(point)} coordinates, expected {self.dim}")
        pt = [as_rational(x) for x in point]
        total = mpq(0)
        for e, c in self.terms.items():
            term = c
            for x, k in zip(pt, e):
                if k:
                    term *= x ** k
            total += term
        return total

    def substitute_square(self, i: int, replacement: "Polynomial") -> "Polynomial":
        """Rewrite every x_i**2 as ``replacement`` (which must not involve x_i).

        Odd powers keep a single factor of x_i. Used to restrict a polynomial
        to a quadric such as r**2 = const.
        """
        self._check(replacement)
        k = i - 1
        if any(e[k] for e in replacement.terms):
            raise CoeffError(f"replacement must not involve x_{i}")
        out = Polynomial.zero(self.dim)
        cache: Dict[int, Polynomial] = {}
        for e, c in self.terms.items():
            half, odd = divmod(e[k], 2)
            if half not in cache:
                cache[half] = replacement ** half
            rest = list(e)
            rest[k] = odd
            out = out + Polynomial._raw(self.dim, {tuple(rest): c}) * cache[half]
        return out

    def leading(self) -> Tuple[Exponent, Rational]:
        # lex order on exponent tuples
        e = max(self.terms)
        return e, self.terms[e]

    def divide_exact(self, divisor: "Polynomial") -> "Polynomial | None":
        """Return q with self == q*divisor, or None if divisor does not divide self.

        Single-divisor multivariate division in lex order; for a principal ideal
        the remainder is zero exactly when the division is exact.
        """
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        if self.is_zero():
            return self
        lead_e, lead_c = divisor.leading()
        rem = dict(self.terms)
        quot: Dict[Exponent, Rational] = {}
        while rem:
            e = max(rem)
            if any(a < b for a, b in zip(e, lead_e)):
                return None
            qe = tuple(a - b for a, b in zip(e, lead_e))
            qc = rem[e] / lead_c
            quot[qe] = qc
            for de, dc in divisor.terms.items():
                te = tuple(a + b for a, b in zip(qe, de))
                v = rem.get(te, mpq(0)) - qc * dc
                if v:
                    rem[te] = v
                else:
                    rem.pop(te, None)
        return Polynomial._raw(self.dim, quot)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "terms": [{"exp": list(e), "coef": rational_to_str(c)} for e, c in sorted(self.terms.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Polynomial":
        dim = int(data["dim"])
        terms: Dict[Exponent, Rational] = {}
        for t in data.get("terms", []):
            exp = tuple(int(e) for e in t["exp"])
            terms[exp] = terms.get(exp, mpq(0)) + as_rational(t["coef"])
        return cls(dim, terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), reverse=True):
            mono = "*".join(
                f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def poly_arith(p: Polynomial, q: Polynomial, op: str) -> Polynomial:
    if p.dim != q.dim:
        raise DimensionMismatch(f"dimension mismatch: {p.dim} vs {q.dim}")
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    raise ValueError(f"unknown polynomial operation {op!r}")


def partial_derivative(p: Polynomial, i: int) -> Polynomial:
    return p.partial(i)


class RationalFunction:
    """Quotient ``num/den`` of polynomials, never reduced to lowest terms."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None:
            den = Polynomial.one(num.dim)
        if num.dim != den.dim:
            raise DimensionMismatch(f"dimension mismatch: {num.dim} vs {den.dim}")
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if den.is_constant():
            c = den.constant_value()
            if c != 1:
                num = num.scale(1 / c)
                den = Polynomial.one(num.dim)
        elif num.is_zero():
            den = Polynomial.one(num.dim)
        self.num = num
        self.den = den

    @property
    def dim(self) -> int:
        return self.num.dim

    @classmethod
    def zero(cls, dim: int) -> "RationalFunction":
        return cls(Polynomial.zero(dim))

    @classmethod
    def one(cls, dim: int) -> "RationalFunction":
        return cls(Polynomial.one(dim))

    @classmethod
    def constant(cls, dim: int, c: Scalar) -> "RationalFunction":
        return cls(Polynomial.constant(dim, c))

    @classmethod
    def variable(cls, dim: int, i: int) -> "RationalFunction":
        return cls(Polynomial.variable(dim, i))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def _coerce(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            if other.dim != self.dim:
                raise DimensionMismatch(f"dimension mismatch: {self.dim} vs {other.dim}")
            return other
        if isinstance(other, Polynomial):
            if other.dim != self.dim:
                raise DimensionMismatch(f"dimension mismatch: {self.dim} vs {other.dim}")
            return RationalFunction(other)
        if isinstance(other, RATIONAL_TYPES):
            return RationalFunction.constant(self.dim, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            return _make(self.num + other.num, self.den)
        # cheap common-denominator shortcut when one denominator divides the other
        q = self.den.divide_exact(other.den)
        if q is not None:
            return _make(self.num + other.num * q, self.den)
        q = other.den.divide_exact(self.den)
        if q is not None:
            return _make(self.num * q + other.num, other.den)
        return _make(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._fast(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, RATIONAL_TYPES):
            return RationalFunction._fast(self.num.scale(other), self.den)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.num.is_zero() or other.num.is_zero():
            return RationalFunction.zero(self.dim)
        num_a, den_a, num_b, den_b = self.num, self.den, other.num, other.den
        # cancel a denominator against the other numerator when it divides exactly
        if not den_b.is_constant():
            q = num_a.divide_exact(den_b)
            if q is not None:
                num_a, den_b = q, Polynomial.one(self.dim)
        if not den_a.is_constant():
            q = num_b.divide_exact(den_a)
            if q is not None:
                num_b, den_a = q, Polynomial.one(self.dim)
        return _make(num_a * num_b, _den_mul(den_a, den_b))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return self * RationalFunction(other.den, other.num)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, k: int):
        if k < 0:
            return RationalFunction(self.den, self.num) ** (-k)
        return _make(self.num ** k, self.den ** k)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return ratfun_eq(self, other)

    __hash__ = None  # equality is cross-multiplication; no canonical hash

    def partial(self, i: int) -> "RationalFunction":
        dn = self.num.partial(i)
        if self.den.is_constant():
            return RationalFunction._fast(dn, self.den)
        dd = self.den.partial(i)
        if dd.is_zero():
            return _make(dn, self.den)
        return _make(dn * self.den - self.num * dd, self.den * self.den)

    def evaluate(self, point: Sequence, eps: float = 1e-12) -> float:
        d = self.den.evaluate(point)
        if abs(d) < eps:
            raise PoleError(f"denominator {d!r} vanishes at {list(point)}")
        return self.num.evaluate(point) / d

    def evaluate_exact(self, point: Sequence) -> Rational:
        d = self.den.evaluate_exact(point)
        if d == 0:
            raise PoleError(f"denominator vanishes at {list(point)}")
        return self.num.evaluate_exact(point) / d

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data) -> "RationalFunction":
        if "num" in data:
            return cls(Polynomial.from_json(data["num"]), Polynomial.from_json(data["den"]))
        return cls(Polynomial.from_json(data))

    @classmethod
    def _fast(cls, num: Polynomial, den: Polynomial) -> "RationalFunction":
        r = cls.__new__(cls)
        r.num = num
        r.den = den if not num.is_zero() else Polynomial.one(num.dim)
        return r

    def __repr__(self):
        if self.den.is_constant():
            return repr(self.num)
        return f"({self.num!r})/({self.den!r})"


def _den_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    if a.is_constant():
        return b.scale(a.constant_value())
    if b.is_constant():
        return a.scale(b.constant_value())
    return a * b


def _make(num: Polynomial, den: Polynomial) -> RationalFunction:
    if num.is_zero():
        return RationalFunction.zero(num.dim)
    if den.is_constant():
        c = den.constant_value()
        return RationalFunction._fast(num if c == 1 else num.scale(1 / c), Polynomial.one(num.dim))
    # cancel the whole denominator when it divides the numerator
    q = num.divide_exact(den)
    if q is not None:
        return RationalFunction._fast(q, Polynomial.one(num.dim))
    return RationalFunction._fast(num, den)


def ratfun_eq(a: RationalFunction, b: RationalFunction) -> bool:
    if a.dim != b.dim:
        raise DimensionMismatch(f"dimension mismatch: {a.dim} vs {b.dim}")
    if a.den == b.den:
        return a.num == b.num
    return a.num * b.den == b.num * a.den


def evaluate(f: RationalFunction, point: Sequence, eps: float = 1e-12) -> float:
    return f.evaluate(point, eps)


def to_ratfun(value, dim: int) -> RationalFunction:
    if isinstance(value, RationalFunction):
        if value.dim != dim:
            raise DimensionMismatch(f"dimension mismatch: {value.dim} vs {dim}")
        return value
    if isinstance(value, Polynomial):
        return RationalFunction(value)
    return RationalFunction.constant(dim, as_rational(value))


def coordinates(dim: int) -> list:
    """Coordinate functions x_1..x_dim as rational functions."""
    return [RationalFunction.variable(dim, i) for i in range(1, dim + 1)]


def poly_from_dict(dim: int, terms: Mapping[Iterable[int], Scalar]) -> Polynomial:
    return Polynomial(dim, {tuple(k): v for k, v in terms.items()})
