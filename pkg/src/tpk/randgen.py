"""Seeded generators of random polynomial data for the randomized verification suites."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from .coeff import Polynomial, RationalFunction
from .exterior import DifferentialForm, MultivectorField, de_rham_d


def rng_from(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def _exponents(dim: int, max_degree: int):
    if dim == 0:
        yield ()
        return
    for first in range(max_degree + 1):
        for rest in _exponents(dim - 1, max_degree - first):
            yield (first,) + rest


def random_polynomial(rng: random.Random, dim: int, max_degree: int = 2, density: float = 0.5,
                      coef_range: int = 3) -> Polynomial:
    terms = {}
    for exp in _exponents(dim, max_degree):
        if rng.random() < density:
            c = rng.randint(-coef_range, coef_range)
            if c:
                terms[exp] = Fraction(c)
    return Polynomial(dim, terms)


def random_function(rng, dim: int, max_degree: int = 2, density: float = 0.5) -> RationalFunction:
    return RationalFunction(random_polynomial(rng, dim, max_degree, density))


def random_multivector(rng, dim: int, degree: int, max_degree: int = 2, density: float = 0.4) -> MultivectorField:
    return MultivectorField(dim, degree, {
        idx: random_polynomial(rng, dim, max_degree, density) for idx in combinations(range(1, dim + 1), degree)
    })


def random_form(rng, dim: int, degree: int, max_degree: int = 2, density: float = 0.4) -> DifferentialForm:
    return DifferentialForm(dim, degree, {
        idx: random_polynomial(rng, dim, max_degree, density) for idx in combinations(range(1, dim + 1), degree)
    })


def random_closed_form(rng, dim: int, degree: int, max_degree: int = 2, density: float = 0.4) -> DifferentialForm:
    """An exact (hence closed) form d(eta) with eta of coefficient degree <= max_degree + 1."""
    if degree == 0:
        return DifferentialForm.zero(dim, 0)
    eta = random_form(rng, dim, degree - 1, max_degree + 1, density)
    return de_rham_d(eta)
