"""Exact twisted Courant algebroids, Dirac structures and twisted Poisson geometry."""

from .coeff import Polynomial, RationalFunction, coordinates, ratfun_eq
from .courant import CourantSection, TwistedCourantAlgebroid, verify_axioms
from .dirac import CALIBRATION, gauge_bivector, is_phi_poisson
from .exterior import DifferentialForm, MultivectorField, schouten_bracket

__version__ = "0.1.0"

__all__ = [
    "CALIBRATION",
    "CourantSection",
    "DifferentialForm",
    "MultivectorField",
    "Polynomial",
    "RationalFunction",
    "TwistedCourantAlgebroid",
    "coordinates",
    "gauge_bivector",
    "is_phi_poisson",
    "ratfun_eq",
    "schouten_bracket",
    "verify_axioms",
]
