"""Verification suites behind the command line: each returns a VerificationReport."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from . import liegroup as lg
from .coeff import PoleError, Polynomial, RationalFunction, as_rational, coordinates, rational_to_str
from .courant import CourantSection, TwistedCourantAlgebroid, random_section, verify_axioms
from .dirac import (
    TwoFormGraph,
    d_pi_phi,
    lie_poisson_B,
    gauge_bivector,
    graph_closed_under_bracket,
    is_phi_closed,
    is_phi_poisson,
    lie_poisson_so3,
    poisson_bracket,
    rank_at,
    twisted_jacobiator,
)
from .exterior import (
    DifferentialForm,
    GradedField,
    MultivectorField,
    coordinate_vector,
    de_rham_d,
)
from .randgen import random_function, rng_from

DEFAULT_SEED = 42


# -- reports -----------------------------------------------------------------------

def symbolic_summary(obj) -> dict:
    """Term count and largest numerator degree of a symbolic residual."""
    if isinstance(obj, RationalFunction):
        coefs = [obj]
    elif isinstance(obj, GradedField):
        coefs = list(obj.terms.values())
    elif hasattr(obj, "X") and hasattr(obj, "xi"):
        coefs = list(obj.X.terms.values()) + list(obj.xi.terms.values())
    else:
        raise TypeError(f"cannot summarise {type(obj).__name__}")
    coefs = [c for c in coefs if not c.is_zero()]
    return {
        "terms": sum(len(c.num.terms) for c in coefs),
        "max_degree": max((c.num.total_degree() for c in coefs), default=0),
    }


@dataclass
class Check:
    id: str
    status: str
    residual: dict = field(default_factory=dict)
    witness: Optional[dict] = None
    note: str = ""

    def to_json(self) -> dict:
        out = {"id": self.id, "status": self.status, "residual": self.residual}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.note:
            out["note"] = self.note
        return out


def status(ok: bool) -> str:
    return "pass" if ok else "fail"


@dataclass
class VerificationReport:
    suite: str
    seed: int
    checks: List[Check] = field(default_factory=list)
    info: dict = field(default_factory=dict)
    timing: float = 0.0

    @property
    def status(self) -> str:
        return "pass" if all(c.status != "fail" for c in self.checks) else "fail"

    @property
    def ok(self) -> bool:
        return self.status == "pass"

    def add(self, check: Check):
        self.checks.append(check)

    def check(self, cid: str) -> Check:
        for c in self.checks:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def to_json(self, timing: bool = True) -> dict:
        out = {
            "suite": self.suite,
            "status": self.status,
            "seed": self.seed,
            "checks": [c.to_json() for c in sorted(self.checks, key=lambda c: c.id)],
        }
        if self.info:
            out["info"] = self.info
        if timing:
            out["timing_seconds"] = round(self.timing, 3)
        return out

    def to_text(self) -> str:
        lines = [f"{self.suite}: {self.status.upper()} (seed {self.seed})"]
        for c in sorted(self.checks, key=lambda c: c.id):
            extra = f"  {c.note}" if c.note else ""
            lines.append(f"  [{c.status}] {c.id} {c.residual}{extra}")
        for k, v in sorted(self.info.items()):
            lines.append(f"  {k}: {_short(v)}")
        return "\n".join(lines)


def _short(value, width: int = 160) -> str:
    """Text reports abbreviate long values; the JSON report keeps them whole."""
    text = str(value)
    return text if len(text) <= width else text[: width - 3] + "..."


def _timed(fn: Callable[..., VerificationReport]):
    def run(*args, **kwargs):
        start = time.perf_counter()
        report = fn(*args, **kwargs)
        report.timing = time.perf_counter() - start
        return report

    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


def _exact_check(cid: str, residual, witness=None, note: str = "") -> Check:
    ok = residual.is_zero()
    return Check(cid, status(ok), symbolic_summary(residual), None if ok else witness, note)


# -- verify ----------------------------------------------------------------------------

@_timed
def verify_suite(graph, seed: int = DEFAULT_SEED, trials: int = 5) -> VerificationReport:
    """Twisted Poisson (or twisted closed 2-form) checks on one structure."""
    report = VerificationReport("verify", seed)
    rng = rng_from(seed)
    n, phi = graph.dim, graph.phi
    closure = graph_closed_under_bracket(graph, trials=trials, seed=seed)
    report.add(Check("graph-closed", status(closure.closed), {"checked": closure.checked}, closure.witness))
    if isinstance(graph, TwoFormGraph):
        ok, defect = is_phi_closed(graph.omega, phi)
        report.add(_exact_check("phi-closed", defect, {"omega": graph.omega.to_json()}))
        return report
    pi = graph.pi
    ok, defect = is_phi_poisson(pi, phi)
    report.add(_exact_check("phi-poisson", defect, {"pi": pi.to_json(), "phi": phi.to_json()}))
    x = coordinates(n)
    triples = [(x[i], x[j], x[k]) for i in range(n) for j in range(i + 1, n) for k in range(j + 1, n)]
    triples += [tuple(random_function(rng, n, 2) for _ in range(3)) for _ in range(trials)]
    jac_fail = None
    for t in triples:
        r = twisted_jacobiator(pi, phi, *t)
        if not r.is_zero():
            jac_fail = (t, r)
            break
    if jac_fail:
        t, r = jac_fail
        report.add(Check("twisted-jacobi", "fail", symbolic_summary(r), {"f": [f.to_json() for f in t]}))
    else:
        report.add(Check("twisted-jacobi", "pass", {"triples": len(triples)}))
    sq_fail = None
    probes = [MultivectorField.function(xi, n) for xi in x] + [coordinate_vector(n, i) for i in range(1, n + 1)]
    for T in probes:
        r = d_pi_phi(pi, phi, d_pi_phi(pi, phi, T))
        if not r.is_zero():
            sq_fail = (T, r)
            break
    if sq_fail:
        report.add(Check("d-squared", "fail", symbolic_summary(sq_fail[1]), {"T": sq_fail[0].to_json()}))
    else:
        report.add(Check("d-squared", "pass", {"inputs": len(probes)}))
    return report


# -- axioms ---------------------------------------------------------------------------

@_timed
def axioms_suite(dim: int, phi: Optional[DifferentialForm] = None, trials: int = 20,
                 seed: int = DEFAULT_SEED, max_degree: int = 2) -> VerificationReport:
    """The five Courant axioms on random polynomial section triples."""
    report = VerificationReport("axioms", seed)
    if phi is None:
        phi = DifferentialForm.zero(dim, 3)
    closed = de_rham_d(phi).is_zero()
    report.info["phi_closed"] = closed
    E = TwistedCourantAlgebroid(dim, phi, check_closed=False)
    rng = rng_from(seed)
    failures = {k: None for k in range(1, 6)}
    for t in range(trials):
        es = [random_section(rng, dim, max_degree) for _ in range(3)]
        f = random_function(rng, dim, max_degree)
        res = verify_axioms(E, *es, f)
        for k, ok in res.passed.items():
            if not ok and failures[k] is None:
                failures[k] = (t, es, f, res.residuals[k])
    for k in range(1, 6):
        fail = failures[k]
        if fail is None:
            report.add(Check(f"axiom-{k}", "pass", {"trials": trials}))
        else:
            t, es, f, r = fail
            witness = {"trial": t, "sections": [e.to_json() for e in es], "f": f.to_json()}
            report.add(Check(f"axiom-{k}", "fail", symbolic_summary(r), witness))
    return report


def axiom_one_witness(phi: DifferentialForm) -> dict:
    """Coordinate sections exhibiting the Jacobi failure of a non-closed twist."""
    n = phi.dim
    E = TwistedCourantAlgebroid(n, phi, check_closed=False)
    vecs = [CourantSection.from_vector(coordinate_vector(n, i)) for i in range(1, n + 1)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                res = verify_axioms(E, vecs[i], vecs[j], vecs[k], 0)
                if not res.passed[1]:
                    return {"indices": [i + 1, j + 1, k + 1], "residual": res.residuals[1].to_json()}
    return {}


# -- gauge -----------------------------------------------------------------------------

def gauge_suite(pi: MultivectorField, phi: DifferentialForm, B: DifferentialForm,
                seed: int = DEFAULT_SEED):
    """Returns ``(report, GaugeResult)``."""
    start = time.perf_counter()
    report = VerificationReport("gauge", seed)
    res = gauge_bivector(pi, B)
    report.info["result"] = res.to_json()
    if res.singular:
        report.add(Check("bivector", "skip", {}, note="det(1 + B~ pi~) vanishes identically; the gauged graph "
                                                     "is a Dirac structure but not a bivector graph"))
        report.timing = time.perf_counter() - start
        return report, res
    report.add(Check("bivector", "pass", {"det": repr(res.det)}))
    target = phi - de_rham_d(B)
    ok, defect = is_phi_poisson(res.pi_prime, target)
    report.add(_exact_check("phi-poisson-after", defect, {"pi_prime": res.pi_prime.to_json()}))
    report.info["singular_locus"] = {"polynomial": repr(res.det.num), "constant": res.det.num.is_constant()}
    report.timing = time.perf_counter() - start
    return report, res


# -- Lie-Poisson example ---------------------------------------------------------------------

def r_squared(dim: int = 3) -> RationalFunction:
    x = coordinates(dim)
    return x[0] ** 2 + x[1] ** 2 + x[2] ** 2


def det_vanishes_on_sphere(det: RationalFunction, lam) -> bool:
    """Substitute x3^2 = -1/lam - x1^2 - x2^2 into the numerator and test for zero."""
    lam = as_rational(lam)
    x1, x2 = Polynomial.variable(3, 1), Polynomial.variable(3, 2)
    repl = Polynomial.constant(3, -1 / lam) - x1 * x1 - x2 * x2
    return det.num.substitute_square(3, repl).is_zero()


@_timed
def example_lie_poisson(lam="1", seed: int = DEFAULT_SEED, casimir_trials: int = 10,
                        leaf_points: int = 50) -> VerificationReport:
    """The so(3) Lie-Poisson structure gauged by -B, B = lam (x1 dx2^dx3 + c.p.)."""
    lam = as_rational(lam)
    report = VerificationReport("example lie-poisson", seed)
    report.info["lambda"] = rational_to_str(lam)
    pi = lie_poisson_so3()
    B = lie_poisson_B(lam)
    phi = de_rham_d(B)
    one = RationalFunction.one(3)
    r2 = r_squared()
    factor = one + r2 * lam
    res = gauge_bivector(pi, -B)
    if res.singular:
        report.add(Check("gauge-identity", "fail", {}, note="determinant vanishes identically"))
        return report
    pi_p = res.pi_prime
    expected = pi.scale(one / factor)
    diff = pi_p - expected
    report.add(_exact_check("gauge-identity", diff, {"pi_prime": pi_p.to_json()}))
    report.add(_exact_check("determinant", res.det - factor * factor))
    if lam < 0:
        radius = 1 / math.sqrt(float(-lam))
        report.info["singular_sphere_radius"] = radius
        ok = det_vanishes_on_sphere(res.det, lam)
        report.add(Check("singular-sphere", status(ok), {"radius": radius}))
    else:
        report.info["singular_sphere_radius"] = None
        report.add(Check("singular-sphere", "skip", {}, note="no real singular locus for lambda >= 0"))
    ok, defect = is_phi_poisson(pi_p, phi)
    report.add(_exact_check("twisted-poisson", defect))
    rng = rng_from(seed)
    bad = None
    for _ in range(casimir_trials):
        g = random_function(rng, 3, 2)
        v = poisson_bracket(pi_p, r2, g)
        if not v.is_zero():
            bad = (g, v)
            break
    report.add(Check("casimir", status(bad is None), {"trials": casimir_trials},
                     None if bad is None else {"g": bad[0].to_json()}))
    nprng = np.random.default_rng(seed)
    mismatches, used = [], 0
    while used < leaf_points:
        p = nprng.uniform(-2, 2, size=3)
        if abs(1 + float(lam) * float(p @ p)) < 1e-3:
            continue
        try:
            r0, r1 = rank_at(pi, p), rank_at(pi_p, p)
        except PoleError:
            continue
        used += 1
        if r0 != r1:
            mismatches.append([float(v) for v in p])
    report.add(Check("leaf-ranks", status(not mismatches), {"points": used, "mismatches": len(mismatches)},
                     {"points": mismatches[:3]} if mismatches else None))
    return report


# -- Lie group example -------------------------------------------------------------------------

@_timed
def example_group(algebra: str = "so3", samples: int = 100, seed: int = DEFAULT_SEED, tol: float = 1e-9,
                  fd_step: float = 1e-5, qp_points: int = 25, qp_step: float = 1e-4) -> VerificationReport:
    A = lg.get_algebra(algebra)
    report = VerificationReport(f"example group {algebra}", seed)
    report.info["algebra"] = A.name
    d = A.dim
    rng = np.random.default_rng(seed)
    basis = [A.basis(i) for i in range(d)]

    iso_bad = []
    for i in range(d):
        for j in range(d):
            const, K = lg.isotropy_exact(A, basis[i], basis[j])
            if const or K:
                iso_bad.append([i + 1, j + 1])
    report.add(Check("isotropy", status(not iso_bad), {"pairs": d * d, "nonzero": len(iso_bad)},
                     {"pairs": iso_bad} if iso_bad else None))

    closure, fd_err, graph_err, singular = 0.0, 0.0, 0.0, 0
    fd_tol = lg.fd_tolerance(fd_step)
    for n in range(samples):
        g = lg.random_point(A, rng)
        for i in range(d):
            for j in range(d):
                s1, s2 = lg.InvariantSection.e(basis[i]), lg.InvariantSection.e(basis[j])
                exact = lg.courant_bracket_rules(A, g, s1, s2, -1)
                closure = max(closure, (exact - lg.e_value(A, g, lg.ad_bracket(A, basis[i], basis[j]))).norm())
        # finite-difference oracle: one generic pair per point, all basis pairs at the first points
        pairs = [(lg.InvariantSection.make(*(rng.normal(size=d) for _ in range(4))),
                  lg.InvariantSection.make(*(rng.normal(size=d) for _ in range(4))))]
        if n < 3:
            pairs += [(lg.InvariantSection.e(basis[i]), lg.InvariantSection.e(basis[j]))
                      for i in range(d) for j in range(d)]
        for s1, s2 in pairs:
            ex = lg.courant_bracket_rules(A, g, s1, s2, -1)
            fd = lg.courant_bracket_fd(A, g, s1, s2, -1, fd_step)
            fd_err = max(fd_err, (ex - fd).norm() / max(1.0, ex.norm()))
        try:
            graph_err = max(graph_err, lg.graph_residual(A, g, rng.normal(size=d)))
        except lg.SingularPointError:
            singular += 1
    report.add(Check("e-closure", status(closure < tol), {"max_norm": closure, "points": samples}))
    report.add(Check("fd-agreement", status(fd_err < fd_tol), {"max_relative": fd_err, "tol": fd_tol}))
    report.add(Check("pi-graph", status(graph_err < tol), {"max_norm": graph_err, "singular_points": singular}))

    qp = [lg.quasi_poisson_defect(A, lg.random_point(A, rng), qp_step) for _ in range(qp_points)]
    ks = [q.constant for q in qp]
    res = max(q.residual for q in qp)
    spread = max(ks) - min(ks)
    ok = res < 1e-5 and spread < 1e-5 * max(1.0, max(abs(k) for k in ks))
    report.add(Check("quasi-poisson-cartan", status(ok),
                     {"constant": _round(np.mean(ks)), "spread": spread, "max_relative_residual": res}))
    ka = [q.action_constant for q in qp]
    res_a = max(q.action_residual for q in qp)
    spread_a = max(ka) - min(ka)
    ok_a = res_a < 1e-5 and spread_a < 1e-5 * max(1.0, max(abs(k) for k in ka))
    report.add(Check("quasi-poisson-action", status(ok_a),
                     {"constant": _round(np.mean(ka)), "spread": spread_a, "max_relative_residual": res_a}))
    return report


def _round(v: float, digits: int = 9) -> float:
    r = round(float(v), digits)
    return 0.0 if r == 0 else r


__all__ = [
    "Check",
    "DEFAULT_SEED",
    "VerificationReport",
    "axiom_one_witness",
    "axioms_suite",
    "det_vanishes_on_sphere",
    "example_group",
    "example_lie_poisson",
    "gauge_suite",
    "r_squared",
    "symbolic_summary",
    "verify_suite",
]
