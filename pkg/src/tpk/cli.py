"""Command line: ``tpk verify | gauge | axioms | example``.

Exit codes: 0 all checks pass, 1 a check failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .coeff import CoeffError, DegreeCapExceeded, as_rational
from .courant import NotClosedError
from .dirac import graph_from_json
from .exterior import DifferentialForm, ExteriorError, graded_from_json
from .liegroup import ALGEBRAS
from .suites import (
    DEFAULT_SEED,
    VerificationReport,
    axiom_one_witness,
    axioms_suite,
    example_group,
    example_lie_poisson,
    gauge_suite,
    verify_suite,
)

DATA_DIR = Path(__file__).with_name("data")

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def load_json(path: str):
    p = Path(path)
    if not p.exists() and (DATA_DIR / path).exists():
        p = DATA_DIR / path
    try:
        text = p.read_text()
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def load_graded(path: str, kind: str | None = None, degree: int | None = None):
    data = load_json(path)
    try:
        obj = graded_from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: not a graded object ({exc})") from None
    if kind and obj.kind != kind:
        raise InputError(f"{path}: expected a {kind}, got a {obj.kind}")
    if degree is not None and obj.degree != degree:
        raise InputError(f"{path}: expected degree {degree}, got {obj.degree}")
    return obj


def emit(report: VerificationReport, fmt: str, out=None):
    text = report.to_text() if fmt == "text" else json.dumps(report.to_json(), indent=2, sort_keys=True)
    print(text, file=out or sys.stdout)


def _code(report: VerificationReport) -> int:
    return EXIT_PASS if report.ok else EXIT_FAIL


def cmd_verify(args) -> int:
    data = load_json(args.spec)
    if args.phi:
        data = dict(data, phi=load_json(args.phi))
    try:
        graph = graph_from_json(data)
    except NotClosedError as exc:
        raise InputError(str(exc)) from None
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{args.spec}: {exc}") from None
    report = verify_suite(graph, seed=args.seed, trials=args.trials)
    emit(report, args.format)
    return _code(report)


def cmd_gauge(args) -> int:
    data = load_json(args.spec)
    try:
        graph = graph_from_json(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{args.spec}: {exc}") from None
    if not hasattr(graph, "pi"):
        raise InputError("gauge needs a bivector spec")
    if args.phi:
        graph.phi = load_graded(args.phi, "form", 3)
    B = load_graded(args.b, "form", 2)
    if B.dim != graph.dim:
        raise InputError(f"B has dim {B.dim}, the bivector has dim {graph.dim}")
    report, result = gauge_suite(graph.pi, graph.phi, B, seed=args.seed)
    if args.out:
        Path(args.out).write_text(json.dumps(result.to_json(), indent=1, sort_keys=True) + "\n")
    emit(report, args.format)
    return _code(report)


def cmd_axioms(args) -> int:
    phi = load_graded(args.phi, "form", 3) if args.phi else DifferentialForm.zero(args.dim, 3)
    if phi.dim != args.dim:
        raise InputError(f"phi has dim {phi.dim}, expected {args.dim}")
    report = axioms_suite(args.dim, phi, trials=args.trials, seed=args.seed)
    if not report.info["phi_closed"]:
        report.info["axiom_1_witness"] = axiom_one_witness(phi)
    emit(report, args.format)
    return _code(report)


def cmd_example(args) -> int:
    if args.name == "lie-poisson":
        try:
            lam = as_rational(args.lam)
        except (ValueError, ZeroDivisionError, TypeError):
            raise InputError(f"bad --lambda {args.lam!r}") from None
        report = example_lie_poisson(lam, seed=args.seed)
    else:
        report = example_group(args.algebra, samples=args.samples, seed=args.seed, tol=args.tol,
                               fd_step=args.fd_step)
    emit(report, args.format)
    return _code(report)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--format", choices=("json", "text"), default="json")

    parser = argparse.ArgumentParser(prog="tpk", description="Twisted Poisson verification toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="check a bivector or 2-form against a 3-form")
    p.add_argument("--spec", required=True)
    p.add_argument("--phi")
    p.add_argument("--trials", type=int, default=5)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("gauge", parents=[common], help="gauge a bivector by a 2-form")
    p.add_argument("--spec", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--phi")
    p.add_argument("--out")
    p.set_defaults(func=cmd_gauge)

    p = sub.add_parser("axioms", parents=[common], help="Courant axioms on random sections")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--phi")
    p.add_argument("--trials", type=int, default=20)
    p.set_defaults(func=cmd_axioms)

    p = sub.add_parser("example", parents=[common], help="run a worked example")
    p.add_argument("name", choices=("lie-poisson", "group"))
    p.add_argument("--lambda", dest="lam", default="1")
    p.add_argument("--algebra", choices=sorted(ALGEBRAS), default="so3")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--fd-step", type=float, default=1e-5)
    p.set_defaults(func=cmd_example)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (CoeffError, ExteriorError, DegreeCapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
