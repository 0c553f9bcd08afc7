import json
import subprocess
import sys

import pytest

from tpk.cli import main
from tpk.coeff import RationalFunction, as_rational, coordinates, ratfun_eq
from tpk.dirac import lie_poisson_so3
from tpk.exterior import graded_from_json

from conftest import DATA


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    data = json.loads(out)
    data.pop("timing_seconds", None)
    return code, data


def statuses(report):
    return {c["id"]: c["status"] for c in report["checks"]}


def test_verify_lie_poisson(capsys):
    code, rep = run_json(capsys, "verify", "--spec", str(DATA / "lie_poisson_so3.json"))
    assert code == 0 and rep["status"] == "pass"
    assert set(statuses(rep)) >= {"graph-closed", "phi-poisson", "twisted-jacobi", "d-squared"}


def test_verify_resolves_bundled_names(capsys):
    code, _ = run_json(capsys, "verify", "--spec", "twisted_symplectic_r4.json")
    assert code == 0


def test_verify_broken_fixture_fails(capsys):
    code, rep = run_json(capsys, "verify", "--spec", "twisted_symplectic_r4_broken.json")
    assert code == 1
    assert statuses(rep)["phi-poisson"] == "fail"
    failing = [c for c in rep["checks"] if c["status"] == "fail"]
    assert all(c["witness"] is not None or c["residual"] is not None for c in failing)


def test_verify_trials_zero(capsys):
    code, rep = run_json(capsys, "verify", "--spec", "lie_poisson_so3.json", "--trials", "0")
    assert code == 0


def test_verify_is_deterministic(capsys):
    a = run_json(capsys, "verify", "--spec", "twisted_symplectic_r4.json", "--seed", "3")
    b = run_json(capsys, "verify", "--spec", "twisted_symplectic_r4.json", "--seed", "3")
    assert a == b


def test_gauge_writes_expected_bivector(capsys, tmp_path):
    out = tmp_path / "pi_prime.json"
    code, rep = run_json(capsys, "gauge", "--spec", "lie_poisson_so3.json",
                         "--b", "so3_minus_B_lambda1.json", "--out", str(out))
    assert code == 0
    result = json.loads(out.read_text())
    assert result["ok"] and not result["singular"]
    pi_prime = graded_from_json(result["pi_prime"])
    x = coordinates(3)
    q = RationalFunction.one(3) + x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
    for idx, c in lie_poisson_so3().terms.items():
        assert ratfun_eq(pi_prime.coef(*idx), c / q)


def test_gauge_zero_B_is_identity(capsys, tmp_path):
    out = tmp_path / "g.json"
    code, _ = run_json(capsys, "gauge", "--spec", "lie_poisson_so3.json", "--b", "zero_B_r3.json",
                       "--out", str(out))
    assert code == 0
    result = json.loads(out.read_text())
    assert graded_from_json(result["pi_prime"]) == lie_poisson_so3()


def test_axioms_closed_and_not_closed(capsys):
    code, rep = run_json(capsys, "axioms", "--dim", "3", "--phi", "phi_closed_r3.json", "--trials", "3")
    assert code == 0 and len(rep["checks"]) == 5
    code, rep = run_json(capsys, "axioms", "--dim", "4", "--phi", "phi_nonclosed_r4.json", "--trials", "2")
    assert code == 1
    assert statuses(rep)["axiom-1"] == "fail"
    assert rep["info"]["axiom_1_witness"]


def test_axioms_dim_mismatch(capsys):
    code, _, err = run(capsys, "axioms", "--dim", "3", "--phi", "phi_nonclosed_r4.json")
    assert code == 2 and "dim" in err


def test_example_lie_poisson_negative_lambda(capsys):
    code, rep = run_json(capsys, "example", "lie-poisson", "--lambda", "-1")
    assert code == 0
    assert rep["info"]["singular_sphere_radius"] == pytest.approx(1.0)


@pytest.mark.parametrize("lam", ["1", "3/2"])
def test_example_lie_poisson(capsys, lam):
    code, rep = run_json(capsys, "example", "lie-poisson", "--lambda", lam)
    assert code == 0
    assert as_rational(rep["info"]["lambda"]) == as_rational(lam)


def test_example_group(capsys):
    code, rep = run_json(capsys, "example", "group", "--algebra", "so3", "--samples", "100", "--seed", "7")
    assert code == 0 and rep["seed"] == 7
    assert set(statuses(rep).values()) == {"pass"}


def test_example_group_sl2r_text(capsys):
    code, out, _ = run(capsys, "example", "group", "--algebra", "sl2r", "--samples", "20", "--format", "text")
    assert code == 0 and "PASS" in out


@pytest.mark.parametrize("argv", [
    ["verify", "--spec", "does_not_exist.json"],
    ["example", "group", "--algebra", "e8"],
    ["example", "lie-poisson", "--lambda", "one"],
    ["frobnicate"],
    [],
])
def test_input_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_bad_json_reports_position(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"pi": [1, 2,}')
    code, _, err = run(capsys, "verify", "--spec", str(bad))
    assert code == 2 and "line 1 column" in err


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "tpk.cli", "example", "lie-poisson", "--format", "text"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "PASS" in proc.stdout
