from fractions import Fraction

import numpy as np
import pytest
from scipy.linalg import expm

from tpk.exterior import bivector_matrix, schouten_bracket
from tpk.liegroup import (
    ALGEBRAS,
    Ad_at,
    ChartStepError,
    GroupPoint,
    InvalidGroupPoint,
    InvariantSection,
    LieGroupError,
    QuadraticLieAlgebra,
    SingularPointError,
    action_trivector,
    ad_bracket,
    cartan_form,
    cartan_trivector,
    courant_bracket_at,
    courant_bracket_fd,
    courant_bracket_rules,
    e_value,
    fd_schouten_half_square,
    get_algebra,
    graph_residual,
    isotropy_exact,
    leaf_tangent_at,
    pairing_at,
    pi1_body,
    pi_tilde_at,
    quasi_poisson_defect,
    random_point,
)
from tpk.randgen import random_multivector, rng_from

THREE = ("so3", "su2", "sl2r")


@pytest.fixture(params=sorted(ALGEBRAS))
def algebra(request):
    return get_algebra(request.param)


def test_algebra_invariants(algebra):
    algebra.check()
    rng = np.random.default_rng(0)
    u, v, w = rng.normal(size=(3, algebra.dim))
    assert np.allclose(ad_bracket(algebra, u, u), 0)
    jac = (ad_bracket(algebra, u, ad_bracket(algebra, v, w)) + ad_bracket(algebra, v, ad_bracket(algebra, w, u))
           + ad_bracket(algebra, w, ad_bracket(algebra, u, v)))
    assert np.abs(jac).max() < 1e-12
    comm = algebra.matrix(u) @ algebra.matrix(v) - algebra.matrix(v) @ algebra.matrix(u)
    assert np.abs(algebra.matrix(ad_bracket(algebra, u, v)) - comm).max() < 1e-12


def test_so3_structure_constants():
    A = get_algebra("so3")
    assert np.allclose(ad_bracket(A, A.basis(0), A.basis(1)), A.basis(2))
    assert cartan_form(A, A.basis(0), A.basis(1), A.basis(2)) == pytest.approx(0.5)


def test_sl2r_metric_is_indefinite():
    A = get_algebra("sl2r")
    assert sorted(np.linalg.eigvalsh(A.metric)) == pytest.approx([-1, 1, 1])


def test_broken_algebra_rejected():
    A = get_algebra("so3")
    data = A.to_json()
    data["metric"] = [[1, 0, 0], [0, 2, 0], [0, 0, 1]]
    with pytest.raises(LieGroupError):
        QuadraticLieAlgebra.from_json(data)


def test_algebra_json_roundtrip(algebra):
    B = QuadraticLieAlgebra.from_json(algebra.to_json())
    assert np.allclose(B.c, algebra.c) and np.allclose(B.metric, algebra.metric)


def test_unknown_algebra():
    with pytest.raises(LieGroupError):
        get_algebra("e8")


def test_cartan_form_antisymmetric(algebra):
    rng = np.random.default_rng(1)
    u, v, w = rng.normal(size=(3, algebra.dim))
    val = cartan_form(algebra, u, v, w)
    for a, b, c, s in ((v, u, w, -1), (u, w, v, -1), (w, u, v, 1), (v, w, u, 1)):
        assert cartan_form(algebra, a, b, c) == pytest.approx(s * val, abs=1e-12)
    assert cartan_form(algebra, u, u, v) == pytest.approx(0, abs=1e-12)


def test_Ad_properties(algebra):
    rng = np.random.default_rng(2)
    g, h = random_point(algebra, rng), random_point(algebra, rng)
    assert np.allclose(Ad_at(algebra, GroupPoint.identity(algebra)), np.eye(algebra.dim))
    assert np.abs(Ad_at(algebra, g @ h) - Ad_at(algebra, g) @ Ad_at(algebra, h)).max() < 1e-9
    Ad = Ad_at(algebra, g)
    assert np.abs(Ad.T @ algebra.metric @ Ad - algebra.metric).max() < 1e-9


def test_so3_Ad_is_rotation():
    A = get_algebra("so3")
    t = 0.7
    Ad = Ad_at(A, GroupPoint.exp(A, [0, 0, t]))
    R = np.array([[np.cos(t), -np.sin(t), 0], [np.sin(t), np.cos(t), 0], [0, 0, 1]])
    assert np.allclose(Ad, R, atol=1e-12)


def test_invalid_group_points():
    A = get_algebra("so3")
    with pytest.raises(InvalidGroupPoint):
        GroupPoint(A, 2 * np.eye(3))
    with pytest.raises(InvalidGroupPoint):
        GroupPoint(A, np.eye(2))
    with pytest.raises(InvalidGroupPoint):
        GroupPoint(A, np.diag([1.0, 1.0, 1.0]) + np.triu(np.ones((3, 3)), 1))


@pytest.mark.parametrize("name", THREE)
def test_isotropy_exact(name):
    A = get_algebra(name)
    for i in range(A.dim):
        for j in range(A.dim):
            const, K = isotropy_exact(A, A.basis(i), A.basis(j))
            assert const == Fraction(0) and K == {}


@pytest.mark.parametrize("name", THREE)
def test_e_closure_and_pairing(name):
    A = get_algebra(name)
    rng = np.random.default_rng(3)
    for _ in range(5):
        g = random_point(A, rng)
        for i in range(A.dim):
            ei = e_value(A, g, A.basis(i))
            for j in range(A.dim):
                br = courant_bracket_at(A, g, InvariantSection.e(A.basis(i)), InvariantSection.e(A.basis(j)))
                target = e_value(A, g, ad_bracket(A, A.basis(i), A.basis(j)))
                assert (br - target).norm() < 1e-9
                assert abs(pairing_at(A, ei, e_value(A, g, A.basis(j)))) < 1e-9


def test_untwisted_bracket_leaves_the_span():
    A = get_algebra("so3")
    g = random_point(A, np.random.default_rng(4))
    e1, e2 = InvariantSection.e(A.basis(0)), InvariantSection.e(A.basis(1))
    off = courant_bracket_rules(A, g, e1, e2, twist_sign=0) - e_value(A, g, A.basis(2))
    assert off.norm() > 1e-3
    assert np.abs(off.X).max() < 1e-12


def test_identity_values():
    A = get_algebra("so3")
    e = GroupPoint.identity(A)
    assert np.allclose(e_value(A, e, A.basis(0)).X, 0)
    assert np.allclose(pi_tilde_at(A, e), 0)
    assert leaf_tangent_at(A, e).shape[1] == 0
    s = InvariantSection.e(A.basis(0))
    assert courant_bracket_at(A, random_point(A, np.random.default_rng(0)), s, s).norm() < 1e-12


@pytest.mark.parametrize("name", THREE + ("so4",))
def test_rules_match_finite_differences(name):
    A = get_algebra(name)
    rng = np.random.default_rng(5)
    for _ in range(3):
        g = random_point(A, rng)
        s1 = InvariantSection.make(*rng.normal(size=(4, A.dim)))
        s2 = InvariantSection.make(*rng.normal(size=(4, A.dim)))
        exact = courant_bracket_rules(A, g, s1, s2)
        approx = courant_bracket_fd(A, g, s1, s2)
        assert (exact - approx).norm() / max(exact.norm(), 1) < 1e-7
        courant_bracket_at(A, g, s1, s2, validate=True)


def test_bad_chart_step_is_rejected():
    # the tolerance scales with step^2, so a tiny step is where roundoff wins
    A = get_algebra("so3")
    rng = np.random.default_rng(6)
    g = random_point(A, rng)
    s1 = InvariantSection.make(*rng.normal(size=(4, 3)))
    s2 = InvariantSection.make(*rng.normal(size=(4, 3)))
    with pytest.raises(ChartStepError):
        courant_bracket_at(A, g, s1, s2, validate=True, fd_step=1e-12)


@pytest.mark.parametrize("name", THREE)
def test_pi_tilde_graph(name):
    A = get_algebra(name)
    rng = np.random.default_rng(7)
    for _ in range(5):
        g = random_point(A, rng)
        P = pi_tilde_at(A, g)
        # metric-antisymmetric
        assert np.abs(A.metric @ P + (A.metric @ P).T).max() < 1e-9
        assert graph_residual(A, g, rng.normal(size=A.dim)) < 1e-9


def test_pi_tilde_singular_at_half_turn():
    A = get_algebra("so3")
    with pytest.raises(SingularPointError):
        pi_tilde_at(A, GroupPoint.exp(A, [0, 0, np.pi]))


@pytest.mark.parametrize("name", THREE)
def test_leaf_tangent_rank(name):
    A = get_algebra(name)
    rng = np.random.default_rng(8)
    for _ in range(5):
        g = random_point(A, rng)
        assert leaf_tangent_at(A, g).shape[1] == np.linalg.matrix_rank(Ad_at(A, g) - np.eye(A.dim), tol=1e-10)
    assert leaf_tangent_at(get_algebra("so3"), GroupPoint.exp(get_algebra("so3"), [0, 0.3, 0])).shape[1] == 2


def test_fd_schouten_matches_exact():
    rng = rng_from(3)
    pi = random_multivector(rng, 3, 2, 2, 0.6)
    M = bivector_matrix(pi)
    p = np.array([0.3, -0.2, 0.5])

    def fn(s):
        return np.array([[c.evaluate(p + s) for c in row] for row in M])

    T = fd_schouten_half_square(3, fn, 1e-4)
    exact = schouten_bracket(pi, pi).coef(1, 2, 3).evaluate(p) / 2
    assert T[0, 1, 2] == pytest.approx(exact, abs=1e-6)


def test_pi1_antisymmetric(algebra):
    g = random_point(algebra, np.random.default_rng(9))
    P = pi1_body(algebra, g)
    assert np.allclose(P, -P.T)


@pytest.mark.parametrize("name", ("so3", "su2"))
def test_quasi_poisson_three_dimensional(name):
    A = get_algebra(name)
    rng = np.random.default_rng(10)
    for _ in range(3):
        q = quasi_poisson_defect(A, random_point(A, rng))
        assert q.residual < 1e-5
        assert abs(q.constant) < 1e-5


def test_quasi_poisson_so5_follows_action_trivector():
    A = get_algebra("so5")
    rng = np.random.default_rng(11)
    g = random_point(A, rng)
    q = quasi_poisson_defect(A, g)
    assert q.action_constant == pytest.approx(0.5, abs=1e-5)
    assert q.action_residual < 1e-5
    # the defect is not a multiple of the Cartan trivector on this group
    assert q.residual > 0.5
    assert np.linalg.norm(action_trivector(A, g)) > 1e-3 and np.linalg.norm(cartan_trivector(A)) > 1e-3


def test_random_point_is_in_group(algebra):
    rng = np.random.default_rng(12)
    g = random_point(algebra, rng)
    GroupPoint(algebra, g.g)
    u = rng.normal(size=algebra.dim)
    assert np.allclose(GroupPoint.exp(algebra, u).g, expm(algebra.matrix(u)))
