import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from equivgerbe import central_ext as ce
from equivgerbe.conventions import CALIBRATED

vec2 = arrays(np.float64, 2, elements=st.floats(-3, 3, allow_nan=False))


@pytest.fixture(scope="module")
def heis():
    return ce.ExtensionModel.heisenberg_full(2)


@pytest.fixture(scope="module")
def cob():
    return ce.ExtensionModel.su2_coboundary()


def test_chi_at_identity(heis, cob):
    assert np.allclose(ce.chi(heis, heis.group.identity()), 0.0)
    assert np.allclose(ce.chi(cob, cob.group.identity()), 0.0)


@given(vec2, vec2)
def test_heisenberg_chi_is_additive(x, y):
    m = ce.ExtensionModel.heisenberg_full(2)
    G = m.group
    lhs = ce.chi(m, G.exp(x) @ G.exp(y))
    assert np.allclose(lhs, ce.chi(m, G.exp(x)) + ce.chi(m, G.exp(y)), atol=1e-10)


def test_heisenberg_gauge_action_is_shift(heis):
    G = heis.group
    x, xi = np.array([0.4, -1.1]), np.array([2.0, 0.5])
    # chi = -lambda(x, .) with the recorded sign
    assert CALIBRATED.chi_sign == -1
    assert np.allclose(ce.gauge_action(heis, G.exp(x), xi), xi - heis.cocycle.flat(x))
    assert np.allclose(ce.gauge_action(heis, G.identity(), xi), xi)


def test_coboundary_cocycle_and_left_action(cob, rng):
    G = cob.group
    for _ in range(20):
        g1, g2, xi = G.random(rng), G.random(rng), rng.normal(size=3)
        twisted = ce.chi(cob, g1) + G.coadjoint_dual(g1, ce.chi(cob, g2))
        assert np.max(np.abs(ce.chi(cob, g1 @ g2) - twisted)) < 1e-10
        lhs = ce.gauge_action(cob, g1 @ g2, xi)
        rhs = ce.gauge_action(cob, g1, ce.gauge_action(cob, g2, xi))
        assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_extended_coadjoint_slices(cob, rng):
    g, xi = cob.group.random(rng), rng.normal(size=3)
    assert np.allclose(ce.coadjoint_extended(cob, g, xi, 0.0)[0], cob.group.coadjoint_dual(g, xi))
    assert np.allclose(ce.coadjoint_extended(cob, g, xi, 1.0)[0], ce.gauge_action(cob, g, xi))


def test_affine_poisson(heis, cob, rng):
    e1, e2 = np.eye(2)
    l1, l2 = ce.AffineFunction(e1), ce.AffineFunction(e2)
    for xi in rng.normal(size=(3, 2)):
        assert ce.affine_poisson(heis, l1, l1, xi) == 0.0
        assert ce.affine_poisson(heis, l1, l2, xi) == pytest.approx(1.0)
    for _ in range(10):
        F, G, H = (ce.AffineFunction(rng.normal(size=3)) for _ in range(3))
        assert ce.jacobi_residual(cob, F, G, H, rng.normal(size=3)) < 1e-12
    Q = ce.QuadraticFunction(rng.normal(size=(3, 3)), rng.normal(size=3))
    xi = rng.normal(size=3)
    assert np.allclose(ce.fd_gradient(Q, xi), Q.gradient(xi), atol=1e-8)


def test_theta_R_values(heis, rng):
    gt = heis.random_ext(rng)
    xi = rng.normal(size=2)
    assert ce.theta_R(heis, (gt, xi), (np.zeros(3), rng.normal(size=2))) == 0.0
    assert ce.theta_R(heis, (gt, xi), (np.array([0.0, 0.0, 1.0]), np.zeros(2))) == pytest.approx(1.0)


def test_omega_gamma_canonical_pairing(heis, rng):
    # v1 = e1, eta1 = 0; v2 = 0, eta2 = e1*: value -1 with the recorded sign (frozen from the d theta_R oracle)
    e1 = np.array([1.0, 0.0])
    for _ in range(3):
        p = (heis.group.random(rng), rng.normal(size=2))
        assert ce.omega_gamma(heis, p, (e1, np.zeros(2)), (np.zeros(2), e1)) == pytest.approx(-1.0)


def test_omega_R_is_basic(heis, rng):
    gt, xi = heis.random_ext(rng), rng.normal(size=2)
    central = (np.array([0.0, 0.0, 1.3]), np.zeros(2))
    other = (rng.normal(size=3), rng.normal(size=2))
    assert abs(ce.omega_R(heis, (gt, xi), central, other)) < 1e-12


def test_coboundary_omega_expands_lambda(cob, rng):
    # with lambda = <xi0, [., .]> the bracket and cocycle terms merge into <zeta + xi0, [v1, v2]>
    lam = cob.cocycle
    for _ in range(5):
        zeta, v1, v2 = rng.normal(size=(3, 3))
        br = cob.algebra.bracket(v1, v2)
        assert abs(zeta @ br + lam(v1, v2) - (zeta + cob.xi0) @ br) < 1e-12


def test_zero_cocycle_gives_canonical_form(rng):
    m = ce.ExtensionModel.su2_coboundary(xi0=(0.0, 0.0, 0.0))
    p = (m.group.random(rng), rng.normal(size=3))
    t1, t2 = (rng.normal(size=3), rng.normal(size=3)), (rng.normal(size=3), rng.normal(size=3))
    zeta = ce.gauge_action(m, *p)
    e1 = ce.gauge_action_tangent(m, *p, *t1)
    e2 = ce.gauge_action_tangent(m, *p, *t2)
    canonical = e2 @ t1[0] - e1 @ t2[0] - zeta @ m.algebra.bracket(t1[0], t2[0])
    assert ce.omega_gamma(m, p, t1, t2) == pytest.approx(CALIBRATED.omega_gamma_sign * canonical)


@pytest.mark.parametrize("factory", [lambda: ce.ExtensionModel.heisenberg_full(2),
                                     lambda: ce.ExtensionModel.heisenberg_full(4),
                                     lambda: ce.ExtensionModel.heisenberg_full(2, periodic=True),
                                     ce.ExtensionModel.su2_coboundary])
def test_prequantization_suites(factory):
    m = factory()
    rep = ce.verify_prequantization(m, samples=30, seed=7)
    assert rep.passed, rep.lines()
    assert ce.extension_structure_checks(m, samples=20).passed
    if m.extension is None:
        assert rep.skipped


@pytest.mark.parametrize("key", ["chi_sign", "omega_gamma_sign"])
def test_wrong_signs_fail(heis, key):
    assert not ce.verify_prequantization(heis, samples=5, conv=CALIBRATED.flipped(key)).passed
