from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from equivgerbe import amm
from equivgerbe.conventions import CALIBRATED
from equivgerbe.lie import model_registry

vec3 = arrays(np.float64, 3, elements=st.floats(-2, 2, allow_nan=False))


@given(vec3, vec3, vec3)
@settings(max_examples=30)
def test_cartan_form_alternates(v1, v2, v3):
    G = model_registry("su2")
    g = G.exp(v3)
    assert abs(amm.cartan_three_form(G, g, v1, v1, v2)) < 1e-12
    assert amm.cartan_three_form(G, g, v1, v2, v3) == pytest.approx(-amm.cartan_three_form(G, g, v2, v1, v3),
                                                                    abs=1e-12)


def test_cartan_form_at_identity(su2):
    E = amm._orthonormal_basis(su2)
    A = su2.algebra
    oracle = float(CALIBRATED.c_omega) * A.inner(E[0], A.bracket(E[1], E[2]))
    assert amm.cartan_three_form(su2, su2.identity(), *E) == pytest.approx(oracle)
    assert amm.omega_density_at_identity(su2) == pytest.approx(1 / np.sqrt(2))
    ab = model_registry("abelian(3)")
    assert amm.cartan_three_form(ab, ab.identity(), *np.eye(3)) == 0.0


def test_omega_simple_values(su2, rng):
    e = su2.identity()
    v1, v2 = rng.normal(size=(2, 3))
    z = np.zeros(3)
    p = (su2.random(rng), su2.random(rng))
    assert amm.amm_two_form(su2, p, (z, rng.normal(size=3)), (z, rng.normal(size=3))) == 0.0
    assert amm.amm_two_form(su2, (e, e), (v1, z), (v2, z)) == pytest.approx(0.0, abs=1e-14)


def test_omega_second_evaluator(su2, rng):
    for _ in range(20):
        p = (su2.random(rng), su2.random(rng))
        t1, t2 = (tuple(rng.normal(size=(2, 3))) for _ in range(2))
        assert amm.amm_two_form(su2, p, t1, t2) == pytest.approx(amm.amm_two_form_by_pieces(su2, p, t1, t2),
                                                                 abs=1e-12)


def test_calibration_selects_one_constant(su2):
    assert amm.admissible_c_omega(su2) == [Fraction(1, 2)]
    assert amm.calibrate_c_omega(su2) == CALIBRATED.c_omega


def test_abelian_cocycle_residuals(rng):
    G = model_registry("abelian(2)")
    res = amm.amm_residuals(G, 10, rng)
    assert max(res.values()) < 1e-10


@pytest.mark.parametrize("name", ["su2", "so3"])
def test_amm_cocycle(name):
    rep = amm.verify_amm_cocycle(model_registry(name), samples=30, seed=2)
    assert rep.passed, rep.lines()


def test_perturbation_grows_linearly(su2):
    from equivgerbe.harness import perturbation_study
    study = perturbation_study(su2, samples=3)
    ratios = [r / e for e, r in study]
    assert max(ratios) / min(ratios) < 1.05
    assert all(r > 1e-5 for _, r in study)


def test_cartan_model(su2, rng):
    r = amm.cartan_model_residuals(su2, np.zeros(3), 5, rng)
    assert r["degree2"] == 0.0 and r["degree0"] == 0.0
    assert r["dOmega"] < 1e-10
    assert amm.cartan_model_check(su2, 3, 5).passed
    assert not amm.cartan_model_check(su2, 2, 3, conv=CALIBRATED.flipped("cartan_sign")).passed


def test_generating_field_vanishes_at_identity(su2, rng):
    assert np.allclose(amm.generating_field(su2, rng.normal(size=3), su2.identity()), 0.0)


def test_period(su2):
    exact = amm.integrate_omega_su2(su2)
    assert exact == pytest.approx(4 * np.pi**2, rel=1e-12)
    assert amm.integrate_omega_quadrature(su2, 16) == pytest.approx(exact, rel=1e-6)
    assert amm.su2_volume(su2) == pytest.approx(2 * np.pi**2 * np.sqrt(2) ** 3)


def test_conjugation_invariance(su2, rng):
    assert amm.conjugation_invariance_residual(su2, rng, 10) < 1e-12


def test_nonabelian_requirement():
    from equivgerbe.lie import ModelError
    with pytest.raises(ModelError):
        amm.integrate_omega_su2(model_registry("so3"))
