import numpy as np
import pytest

from equivgerbe.amm import conjugation_groupoid
from equivgerbe.conventions import CALIBRATED
from equivgerbe.geometry import DifferentialForm, GroupAtom, LinearAtom
from equivgerbe.lie import model_registry
from equivgerbe.simplicial import (TotalCochain, TransformationGroupoid, cocycle_residual, max_residual,
                                   simplicial_coboundary, total_differential)


@pytest.fixture
def conj(su2):
    return conjugation_groupoid(su2)


def test_groupoid_axioms_and_identities(conj, rng):
    assert max(conj.axiom_residuals(rng, 20).values()) < 1e-12
    for p in (2, 3):
        assert conj.simplicial_identity_residual(p, rng, 10) < 1e-12


def test_faces_at_level_one(conj, su2, rng):
    x = conj.nerve(1).random_point(rng)
    d0, d1 = conj.face_map(1, 0)(x), conj.face_map(1, 1)(x)
    # the recorded orientation is reversed: d0 is the target
    assert CALIBRATED.coboundary_orientation == "reversed"
    assert np.allclose(d0[0], x[0] @ x[1] @ su2.inv(x[0]))
    assert np.allclose(d1[0], x[1])
    assert np.allclose(conj.source_map()(x)[0], x[1])
    assert np.allclose(conj.target_map()(x)[0], d0[0])
    with pytest.raises(IndexError):
        conj.face_map(1, 2)


def test_middle_face_adds_on_abelian_trivial_action():
    G = model_registry("abelian(2)")
    gpd = TransformationGroupoid(GroupAtom(G), LinearAtom((1,)), lambda g, m: m)
    a, b = np.array([1.0, 2.0]), np.array([-0.5, 0.25])
    out = gpd.face_map(2, 1)((G.exp(a), G.exp(b), np.zeros(1)))
    assert np.allclose(G.log(out[0]), a + b)


def test_coboundary_of_function(conj, su2, rng):
    A = rng.normal(size=(2, 2))
    f = DifferentialForm(0, conj.nerve(0), lambda p: float(np.real(np.trace(A @ p[0]))))
    one = DifferentialForm(0, conj.nerve(0), lambda p: 1.0)
    df, d1 = simplicial_coboundary(conj, 0, f), simplicial_coboundary(conj, 0, one)
    for _ in range(5):
        x = conj.nerve(1).random_point(rng)
        t, s = x[0] @ x[1] @ su2.inv(x[0]), x[1]
        assert d1(x) == 0.0
        assert abs(abs(df(x)) - abs(f((t,)) - f((s,)))) < 1e-12


def test_del_del_vanishes(conj, su2, rng):
    w = rng.normal(size=3)
    psi = DifferentialForm(1, conj.nerve(1), lambda q, v: float(w @ su2.adjoint(q[1], v[0])
                                                                  + np.real(np.trace(q[0])) * (w @ v[1])))
    dd = simplicial_coboundary(conj, 2, simplicial_coboundary(conj, 1, psi))
    assert max_residual(dd, conj.nerve(3), rng, 10) < 1e-10


def test_total_differential_squares_to_zero(conj, su2, rng):
    A = rng.normal(size=(2, 2))
    w = rng.normal(size=3)
    f = DifferentialForm(0, conj.nerve(0), lambda p: float(np.real(np.trace(A @ p[0] @ A @ p[0]))))
    psi = DifferentialForm(0, conj.nerve(1), lambda q: float(np.real(np.trace(A @ q[0] @ q[1]))))
    b = TotalCochain(conj, {0: f}, 0)
    c = TotalCochain(conj, {0: DifferentialForm(1, conj.nerve(0), lambda p, v: float(w @ v[0])), 1: psi}, 1)
    for cochain in (b, c):
        res = cocycle_residual(total_differential(cochain), rng, 4)
        assert max(res.values()) < 1e-5
    zero = TotalCochain(conj, {}, 2)
    assert max(cocycle_residual(zero, rng, 2).values(), default=0.0) == 0.0


def test_total_cochain_validates_degrees(conj):
    with pytest.raises(ValueError):
        TotalCochain(conj, {0: DifferentialForm(1, conj.nerve(0), lambda p, v: 0.0)}, 3)
