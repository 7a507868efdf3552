import numpy as np
import pytest
import scipy.linalg as sl
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from equivgerbe.lie import LogDomainError, model_registry

vec3 = arrays(np.float64, 3, elements=st.floats(-2.5, 2.5, allow_nan=False))


def test_su2_bracket_convention(su2):
    e1, e2, e3 = np.eye(3)
    # oracle: commutator of the matrices, re-expressed in coordinates
    A = su2.algebra
    comm = A.hat(e1) @ A.hat(e2) - A.hat(e2) @ A.hat(e1)
    assert np.allclose(comm, A.hat(e3))
    assert np.allclose(A.bracket(e1, e2), e3)


def test_su2_inner_from_trace(su2):
    A = su2.algebra
    e1 = np.eye(3)[0]
    assert A.inner(e1, e1) == pytest.approx(-np.trace(A.hat(e1) @ A.hat(e1)).real)
    assert A.inner(e1, e1) == pytest.approx(0.5)


@pytest.mark.parametrize("name,dim", [("su2", 3), ("so3", 3), ("abelian(2)", 2), ("heisenberg(4)", 4)])
def test_registry_dimensions(name, dim):
    G = model_registry(name)
    assert G.dim == dim
    assert max(G.algebra.residuals().values()) < 1e-12


def test_abelian_and_heisenberg_base():
    G = model_registry("abelian(2)")
    assert not np.any(G.algebra.structure_constants)
    x = np.array([0.3, -1.2])
    assert np.allclose(G.log(G.exp(x)), x)
    assert np.allclose(G.adjoint(G.exp(x), [1.0, 2.0]), [1.0, 2.0])
    H = model_registry("heisenberg(2)")
    assert H.extension is not None and H.cocycle.shape == (2, 2)


@pytest.mark.parametrize("bad", ["su3", "heisenberg(3)", "abelian(0)"])
def test_registry_rejects(bad):
    with pytest.raises(KeyError):
        model_registry(bad)


@given(vec3, vec3)
def test_bracket_antisymmetric(x, y):
    A = model_registry("su2").algebra
    assert np.allclose(A.bracket(x, y), -A.bracket(y, x))
    assert np.allclose(A.bracket(x, x), 0.0)


@given(vec3, vec3, vec3)
def test_inner_ad_invariant(x, y, z):
    A = model_registry("su2").algebra
    assert abs(A.inner(A.bracket(z, x), y) + A.inner(x, A.bracket(z, y))) < 1e-10


@pytest.mark.parametrize("name", ["su2", "so3"])
@given(x=vec3)
@settings(max_examples=50)
def test_exp_matches_scipy(name, x):
    G = model_registry(name)
    assert np.allclose(G.exp(x), sl.expm(G.algebra.hat(x)), atol=1e-12)


def test_log_round_trip(su2):
    x = 0.3 * np.eye(3)[0]
    assert np.max(np.abs(su2.log(su2.exp(x)) - x)) < 1e-10
    assert np.allclose(su2.exp(np.zeros(3)), np.eye(2))


def test_log_matches_scipy(su2, rng):
    for _ in range(20):
        g = su2.random(rng)
        if np.trace(g).real < -1.9:
            continue
        assert np.allclose(su2.algebra.hat(su2.log(g)), sl.logm(g), atol=1e-8)


def test_log_domain(su2):
    with pytest.raises(LogDomainError):
        su2.log(-np.eye(2, dtype=complex))


def test_adjoint_and_coadjoint(su2, rng):
    x = rng.normal(size=3)
    assert np.allclose(su2.adjoint(su2.identity(), x), x)
    for _ in range(10):
        g, xi, v = su2.random(rng), rng.normal(size=3), rng.normal(size=3)
        # <Ad*_{g^-1} xi, v> = <xi, Ad_{g^-1} v>
        assert abs(su2.coadjoint_dual(g, xi) @ v - xi @ su2.adjoint(su2.inv(g), v)) < 1e-12
        assert np.allclose(su2.adjoint_matrix(g) @ v, su2.adjoint(g, v))


def test_random_elements_are_members(su2, rng):
    assert su2.membership_residual(su2.random(rng, size=50)) < 1e-12
    so3 = model_registry("so3")
    assert so3.membership_residual(so3.random(rng, size=50)) < 1e-12
