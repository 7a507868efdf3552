import numpy as np
import pytest

from equivgerbe import morita
from equivgerbe.lie import model_registry
from equivgerbe.loopspace import LoopSpace


@pytest.fixture(scope="module")
def B():
    return morita.Bimodule(LoopSpace(model_registry("su2"), N=64, M=1024))


def test_moment_maps(B, rng):
    G = B.G
    r = B.L.random_algebra_loop(rng)
    assert np.allclose(B.rho((G.identity(), r)), B.L.holonomy(r))
    assert np.allclose(B.rho((G.random(rng), np.zeros_like(r))), np.eye(2))
    g = G.random(rng)
    assert np.allclose(B.rho((g, r)), g @ B.L.holonomy(r) @ G.inv(g))
    assert B.sigma((g, r)) is r


def test_unit_arrows(B, rng):
    x = B.random_point(rng)
    y = B.left_action((B.G.identity(), B.rho(x)), x)
    assert morita.point_distance(x, y) < 1e-12
    e_loop = np.broadcast_to(B.G.identity(), (64, 2, 2)).copy()
    assert morita.point_distance(B.right_action(x, (e_loop, x[1])), x) < 1e-12


def test_incompatible_arrows_rejected(B, rng):
    x = B.random_point(rng)
    with pytest.raises(morita.IncompatibleArrow):
        B.left_action((B.G.random(rng), B.G.random(rng)), x)
    with pytest.raises(morita.IncompatibleArrow):
        B.right_action(x, (B.L.random_group_loop(rng), B.L.random_algebra_loop(rng)))


@pytest.mark.parametrize("name", ["su2", "abelian(2)"])
def test_bimodule_suite(name):
    rep = morita.verify_bimodule(LoopSpace(model_registry(name), N=64, M=1024), samples=10)
    assert rep.passed, rep.lines()
