"""The bimodule ``X = G x Lg`` linking ``G x G => G`` with ``LG x Lg => Lg``.

``rho(g, r) = g hol(r) g^-1`` and ``sigma(g, r) = r``.  The conjugation
groupoid acts on the left through ``rho`` and the loop groupoid on the right
through ``sigma``; arrows that do not match the moment map are rejected.
"""
from __future__ import annotations

import numpy as np

from .checks import Check, Report


class IncompatibleArrow(ValueError):
    """Arrow whose source does not match the moment map of the point."""


def _dist(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


class Bimodule:
    def __init__(self, loops, tol=1e-6):
        self.L = loops
        self.G = loops.group
        self.tol = tol

    def rho(self, x):
        g, r = x
        return g @ self.L.holonomy(r) @ self.G.inv(g)

    def sigma(self, x):
        return x[1]

    def left_action(self, arrow, x):
        """``(g1, g2) . (g, r) = (g1 g, r)`` when ``g2 = rho(g, r)``."""
        g1, g2 = arrow
        gap = _dist(g2, self.rho(x))
        if gap > self.tol:
            raise IncompatibleArrow(f"arrow source misses rho(x) by {gap:.2e}")
        return (g1 @ x[0], x[1])

    def right_action(self, x, arrow):
        """``(g, r) . (gamma, r') = (g gamma(0), r')`` when ``r = gamma . r'``."""
        gamma, r_src = arrow
        gap = _dist(x[1], self.L.gauge_action(gamma, r_src))
        if gap > self.tol:
            raise IncompatibleArrow(f"gamma . r' misses r by {gap:.2e}")
        return (x[0] @ gamma[0], r_src)

    def random_point(self, rng):
        return (self.G.random(rng), self.L.random_algebra_loop(rng))

    def right_arrow_into(self, r, rng):
        """A random loop-groupoid arrow with target ``r``: ``(gamma, gamma^-1 . r)``."""
        gamma = self.L.random_group_loop(rng)
        ginv = self.G.inv(gamma)
        return (gamma, self.L.gauge_action(ginv, r))


def point_distance(x, y):
    return max(_dist(x[0], y[0]), _dist(x[1], y[1]))


def morphism_residuals(L, samples, rng):
    """``f = (g(0), hol)`` commutes with source, target and multiplication."""
    G = L.group
    res = {"source": 0.0, "target": 0.0, "multiplication": 0.0, "unit": 0.0}
    for _ in range(samples):
        g, h = L.random_group_loop(rng), L.random_group_loop(rng)
        r = L.random_algebra_loop(rng)
        fg, hol = L.morita_f((g, r))
        res["source"] = max(res["source"], _dist(hol, L.morita_f0(r)))
        res["target"] = max(res["target"], _dist(fg @ hol @ G.inv(fg), L.morita_f0(L.gauge_action(g, r))))
        # ((g, h.r), (h, r)) -> (gh, r)
        prod = L.morita_f((g @ h, r))
        a, b = L.morita_f((g, L.gauge_action(h, r))), L.morita_f((h, r))
        res["multiplication"] = max(res["multiplication"], _dist(prod[0], a[0] @ b[0]), _dist(prod[1], b[1]))
        e = np.broadcast_to(G.identity(), g.shape)
        u = L.morita_f((e, r))
        res["unit"] = max(res["unit"], _dist(u[0], G.identity()), _dist(u[1], hol))
    return res


def verify_bimodule(L, samples=50, seed=11, tol=1e-6, include_zero=True):
    B = Bimodule(L, tol)
    G = L.group
    rng = np.random.default_rng(seed)
    worst = {k: 0.0 for k in ("left unit", "left associativity", "rho equivariance", "right unit",
                              "right associativity", "sigma equivariance", "rho invariance", "actions commute",
                              "left principality", "right principality", "rejects incompatible")}

    def bump(key, val):
        worst[key] = max(worst[key], val)

    for k in range(samples):
        x = B.random_point(rng)
        if include_zero and k % 10 == 0:
            x = (x[0], np.zeros_like(x[1]))
        rx = B.rho(x)
        # left action
        bump("left unit", point_distance(B.left_action((G.identity(), rx), x), x))
        g1, g0 = G.random(rng), G.random(rng)
        b = (g1, rx)
        a = (g0, g1 @ rx @ G.inv(g1))
        ab = (g0 @ g1, rx)
        bump("left associativity", point_distance(B.left_action(ab, x), B.left_action(a, B.left_action(b, x))))
        bump("rho equivariance", _dist(B.rho(B.left_action(b, x)), g1 @ rx @ G.inv(g1)))
        # right action
        e_loop = np.broadcast_to(G.identity(), (L.N,) + G.identity().shape).copy()
        bump("right unit", point_distance(B.right_action(x, (e_loop, x[1])), x))
        c = B.right_arrow_into(x[1], rng)
        d = B.right_arrow_into(c[1], rng)
        cd = (c[0] @ d[0], d[1])
        y = B.right_action(x, c)
        bump("right associativity", point_distance(B.right_action(x, cd), B.right_action(y, d)))
        bump("sigma equivariance", _dist(B.sigma(y), c[1]))
        bump("rho invariance", _dist(B.rho(y), rx))
        # commuting actions
        bump("actions commute", point_distance(B.right_action(B.left_action(b, x), c), B.left_action(b, y)))
        # principality witnesses
        x2 = (G.random(rng), x[1])
        arrow = (x2[0] @ G.inv(x[0]), rx)
        bump("left principality", point_distance(B.left_action(arrow, x), x2))
        bump("right principality", max(_dist(B.rho(y), rx), _dist(G.inv(x[0]) @ y[0], c[0][0])))
        # rejection of a mismatched arrow
        try:
            B.left_action((g1, g0 @ rx), x)
            bump("rejects incompatible", 1.0)
        except IncompatibleArrow:
            pass
    report = Report(f"morita[{G.name}]")
    for key, val in worst.items():
        report.add(Check(f"bimodule {key}", val, tol if key != "rejects incompatible" else 0.0))
    for key, val in morphism_residuals(L, samples, rng).items():
        report.add(Check(f"f morphism {key}", val, tol))
    return report
