"""Transformation groupoids, their nerves, and the De Rham double complex.

A composable ``p``-tuple of arrows is stored in the chart
``(g_1, ..., g_p, m)``: the arrows are ``(g_p, m)``, ``(g_{p-1}, g_p.m)``, ...,
so every point of ``G^p x M`` is composable.  With the standard orientation
face ``d_0`` drops the first (left-most) arrow, the middle faces multiply
neighbours and ``d_p`` drops the last arrow, acting on the base point.  On
arrows this gives ``d_0 = target`` and ``d_1 = source``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .conventions import resolve
from .geometry import (DEFAULT_H, DifferentialForm, SmoothMap, SpaceDescriptor, exterior_derivative,
                       pullback, zero_form)


class TransformationGroupoid:
    """``G x M => M`` for a left action ``g . m``.

    Parameters
    ----------
    group_atom, base_atom
        Atoms for ``G`` and ``M``.
    action : callable ``(g, m) -> m``
    action_tangent : callable ``(g, m, v, w) -> w'``, optional
        Exact derivative of the action for a right-trivialized ``v`` at ``g``
        and tangent ``w`` at ``m``.  Without it face maps fall back to finite
        differences.
    """

    def __init__(self, group_atom, base_atom, action, action_tangent=None, name=""):
        self.group_atom = group_atom
        self.base_atom = base_atom
        self.group = group_atom.group
        self.action = action
        self.action_tangent = action_tangent
        self.name = name
        self._nerves = {}

    # structure maps on arrows (g, m)

    def source(self, arrow):
        return arrow[1]

    def target(self, arrow):
        return self.action(arrow[0], arrow[1])

    def unit(self, m):
        return (self.group.identity(), m)

    def inverse(self, arrow):
        g, m = arrow
        return (self.group.inv(g), self.action(g, m))

    def multiply(self, a, b):
        """Compose ``a o b`` for ``s(a) = t(b)``: ``((g, h.m), (h, m)) -> (gh, m)``."""
        return (self.group.mul(a[0], b[0]), b[1])

    # nerve

    def nerve(self, p):
        if p not in self._nerves:
            self._nerves[p] = SpaceDescriptor((self.group_atom,) * p + (self.base_atom,))
        return self._nerves[p]

    def arrows_of(self, point):
        """Arrows of a composable tuple, first (left-most) arrow first."""
        *gs, m = point
        out = []
        base = m
        for g in reversed(gs):
            out.append((g, base))
            base = self.action(g, base)
        return out[::-1]

    def face_map(self, p, i, conv=None):
        """Face ``d_i: Gamma_p -> Gamma_{p-1}`` as a :class:`SmoothMap`."""
        if p < 1 or not 0 <= i <= p:
            raise IndexError(f"face index {i} out of range for level {p}")
        if resolve(conv).coboundary_orientation == "reversed":
            i = p - i
        return self._face(p, i)

    def _face(self, p, i):
        G = self.group
        dom, cod = self.nerve(p), self.nerve(p - 1)
        if i == 0:
            return SmoothMap(dom, cod, lambda x: x[1:], lambda x, v: v[1:], name=f"d0[{p}]")
        if i < p:
            def pm(x):
                return x[:i - 1] + (G.mul(x[i - 1], x[i]),) + x[i + 1:]

            def tm(x, v):
                w = v[i - 1] + G.adjoint(x[i - 1], v[i])
                return v[:i - 1] + (w,) + v[i + 1:]

            return SmoothMap(dom, cod, pm, tm, name=f"d{i}[{p}]")

        def pm(x):
            return x[:p - 1] + (self.action(x[p - 1], x[p]),)

        tm = None
        if self.action_tangent is not None:
            def tm(x, v):
                return v[:p - 1] + (self.action_tangent(x[p - 1], x[p], v[p - 1], v[p]),)

        return SmoothMap(dom, cod, pm, tm, name=f"d{p}[{p}]")

    def source_map(self, conv=None):
        """``s(g, m) = m``, independent of the face orientation."""
        return self._face(1, 0)

    def target_map(self, conv=None):
        """``t(g, m) = g . m``, independent of the face orientation."""
        return self._face(1, 1)

    def axiom_residuals(self, rng, samples=20):
        """Max residuals of the action and groupoid axioms at random samples."""
        G = self.group
        dist = _distance
        res = {"action_unit": 0.0, "action_compose": 0.0, "associativity": 0.0,
               "source_target": 0.0, "unit_laws": 0.0, "inverse_laws": 0.0}
        for _ in range(samples):
            g, h, k = (self.group_atom.random_point(rng) for _ in range(3))
            m = self.base_atom.random_point(rng)
            res["action_unit"] = max(res["action_unit"], dist(self.action(G.identity(), m), m))
            res["action_compose"] = max(res["action_compose"],
                                        dist(self.action(G.mul(g, h), m), self.action(g, self.action(h, m))))
            c = (k, m)
            b = (h, self.target(c))
            a = (g, self.target(b))
            ab_c = self.multiply(self.multiply(a, b), c)
            a_bc = self.multiply(a, self.multiply(b, c))
            res["associativity"] = max(res["associativity"], dist(ab_c[0], a_bc[0]), dist(ab_c[1], a_bc[1]))
            ab = self.multiply(a, b)
            res["source_target"] = max(res["source_target"], dist(self.source(ab), self.source(b)),
                                       dist(self.target(ab), self.target(a)))
            u1 = self.multiply(self.unit(self.target(c)), c)
            u2 = self.multiply(c, self.unit(self.source(c)))
            res["unit_laws"] = max(res["unit_laws"], dist(u1[0], c[0]), dist(u2[0], c[0]),
                                   dist(u1[1], c[1]), dist(u2[1], c[1]))
            ci = self.inverse(c)
            l = self.multiply(ci, c)
            r = self.multiply(c, ci)
            res["inverse_laws"] = max(res["inverse_laws"], dist(l[0], G.identity()), dist(l[1], c[1]),
                                      dist(r[0], G.identity()), dist(r[1], self.target(c)))
        return res

    def simplicial_identity_residual(self, p, rng, samples=10, conv=None):
        """Max of ``|d_i d_j x - d_{j-1} d_i x|`` over ``i < j`` at level ``p``."""
        worst = 0.0
        for _ in range(samples):
            x = self.nerve(p).random_point(rng)
            for j in range(p + 1):
                for i in range(j):
                    if p < 2:
                        continue
                    lhs = self.face_map(p - 1, i, conv)(self.face_map(p, j, conv)(x))
                    rhs = self.face_map(p - 1, j - 1, conv)(self.face_map(p, i, conv)(x))
                    worst = max(worst, max(_distance(a, b) for a, b in zip(lhs, rhs)))
        return worst


def _distance(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)), initial=0.0))


def simplicial_coboundary(groupoid, p, phi, conv=None, h=DEFAULT_H):
    """``del phi = sum_{i=0}^{p+1} (-1)^i d_i^* phi`` for a form on ``Gamma_p``."""
    if phi.space != groupoid.nerve(p):
        raise ValueError(f"form does not live on level {p}")
    pulls = [pullback(groupoid.face_map(p + 1, i, conv), phi, h) for i in range(p + 2)]

    def ev(x, *vs):
        return sum((-1) ** i * f(x, *vs) for i, f in enumerate(pulls))

    return DifferentialForm(phi.degree, groupoid.nerve(p + 1), ev, name=f"del({phi.name})")


@dataclass
class TotalCochain:
    """Element of the total complex: one form per nerve level, fixed total degree."""

    groupoid: TransformationGroupoid
    components: dict = field(default_factory=dict)  # level p -> form of degree total - p
    total_degree: int = 0

    def __post_init__(self):
        for p, phi in self.components.items():
            if phi.degree + p != self.total_degree:
                raise ValueError(f"component at level {p} has degree {phi.degree}, "
                                 f"total degree {self.total_degree} needs {self.total_degree - p}")
            if phi.space != self.groupoid.nerve(p):
                raise ValueError(f"component at level {p} lives on the wrong space")

    def component(self, p):
        if p in self.components:
            return self.components[p]
        if 0 <= p <= self.total_degree:
            return zero_form(self.total_degree - p, self.groupoid.nerve(p))
        raise KeyError(p)


def total_differential(c, conv=None, h=DEFAULT_H):
    """``delta = (-1)^p d + del`` applied componentwise."""
    gpd = c.groupoid
    out = {}

    def add(p, phi):
        out[p] = phi if p not in out else out[p] + phi

    for p, phi in sorted(c.components.items()):
        add(p, (-1) ** p * exterior_derivative(phi, h, conv))
        add(p + 1, simplicial_coboundary(gpd, p, phi, conv, h))
    return TotalCochain(gpd, out, c.total_degree + 1)


def cocycle_residual(c, rng, samples=20, conv=None, h=DEFAULT_H):
    """Max absolute value of each component of ``delta c`` at random samples.

    Returns a dict ``{(p, k): residual}`` with ``k`` the form degree.
    """
    dc = total_differential(c, conv, h)
    report = {}
    for p, phi in sorted(dc.components.items()):
        space = c.groupoid.nerve(p)
        worst = 0.0
        for _ in range(samples):
            x = space.random_point(rng)
            vs = [space.random_tangent(rng) for _ in range(phi.degree)]
            worst = max(worst, abs(phi(x, *vs)))
        report[(p, phi.degree)] = worst
    return report


def max_residual(form, space, rng, samples, reference=None):
    """Max ``|form - reference|`` over random points and tangents."""
    worst = 0.0
    for _ in range(samples):
        x = space.random_point(rng)
        vs = [space.random_tangent(rng) for _ in range(form.degree)]
        val = form(x, *vs)
        if reference is not None:
            val -= reference(x, *vs)
        worst = max(worst, abs(val))
    return worst
