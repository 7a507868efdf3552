"""Pointwise differential forms on product spaces of groups, duals and loops.

Tangent vectors are right-trivialized on group factors: the tangent at ``g``
is stored as the algebra element ``v`` with the actual vector ``v g``.  With
that choice constant tangent components are right-invariant frame fields,
whose brackets are known exactly, so the only numerical error in
:func:`exterior_derivative` comes from the central differences.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .conventions import resolve

DEFAULT_H = 1e-4


# ---------------------------------------------------------------- atoms

class GroupAtom:
    """Factor ``G``; points are matrices, tangents are algebra coordinates."""

    def __init__(self, group):
        self.group = group
        self.shape = (group.dim,)

    def move(self, p, v, t):
        return self.group.exp(t * np.asarray(v)) @ p

    def difference(self, q_plus, q_minus):
        return self.group.log(q_plus @ self.group.inv(q_minus))

    def frame_bracket(self, v, w):
        return self.group.algebra.bracket(v, w)

    def random_point(self, rng):
        return self.group.random(rng)

    def random_tangent(self, rng):
        return rng.normal(size=self.shape)

    def __eq__(self, other):
        return type(other) is type(self) and other.group is self.group

    def __hash__(self):
        return hash((type(self), id(self.group)))

    def __repr__(self):
        return f"GroupAtom({self.group.name})"


class LinearAtom:
    """A vector space factor (duals, loop algebras); brackets of frames vanish."""

    def __init__(self, shape, sampler=None, label="R"):
        self.shape = tuple(shape)
        self._sampler = sampler
        self.label = label

    def move(self, p, v, t):
        return p + t * np.asarray(v)

    def difference(self, q_plus, q_minus):
        return q_plus - q_minus

    def frame_bracket(self, v, w):
        return np.zeros(self.shape)

    def random_point(self, rng):
        if self._sampler is not None:
            return self._sampler(rng)
        return rng.normal(size=self.shape)

    def random_tangent(self, rng):
        return self.random_point(rng)

    def __eq__(self, other):
        return type(other) is type(self) and (other.shape, other.label) == (self.shape, self.label)

    def __hash__(self):
        return hash((type(self), self.shape, self.label))

    def __repr__(self):
        return f"{self.label}{self.shape}"


def DualAtom(algebra):
    return LinearAtom((algebra.dim,), label=f"Dual[{algebra.name}]")


def random_band_limited(rng, N, dim, band, scale=1.0, decay=1.0):
    """Real loop sampled on ``t_j = j/N`` with Fourier modes ``|k| <= band``.

    Coefficients are Gaussian with standard deviation ``scale / (1 + k)**decay``.
    """
    if band > N // 2 - 1:
        raise ValueError("band limit must sit below Nyquist")
    t = np.arange(N) / N
    out = np.tile(scale * rng.normal(size=dim), (N, 1))
    for k in range(1, band + 1):
        s = scale / (1.0 + k) ** decay
        a, b = s * rng.normal(size=dim), s * rng.normal(size=dim)
        out += np.outer(np.cos(2 * np.pi * k * t), a) + np.outer(np.sin(2 * np.pi * k * t), b)
    return out


class LoopAlgebraAtom(LinearAtom):
    """``Lg`` sampled on ``N`` points; values of shape ``(N, dim)``."""

    def __init__(self, algebra, N, band=4, scale=0.5):
        self.algebra, self.N, self.band, self.scale = algebra, N, band, scale
        super().__init__((N, algebra.dim), label=f"L{algebra.name}")

    def random_point(self, rng):
        return random_band_limited(rng, self.N, self.algebra.dim, self.band, self.scale)


class LoopGroupAtom:
    """``LG`` sampled on ``N`` points; values of shape ``(N, n, n)``, pointwise frames."""

    def __init__(self, group, N, band=2, scale=0.4):
        self.group, self.N, self.band, self.scale = group, N, band, scale
        self.shape = (N, group.dim)

    def move(self, p, v, t):
        return self.group.exp(t * np.asarray(v)) @ p

    def difference(self, q_plus, q_minus):
        return self.group.log(q_plus @ self.group.inv(q_minus))

    def frame_bracket(self, v, w):
        return self.group.algebra.bracket(v, w)

    def random_point(self, rng):
        return self.group.exp(random_band_limited(rng, self.N, self.group.dim, self.band, self.scale))

    def random_tangent(self, rng):
        return random_band_limited(rng, self.N, self.group.dim, self.band + 2, 0.5)

    def __eq__(self, other):
        return type(other) is type(self) and other.group is self.group and other.N == self.N

    def __hash__(self):
        return hash((type(self), id(self.group), self.N))

    def __repr__(self):
        return f"LoopGroupAtom({self.group.name}, N={self.N})"


# ---------------------------------------------------------------- spaces

@dataclass(frozen=True)
class SpaceDescriptor:
    """Ordered product of atoms.  Points and tangents are tuples, one entry per factor."""

    factors: tuple

    def __post_init__(self):
        if not self.factors:
            raise ValueError("a space needs at least one factor")
        object.__setattr__(self, "factors", tuple(self.factors))

    def __len__(self):
        return len(self.factors)

    def __mul__(self, other):
        return SpaceDescriptor(self.factors + other.factors)

    def move(self, p, v, t):
        return tuple(a.move(pi, vi, t) for a, pi, vi in zip(self.factors, p, v))

    def frame_bracket(self, v, w, sign):
        return tuple(sign * a.frame_bracket(vi, wi) for a, vi, wi in zip(self.factors, v, w))

    def zero_tangent(self):
        return tuple(np.zeros(a.shape) for a in self.factors)

    def tangent_basis(self):
        """All tangents with a single unit coordinate (a global frame)."""
        basis = []
        for i, a in enumerate(self.factors):
            for idx in np.ndindex(*a.shape):
                v = list(self.zero_tangent())
                e = np.zeros(a.shape)
                e[idx] = 1.0
                v[i] = e
                basis.append(tuple(v))
        return basis

    def random_point(self, rng):
        return tuple(a.random_point(rng) for a in self.factors)

    def random_tangent(self, rng):
        return tuple(a.random_tangent(rng) for a in self.factors)


def tangent_combine(*terms):
    """Linear combination of tangents given as ``(coefficient, tangent)`` pairs."""
    out = None
    for c, v in terms:
        scaled = tuple(c * np.asarray(x) for x in v)
        out = scaled if out is None else tuple(a + b for a, b in zip(out, scaled))
    return out


# ---------------------------------------------------------------- forms and maps

class DifferentialForm:
    """Degree-``k`` form, given by an evaluator ``(point, *tangents) -> float``."""

    def __init__(self, degree, space, evaluator, name=None):
        if degree < 0:
            raise ValueError("negative degree")
        self.degree = degree
        self.space = space
        self._evaluate = evaluator
        self.name = name

    def __call__(self, p, *vs):
        if len(vs) != self.degree:
            raise ValueError(f"{self.degree}-form evaluated on {len(vs)} tangents")
        return float(self._evaluate(p, *vs))

    def _check(self, other):
        if other.degree != self.degree:
            raise ValueError("degree mismatch")
        if other.space != self.space:
            raise ValueError("space mismatch")

    def __add__(self, other):
        self._check(other)
        return DifferentialForm(self.degree, self.space, lambda p, *vs: self(p, *vs) + other(p, *vs))

    def __sub__(self, other):
        self._check(other)
        return DifferentialForm(self.degree, self.space, lambda p, *vs: self(p, *vs) - other(p, *vs))

    def __rmul__(self, c):
        return DifferentialForm(self.degree, self.space, lambda p, *vs: c * self(p, *vs))

    def __neg__(self):
        return (-1.0) * self

    def __repr__(self):
        return f"DifferentialForm({self.name or '?'}, degree={self.degree})"


def zero_form(degree, space):
    return DifferentialForm(degree, space, lambda p, *vs: 0.0, name="0")


class SmoothMap:
    """Point map with an optional exact (right-trivialized) tangent map."""

    def __init__(self, domain, codomain, point_map, tangent_map=None, name=None):
        self.domain = domain
        self.codomain = codomain
        self.point_map = point_map
        self.tangent_map = tangent_map
        self.name = name

    def __call__(self, p):
        return self.point_map(p)

    def push(self, p, v, h=DEFAULT_H):
        if self.tangent_map is not None:
            return self.tangent_map(p, v)
        return tangent_map_fd(self, p, v, h)

    def then(self, other):
        """Composite ``other o self``."""
        tm = None
        if self.tangent_map is not None and other.tangent_map is not None:
            tm = lambda p, v: other.tangent_map(self(p), self.tangent_map(p, v))
        return SmoothMap(self.domain, other.codomain, lambda p: other(self(p)), tm)

    def without_tangent(self):
        return SmoothMap(self.domain, self.codomain, self.point_map, None, self.name)


def identity_map(space):
    return SmoothMap(space, space, lambda p: p, lambda p, v: v, name="id")


def move(space, p, v, t):
    return space.move(p, v, t)


def tangent_map_fd(F, p, v, h=DEFAULT_H):
    """Central-difference tangent map; group factors differenced by ``log(q+ q-^{-1})``."""
    if h <= 0:
        raise ValueError("step must be positive")
    q_plus = F(F.domain.move(p, v, h))
    q_minus = F(F.domain.move(p, v, -h))
    return tuple(a.difference(qp, qm) / (2 * h) for a, qp, qm in zip(F.codomain.factors, q_plus, q_minus))


def pullback(F, phi, h=DEFAULT_H):
    if phi.space != F.codomain:
        raise ValueError("form does not live on the map's codomain")

    def ev(p, *vs):
        q = F(p)
        return phi(q, *(F.push(p, v, h) for v in vs))

    return DifferentialForm(phi.degree, F.domain, ev, name=f"pullback({phi.name})")


def exterior_derivative(phi, h=DEFAULT_H, conv=None):
    """Finite-difference exterior derivative evaluated on frame fields.

    ``d phi(x_0..x_k) = sum_i (-1)^i D_{x_i} phi(..^x_i..)
    + sum_{i<j} (-1)^{i+j} phi([x_i, x_j], ..^x_i..^x_j..)``
    with ``D`` a central difference along :meth:`SpaceDescriptor.move`.
    """
    sign = resolve(conv).frame_bracket_sign
    space = phi.space
    k = phi.degree

    def ev(p, *xs):
        total = 0.0
        for i, x in enumerate(xs):
            rest = xs[:i] + xs[i + 1:]
            up = phi(space.move(p, x, h), *rest)
            down = phi(space.move(p, x, -h), *rest)
            total += (-1) ** i * (up - down) / (2 * h)
        if k >= 1:
            for i in range(len(xs)):
                for j in range(i + 1, len(xs)):
                    br = space.frame_bracket(xs[i], xs[j], sign)
                    rest = tuple(x for m, x in enumerate(xs) if m not in (i, j))
                    total += (-1) ** (i + j) * phi(p, br, *rest)
        return total

    return DifferentialForm(k + 1, space, ev, name=f"d({phi.name})")


def interior_product(phi, field):
    """``(i_V phi)(p; v_1..v_{k-1}) = phi(p; V(p), v_1..v_{k-1})``."""
    if phi.degree == 0:
        raise ValueError("cannot contract a function")
    return DifferentialForm(phi.degree - 1, phi.space, lambda p, *vs: phi(p, field(p), *vs),
                            name=f"i({phi.name})")


def maurer_cartan_right(group, g, v):
    return np.asarray(v)


def maurer_cartan_left(group, g, v):
    return group.adjoint(group.inv(g), v)


def alternation_residual(phi, p, vs):
    """Max deviation from antisymmetry under adjacent swaps."""
    base = phi(p, *vs)
    worst = 0.0
    for i in range(len(vs) - 1):
        sw = list(vs)
        sw[i], sw[i + 1] = sw[i + 1], sw[i]
        worst = max(worst, abs(base + phi(p, *sw)))
    return worst
