"""Discretized loops: the loop cocycle, gauge action, holonomy, ``mu`` and the Morita map.

Loops live on ``[0, 1)`` sampled at ``s_j = j / N``.  Algebra-valued loops are
arrays of shape ``(N, dim)``; group-valued loops are ``(N, n, n)`` matrix stacks.
Derivatives are spectral, and values between nodes come from trigonometric
interpolation, so band-limited inputs carry no discretization error until the
holonomy ODE.

The pairing on ``Lg`` is ``<a, b> = scale * int_0^1 (a, b) ds``.  The identity
relating the loop groupoid to the conjugation groupoid fixes ``scale = 1`` for
the ``mu`` of this module; other scales are accepted for experimentation.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .central_ext import omega_closed_formula
from .checks import Check, Report
from .conventions import resolve
from .geometry import (DEFAULT_H, DifferentialForm, LoopAlgebraAtom, LoopGroupAtom, SmoothMap, SpaceDescriptor,
                       exterior_derivative, random_band_limited)
from .simplicial import TransformationGroupoid, simplicial_coboundary


class LoopSpace:
    """Loops in ``G`` and its Lie algebra on an ``N``-point grid, with an ``M``-step holonomy solver.

    Parameters
    ----------
    group : MatrixGroup with an ad-invariant form
    N : int, power of two
    M : int, holonomy steps, ``M >= N``
    pairing_scale : float
        Constant in front of ``int_0^1 (a, b) ds``.
    band, scale : sampler settings for random loops.
    """

    def __init__(self, group, N=64, M=1024, pairing_scale=1.0, band=4, scale=0.5, conv=None):
        if N < 4 or N & (N - 1):
            raise ValueError("N must be a power of two")
        if M < N:
            raise ValueError("need M >= N")
        self.group = group
        self.algebra = group.algebra
        self.N, self.M = N, M
        self.pairing_scale = float(pairing_scale)
        self.band, self.scale = band, scale
        self.conv = resolve(conv)
        self.s = np.arange(N) / N
        self._k = np.fft.fftfreq(N, 1.0 / N)
        self.alg_atom = LoopAlgebraAtom(self.algebra, N, band=band, scale=scale)
        self.grp_atom = LoopGroupAtom(group, N)
        self._cache = {}

    # ------------------------------------------------ calculus on the grid

    def derivative(self, X):
        """Spectral derivative along the loop axis (works for vectors and matrices)."""
        X = np.asarray(X)
        shape = (-1,) + (1,) * (X.ndim - 1)
        D = np.fft.ifft(2j * np.pi * self._k.reshape(shape) * np.fft.fft(X, axis=0), axis=0)
        return D if np.iscomplexobj(X) else D.real

    def interpolate(self, X, s):
        """Trigonometric interpolant of a real loop at parameters ``s``."""
        return self._interp_matrix(tuple(np.atleast_1d(s))) @ np.asarray(X)

    def _interp_matrix(self, s):
        if s not in self._cache:
            s_arr = np.asarray(s)
            k = self._k.copy()
            k[self.N // 2] = 0.0
            W = np.exp(2j * np.pi * np.outer(s_arr, k))
            # split the Nyquist mode as a cosine so real data stay real
            W[:, self.N // 2] = np.cos(np.pi * self.N * s_arr)
            F = np.fft.fft(np.eye(self.N), axis=0) / self.N
            self._cache[s] = (W @ F).real
        return self._cache[s]

    def _grids(self, M):
        """Node and midpoint parameters for ``M`` steps."""
        return tuple(np.arange(M + 1) / M), tuple((np.arange(M) + 0.5) / M)

    def pair(self, a, b):
        return self.pairing_scale * float(np.mean(self.algebra.inner(a, b)))

    def bracket(self, X, Y):
        return self.algebra.bracket(X, Y)

    def _check(self, *loops):
        for X in loops:
            if np.shape(X)[0] != self.N:
                raise ValueError(f"loop has {np.shape(X)[0]} samples, expected {self.N}")

    def lambda_loop(self, X, Y):
        """Loop 2-cocycle ``lambda(X, Y) = sign * <X, Y'>``.

        The sign is tied to the gauge action so that the derivative of the loop
        1-cocycle at the identity is ``chi_sign * lambda^b``, as in the finite
        dimensional models.
        """
        self._check(X, Y)
        c = self.conv
        return -c.chi_sign * c.loop_gauge_sign * self.pair(X, self.derivative(Y))

    # ------------------------------------------------ gauge action

    def loop_chi(self, g, tol=1e-8):
        """``sign * g' g^{-1}``, projected to the algebra."""
        self._check(g)
        R = self.derivative(g) @ self.group.inv(g)
        x, resid = self.algebra.vee_residual(R)
        if resid > tol:
            raise ValueError(f"g' g^-1 leaves the algebra (residual {resid:.2e})")
        return self.conv.loop_gauge_sign * x

    def gauge_action(self, g, xi):
        """``Ad_g xi + sign * g' g^{-1}`` pointwise."""
        self._check(g, xi)
        return self.group.adjoint(g, xi) + self.loop_chi(g)

    def gauge_action_tangent(self, g, xi, v, eta):
        """Derivative of the gauge action for right-trivialized ``v`` and ``eta``."""
        zeta = self.gauge_action(g, xi)
        return self.bracket(v, zeta) + self.group.adjoint(g, eta) + self.conv.loop_gauge_sign * self.derivative(v)

    def groupoid(self):
        """``LG x Lg => Lg``."""
        return TransformationGroupoid(self.grp_atom, self.alg_atom, self.gauge_action, self.gauge_action_tangent,
                                      name=f"L{self.group.name}")

    # ------------------------------------------------ holonomy

    def holonomy_path(self, xi, M=None):
        """Solve ``h^-1 h' = xi`` with ``h(0) = e`` by the exponential midpoint rule.

        Returns ``(h, h_mid, xi_mid)``: nodes ``h_k`` (``M+1``), half-step values
        ``h_k exp(xi_mid dt / 2)`` and the interpolated midpoint data.
        """
        self._check(xi)
        M = self.M if M is None else M
        G = self.group
        dt = 1.0 / M
        xi_mid = self._interp_matrix(self._grids(M)[1]) @ xi
        steps = G.exp(dt * xi_mid)
        # inclusive prefix product h_{k+1} = E_0 E_1 ... E_k by recursive doubling
        P = steps.copy()
        shift = 1
        while shift < M:
            P[shift:] = P[:-shift] @ P[shift:]
            shift *= 2
        h = np.concatenate([G.identity()[None], G.project(P)])
        h_mid = h[:-1] @ G.exp(0.5 * dt * xi_mid)
        return h, h_mid, xi_mid

    def holonomy(self, xi, M=None):
        return self.holonomy_path(xi, M)[0][-1]

    def tangent_holonomy(self, xi, dxi, path=None):
        """Right-trivialized variation ``a(s) = int_0^s Ad_h(u) dxi(u) du`` of the holonomy path.

        Returns ``(a, a_dot)``: ``a`` at the ``M+1`` nodes (Simpson's rule) and
        ``a' = Ad_h dxi`` at the midpoints.
        """
        a, _, a_mid_dot = self._tangent(xi, dxi, path)
        return a, a_mid_dot

    def _tangent(self, xi, dxi, path):
        self._check(dxi)
        h, h_mid, _ = self.holonomy_path(xi) if path is None else path
        M = len(h_mid)
        nodes, mids = self._grids(M)
        d_node = self._interp_matrix(nodes) @ dxi
        d_mid = self._interp_matrix(mids) @ dxi
        ad_node = self.group.adjoint(h, d_node)
        ad_mid = self.group.adjoint(h_mid, d_mid)
        inc = (ad_node[:-1] + 4.0 * ad_mid + ad_node[1:]) / (6.0 * M)
        a = np.concatenate([np.zeros((1, self.algebra.dim)), np.cumsum(inc, axis=0)])
        return a, ad_node, ad_mid

    def mu(self, xi, d1, d2, path=None):
        """``mu(d1, d2) = 1/2 int_0^1 [(a1, a2') - (a2, a1')] ds`` by Simpson's rule.

        Midpoint values of ``a`` come from cubic Hermite interpolation.
        """
        path = self.holonomy_path(xi) if path is None else path
        M = len(path[1])
        a1, n1, m1 = self._tangent(xi, d1, path)
        a2, n2, m2 = self._tangent(xi, d2, path)
        B = self.algebra.inner

        def mid(a, n):
            return 0.5 * (a[1:] + a[:-1]) + (n[:-1] - n[1:]) / (8.0 * M)

        f_node = B(a1, n2) - B(a2, n1)
        f_mid = B(mid(a1, n1), m2) - B(mid(a2, n2), m1)
        return 0.5 * float(np.sum(f_node[:-1] + 4.0 * f_mid + f_node[1:]) / (6.0 * M))

    # ------------------------------------------------ forms

    def base_space(self):
        return SpaceDescriptor((self.alg_atom,))

    def mu_form(self):
        return DifferentialForm(2, self.base_space(), lambda p, a, b: self.mu(p[0], a[0], b[0]), name="mu")

    def omega_loop(self, point, t1, t2):
        """Loop instance of the symplectic groupoid form, evaluated in the target chart."""
        g, xi = point
        zeta = self.gauge_action(g, xi)
        e1 = self.gauge_action_tangent(g, xi, *t1)
        e2 = self.gauge_action_tangent(g, xi, *t2)
        val = omega_closed_formula(self.pair, self.bracket, self.lambda_loop, zeta, t1[0], t2[0], e1, e2)
        return self.conv.omega_gamma_sign * float(val)

    def omega_loop_form(self):
        gpd = self.groupoid()
        return DifferentialForm(2, gpd.nerve(1), self.omega_loop, name="omega_loop")

    # ------------------------------------------------ Morita morphism

    def morita_f0(self, xi):
        return self.holonomy(xi)

    def morita_f(self, point):
        g, r = point
        return (g[0], self.holonomy(r))

    def morita_f_map(self, target_groupoid):
        """``f`` as a smooth map ``LG x Lg -> G x G`` with its exact tangent map."""
        def tm(p, v):
            a, _ = self.tangent_holonomy(p[1], v[1])
            return (v[0][0], a[-1])

        return SmoothMap(self.groupoid().nerve(1), target_groupoid.nerve(1), self.morita_f, tm, name="f")

    def hol_section(self, x):
        """Constant loop at ``log x``."""
        return np.tile(self.group.log(x), (self.N, 1))

    # ------------------------------------------------ samplers

    def random_algebra_loop(self, rng, band=None, scale=None):
        return random_band_limited(rng, self.N, self.algebra.dim, self.band if band is None else band,
                                   self.scale if scale is None else scale)

    def random_group_loop(self, rng, band=1, scale=0.2):
        """``exp`` of a band-limited loop.

        The defaults keep ``g' g^-1`` gentle enough that the order-2 holonomy
        error of gauge-transformed loops stays below 1e-6 at ``M = 1024``.
        """
        return self.group.exp(random_band_limited(rng, self.N, self.algebra.dim, band, scale))


# ---------------------------------------------------------------- text I/O

def save_loop(path, X):
    """Write an algebra-valued loop: header ``N dim`` then one row per sample."""
    X = np.asarray(X, dtype=float)
    lines = [f"{X.shape[0]} {X.shape[1]}"] + [" ".join(repr(float(v)) for v in row) for row in X]
    Path(path).write_text("\n".join(lines) + "\n")


def load_loop(path):
    rows = Path(path).read_text().split("\n")
    N, dim = (int(v) for v in rows[0].split())
    X = np.array([[float(v) for v in r.split()] for r in rows[1:1 + N]])
    if X.shape != (N, dim):
        raise ValueError(f"loop file declares {N}x{dim} but holds {X.shape}")
    return X


# ---------------------------------------------------------------- verification

def richardson_order(L, xi, M):
    """Observed order from holonomies at ``M``, ``2M``, ``4M`` steps.

    Returns ``inf`` when the scheme is exact to rounding (abelian models).
    """
    h1, h2, h4 = (L.holonomy(xi, m) for m in (M, 2 * M, 4 * M))
    e1, e2 = np.max(np.abs(h1 - h2)), np.max(np.abs(h2 - h4))
    if e2 <= 1e-14:
        return np.inf
    return float(np.log2(e1 / e2))


def delta_mu_residuals(L, samples, rng, conv=None, h=DEFAULT_H, amm_group_form=None, cartan=None):
    """Max residuals of ``omega_loop - f*omega - s1 del mu`` and ``-hol*Omega - s2 d mu`` for both signs.

    Returns ``{(component, sign): residual}`` so a caller can see which sign pair works;
    sign ``0`` holds the size of the ``mu`` side, which tells whether a component can
    discriminate the sign at all.
    """
    from .amm import amm_two_form, cartan_three_form, conjugation_groupoid

    c = resolve(conv)
    G = L.group
    gpd = L.groupoid()
    conj = conjugation_groupoid(G)
    mu = L.mu_form()
    del_mu = simplicial_coboundary(gpd, 0, mu, c, h)
    d_mu = exterior_derivative(mu, h, c)
    X0, X1 = L.base_space(), gpd.nerve(1)
    out = {("i", 1): 0.0, ("i", -1): 0.0, ("ii", 1): 0.0, ("ii", -1): 0.0, ("i", 0): 0.0, ("ii", 0): 0.0}
    om_G = amm_group_form or (lambda p, a, b: amm_two_form(G, p, a, b))
    Om = cartan or (lambda g, *vs: cartan_three_form(G, g, *vs, conv=c))
    fmap = L.morita_f_map(conj)
    for _ in range(samples):
        p = X1.random_point(rng)
        t1, t2 = X1.random_tangent(rng), X1.random_tangent(rng)
        lhs = L.omega_loop(p, t1, t2) - om_G(fmap(p), fmap.push(p, t1), fmap.push(p, t2))
        dm = del_mu(p, t1, t2)
        out[("i", 0)] = max(out[("i", 0)], abs(dm))
        for s in (1, -1):
            out[("i", s)] = max(out[("i", s)], abs(lhs - s * dm))
        q = X0.random_point(rng)
        ws = [X0.random_tangent(rng) for _ in range(3)]
        path = L.holonomy_path(q[0])
        ends = [L.tangent_holonomy(q[0], w[0], path)[0][-1] for w in ws]
        lhs2 = -Om(path[0][-1], *ends)
        dmu = d_mu(q, *ws)
        out[("ii", 0)] = max(out[("ii", 0)], abs(dmu))
        for s in (1, -1):
            out[("ii", s)] = max(out[("ii", s)], abs(lhs2 - s * dmu))
    return out


def sign_pair_unique(res, tol):
    """One sign per component works; a component whose ``mu`` side vanishes must accept both."""
    for comp, key in (("i", "delta_mu"), ("ii", "hol_mu")):
        ok = [res[(comp, s)] <= tol[key] for s in (1, -1)]
        degenerate = res[(comp, 0)] <= tol[key]
        if not (all(ok) if degenerate else sum(ok) == 1):
            return False
    return True


def loop_suite(L, samples=50, seed=0, conv=None, h=DEFAULT_H, tol=None, fd_samples=None,
               parts=("core", "deltamu")):
    """Loop-space checks on one :class:`LoopSpace`.

    ``parts`` selects the holonomy/gauge checks (``core``) and the ``delta mu`` identity.
    """
    c = resolve(conv)
    tol = {"order": 1.95, "const_hol": 1e-8, "equivariance": 1e-6, "tangent_fd": 1e-5, "hol_mu": 1e-4,
           "del_omega_loop": 1e-6, "delta_mu": 1e-4, "gauge_left": 1e-8, "lambda_cocycle": 1e-10, **(tol or {})}
    rng = np.random.default_rng(seed)
    G = L.group
    report = Report(f"loop[{G.name}]")
    fd_samples = min(samples, 10) if fd_samples is None else fd_samples

    if "core" in parts:
        _core_checks(L, report, samples, rng, c, h, tol, fd_samples)
    if "deltamu" in parts:
        _delta_mu_checks(L, report, rng, c, h, tol, fd_samples)
    return report


def _core_checks(L, report, samples, rng, c, h, tol, fd_samples):
    G = L.group
    # holonomy order, constant loops, equivariance, tangent holonomy
    order = min(richardson_order(L, L.random_algebra_loop(rng), L.M // 4) for _ in range(3))
    report.add(Check("holonomy Richardson order", order, tol["order"], kind="lower"))
    const = equiv = tang = left = cyc = 0.0
    for k in range(samples):
        X0 = rng.normal(size=G.dim)
        const = max(const, float(np.max(np.abs(L.holonomy(np.tile(X0, (L.N, 1))) - G.exp(X0)))))
        xi = L.random_algebra_loop(rng)
        g = L.random_group_loop(rng)
        g2 = L.random_group_loop(rng)
        lhs = L.holonomy(L.gauge_action(g, xi))
        rhs = g[0] @ L.holonomy(xi) @ G.inv(g[0])
        equiv = max(equiv, float(np.max(np.abs(lhs - rhs))))
        left = max(left, float(np.max(np.abs(L.gauge_action(g @ g2, xi) - L.gauge_action(g, L.gauge_action(g2, xi))))))
        X, Y, Z = (L.random_algebra_loop(rng) for _ in range(3))
        br, lam = L.bracket, L.lambda_loop
        cyc = max(cyc, abs(lam(br(X, Y), Z) + lam(br(Y, Z), X) + lam(br(Z, X), Y)))
        if k < fd_samples:
            dxi = L.random_algebra_loop(rng)
            a, _ = L.tangent_holonomy(xi, dxi)
            eps = 1e-5
            hp, hm = L.holonomy(xi + eps * dxi), L.holonomy(xi - eps * dxi)
            fd = G.log(hp @ G.inv(hm)) / (2 * eps)
            tang = max(tang, float(np.max(np.abs(fd - a[-1]))))
    report.add(Check("constant-loop holonomy = exp", const, tol["const_hol"]))
    report.add(Check("holonomy gauge equivariance", equiv, tol["equivariance"]))
    report.add(Check("gauge action is a left action", left, tol["gauge_left"]))
    report.add(Check("loop lambda cocycle identity", cyc, tol["lambda_cocycle"]))
    report.add(Check("tangent holonomy vs finite differences", tang, tol["tangent_fd"]))

    # multiplicativity of omega_loop
    gpd = L.groupoid()
    del_om = simplicial_coboundary(gpd, 1, L.omega_loop_form(), c, h)
    X2 = gpd.nerve(2)
    mult = 0.0
    for _ in range(fd_samples):
        q = X2.random_point(rng)
        mult = max(mult, abs(del_om(q, X2.random_tangent(rng), X2.random_tangent(rng))))
    report.add(Check("del omega_loop = 0", mult, tol["del_omega_loop"]))


def _delta_mu_checks(L, report, rng, c, h, tol, fd_samples):
    # delta mu identity with the recorded signs, plus which signs would work
    res = delta_mu_residuals(L, fd_samples, rng, c, h)
    s1, s2 = c.delta_mu_s1, c.delta_mu_s2
    report.info["delta_mu_residuals"] = {f"{k[0]}{k[1]:+d}" if k[1] else f"{k[0]} size": v
                                         for k, v in res.items()}
    report.add(Check("hol*Omega vs d mu (recorded sign)", res[("ii", s2)], tol["hol_mu"]))
    report.add(Check("omega_loop - f*omega = s1 del mu", res[("i", s1)], tol["delta_mu"]))
    report.add(Check("delta mu: exactly one global sign pair", float(not sign_pair_unique(res, tol)), 0.0))
