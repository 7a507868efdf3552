"""The quasi-Hamiltonian cocycle ``(Omega, omega)`` on the conjugation groupoid ``G x G => G``."""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .checks import Check, Report
from .conventions import resolve
from .geometry import DEFAULT_H, DifferentialForm, GroupAtom, exterior_derivative, pullback
from .lie import ModelError
from .simplicial import TotalCochain, TransformationGroupoid, cocycle_residual, simplicial_coboundary

C_OMEGA_CANDIDATES = (Fraction(1, 12), Fraction(1, 4), Fraction(1, 2), Fraction(1))


def _require_invariant(G):
    if not G.algebra.ad_invariant:
        raise ModelError(f"{G.name} carries no ad-invariant form")


def conjugation_groupoid(G):
    """``G x G => G`` with ``g . x = g x g^-1``."""
    def act(g, x):
        return g @ x @ G.inv(g)

    def act_t(g, x, v, w):
        return v + G.adjoint(g, w) - G.adjoint(g @ x @ G.inv(g), v)

    A = GroupAtom(G)
    return TransformationGroupoid(A, A, act, act_t, name=f"conj[{G.name}]")


def cartan_three_form(G, g, v1, v2, v3, conv=None, c_omega=None):
    """``c (u1, [u2, u3])`` with ``u_i = g^-1 v_i g`` the left Maurer-Cartan values."""
    _require_invariant(G)
    c = float(resolve(conv).c_omega if c_omega is None else c_omega)
    gi = G.inv(g)
    u1, u2, u3 = (G.adjoint(gi, v) for v in (v1, v2, v3))
    alg = G.algebra
    return c * float(alg.inner(u1, alg.bracket(u2, u3)))


def cartan_form(G, conv=None, c_omega=None):
    gpd = conjugation_groupoid(G)
    return DifferentialForm(3, gpd.nerve(0),
                            lambda p, a, b, d: cartan_three_form(G, p[0], a[0], b[0], d[0], conv, c_omega),
                            name="Omega")


def amm_two_form(G, point, t1, t2):
    """The 2-form on ``G x G`` at ``(g, x)`` on right-trivialized tangents ``(v_i, w_i)``."""
    g, x = point
    alg = G.algebra
    gi, xi = G.inv(g), G.inv(x)
    a1, a2 = G.adjoint(gi, t1[0]), G.adjoint(gi, t2[0])
    b1, b2 = G.adjoint(xi, t1[1]), G.adjoint(xi, t2[1])
    bb1, bb2 = t1[1], t2[1]
    B = alg.inner
    val = (B(G.adjoint(x, a1), a2) - B(G.adjoint(x, a2), a1)
           + B(a1, b2 + bb2) - B(a2, b1 + bb1))
    return -0.5 * float(val)


def amm_two_form_by_pieces(G, point, t1, t2):
    """Second evaluator: build each pulled-back 1-form as a matrix and pair with the wedge rule.

    Works directly with matrices ``g^-1 dg``, ``x^-1 dx``, ``dx x^-1`` and the
    trace form, so it shares no coordinate code with :func:`amm_two_form`.
    """
    g, x = point
    alg = G.algebra
    hat = alg.hat
    gi, xi = np.linalg.inv(g), np.linalg.inv(x)
    # actual tangent vectors are V g, W x for right-trivialized V, W
    theta_g = [gi @ (hat(t[0]) @ g) for t in (t1, t2)]
    theta_x = [xi @ (hat(t[1]) @ x) for t in (t1, t2)]
    theta_bar_x = [(hat(t[1]) @ x) @ xi for t in (t1, t2)]
    Bm = _matrix_form(G)

    def wedge(A, Bv):
        return Bm(A[0], Bv[1]) - Bm(A[1], Bv[0])

    first = wedge([x @ a @ xi for a in theta_g], theta_g)
    second = wedge(theta_g, [a + b for a, b in zip(theta_x, theta_bar_x)])
    return -0.5 * float(np.real(first + second))


def _matrix_form(G):
    """Invariant form on matrices, fitted to the coordinate form on the basis."""
    E = G.algebra.matrix_basis
    raw = np.array([[np.trace(a @ b) for b in E] for a in E])
    if abs(raw[0, 0]) < 1e-12:  # nilpotent models: trace form degenerates
        vee, B = G.algebra.vee, G.algebra.inner
        return lambda X, Y: B(vee(X), vee(Y))
    k = G.algebra.bilinear_form[0, 0] / raw[0, 0]
    return lambda X, Y: k * np.trace(X @ Y)


def amm_form(G):
    gpd = conjugation_groupoid(G)
    return DifferentialForm(2, gpd.nerve(1), lambda p, a, b: amm_two_form(G, p, a, b), name="omega")


def amm_cochain(G, conv=None, c_omega=None):
    gpd = conjugation_groupoid(G)
    return TotalCochain(gpd, {0: cartan_form(G, conv, c_omega), 1: amm_form(G)}, 3)


def _structure(gpd, conv):
    """``(alpha, beta)`` as smooth maps ``Gamma_1 -> Gamma_0``."""
    t, s = gpd.target_map(), gpd.source_map()
    if resolve(conv).alpha_beta == "target,source":
        return t, s
    return s, t


def amm_residuals(G, samples, rng, conv=None, c_omega=None, h=DEFAULT_H, omega=None, n_fd=None):
    """Max residuals of ``dOmega = 0``, ``domega = alpha*Omega - beta*Omega`` and ``del omega = 0``."""
    gpd = conjugation_groupoid(G)
    Om = cartan_form(G, conv, c_omega)
    om = amm_form(G) if omega is None else omega
    alpha, beta = _structure(gpd, conv)
    d_om = exterior_derivative(om, h, conv)
    a_Om, b_Om = pullback(alpha, Om, h), pullback(beta, Om, h)
    d_Om = exterior_derivative(Om, h, conv)
    del_om = simplicial_coboundary(gpd, 1, om, conv, h)
    X0, X1, X2 = gpd.nerve(0), gpd.nerve(1), gpd.nerve(2)
    n_fd = samples if n_fd is None else n_fd
    res = {"dOmega": 0.0, "domega": 0.0, "del_omega": 0.0}
    for k in range(samples):
        if k < n_fd:
            p = X0.random_point(rng)
            res["dOmega"] = max(res["dOmega"], abs(d_Om(p, *(X0.random_tangent(rng) for _ in range(4)))))
            q = X1.random_point(rng)
            vs = [X1.random_tangent(rng) for _ in range(3)]
            res["domega"] = max(res["domega"], abs(d_om(q, *vs) - a_Om(q, *vs) + b_Om(q, *vs)))
        r = X2.random_point(rng)
        res["del_omega"] = max(res["del_omega"], abs(del_om(r, X2.random_tangent(rng), X2.random_tangent(rng))))
    return res


def admissible_c_omega(G, conv=None, samples=5, seed=0, tol=1e-5):
    """All candidate constants for which ``domega = alpha*Omega - beta*Omega`` holds."""
    return [c for c in C_OMEGA_CANDIDATES
            if amm_residuals(G, samples, np.random.default_rng(seed), conv, c)["domega"] <= tol]


def calibrate_c_omega(G, conv=None, samples=5, seed=0, tol=1e-5):
    """The unique candidate constant for which ``domega = alpha*Omega - beta*Omega`` holds."""
    ok = admissible_c_omega(G, conv, samples, seed, tol)
    if len(ok) != 1:
        raise RuntimeError(f"c_Omega calibration found {len(ok)} admissible constants: {ok}")
    return ok[0]


def verify_amm_cocycle(G, samples=200, seed=0, conv=None, h=DEFAULT_H, tol=None, n_fd=None, calibrate=True):
    """Report of the three component equations; optionally recalibrates ``c_Omega`` first."""
    c = resolve(conv)
    tol = {"fd": 1e-5, "del": 1e-8, **(tol or {})}
    report = Report(f"amm[{G.name}]")
    if calibrate and G.algebra.ad_invariant and np.any(G.algebra.structure_constants):
        ok = admissible_c_omega(G, c)
        report.info["c_omega_admissible"] = [str(x) for x in ok]
        report.add(Check("c_Omega calibration selects exactly one constant", float(len(ok) != 1), 0.0))
        report.add(Check("c_Omega calibration agrees with conventions", float(ok != [c.c_omega]), 0.0))
    res = amm_residuals(G, samples, np.random.default_rng(seed), c, None, h,
                        n_fd=min(samples, 40) if n_fd is None else n_fd)
    report.add(Check("dOmega = 0", res["dOmega"], tol["fd"]))
    report.add(Check("domega = alpha*Omega - beta*Omega", res["domega"], tol["fd"]))
    report.add(Check("del omega = 0", res["del_omega"], tol["del"]))
    full = full_cocycle_residual(G, min(samples, 5), seed, c, h)
    report.add(Check("delta(Omega + omega) = 0 in the total complex", max(full.values()), tol["fd"]))
    return report


def full_cocycle_residual(G, samples=10, seed=0, conv=None, h=DEFAULT_H):
    """Componentwise ``delta(Omega + omega)`` through the generic total differential.

    With ``delta = (-1)^p d + del`` the level-1 component is ``-d omega + del Omega``,
    which vanishes exactly when ``d omega = t*Omega - s*Omega``.
    """
    return cocycle_residual(amm_cochain(G, conv), np.random.default_rng(seed), samples, conv, h)


# ---------------------------------------------------------------- Cartan model

def generating_field(G, xi, x):
    """Fundamental field of conjugation at ``x``, right-trivialized: ``xi - Ad_x xi``."""
    return xi - G.adjoint(x, xi)


def cartan_one_form(G, xi):
    """``x -> 1/2 <theta + theta_bar, xi>`` as a 1-form on ``G``."""
    alg = G.algebra
    A = GroupAtom(G)
    from .geometry import SpaceDescriptor
    space = SpaceDescriptor((A,))

    def ev(p, v):
        x = p[0]
        return 0.5 * float(alg.inner(G.adjoint(G.inv(x), v[0]) + v[0], xi))

    return DifferentialForm(1, space, ev, name="<theta+theta_bar, xi>/2")


def cartan_model_residuals(G, xi, samples, rng, conv=None, h=DEFAULT_H):
    c = resolve(conv)
    Om = cartan_form(G, c)
    space = Om.space
    one = cartan_one_form(G, xi)
    d_one = exterior_derivative(one, h, c)
    d_Om = exterior_derivative(Om, h, c)
    res = {"dOmega": 0.0, "degree2": 0.0, "degree0": 0.0}
    for _ in range(samples):
        p = space.random_point(rng)
        vs = [space.random_tangent(rng) for _ in range(4)]
        res["dOmega"] = max(res["dOmega"], abs(d_Om(p, *vs)))
        X = (generating_field(G, xi, p[0]),)
        v1, v2 = vs[0], vs[1]
        res["degree2"] = max(res["degree2"], abs(d_one(p, v1, v2) + c.cartan_sign * Om(p, X, v1, v2)))
        res["degree0"] = max(res["degree0"], abs(2.0 * one(p, X)))
    return res


def cartan_model_check(G, xi_samples=5, point_samples=20, seed=0, conv=None, h=DEFAULT_H, tol=None):
    tol = {"fd": 1e-5, "exact": 1e-12, **(tol or {})}
    rng = np.random.default_rng(seed)
    worst = {"dOmega": 0.0, "degree2": 0.0, "degree0": 0.0}
    for _ in range(xi_samples):
        xi = rng.normal(size=G.dim)
        r = cartan_model_residuals(G, xi, point_samples, rng, conv, h)
        worst = {k: max(worst[k], r[k]) for k in worst}
    report = Report(f"cartan[{G.name}]")
    report.add(Check("dOmega = 0", worst["dOmega"], tol["fd"]))
    report.add(Check("degree 2: d<theta+theta_bar,xi>/2 + i_xi Omega = 0", worst["degree2"], tol["fd"]))
    report.add(Check("degree 0: <theta+theta_bar,xi>(xi_G) = 0", worst["degree0"], tol["exact"]))
    return report


# ---------------------------------------------------------------- period over SU(2)

def _orthonormal_basis(G):
    w, V = np.linalg.eigh(G.algebra.bilinear_form)
    return (V / np.sqrt(w)).T  # rows orthonormal for the form


def omega_density_at_identity(G, conv=None):
    """``kappa``: the value of ``Omega`` at ``e`` on a positively oriented orthonormal basis."""
    E = _orthonormal_basis(G)
    val = cartan_three_form(G, G.identity(), E[0], E[1], E[2], conv)
    return abs(val)


def su2_volume(G):
    """Riemannian volume of SU(2) for the invariant metric: a 3-sphere of radius ``sqrt(2/b)``.

    With ``b = (e1, e1)`` for ``e_k = -i sigma_k / 2``, the curve ``exp(t e1)`` closes at
    ``t = 4 pi`` with length ``4 pi sqrt(b)``, the great-circle length ``2 pi r``.
    """
    b = G.algebra.bilinear_form[0, 0]
    r = 2.0 * np.sqrt(b)
    return 2.0 * np.pi**2 * r**3


def integrate_omega_su2(G, conv=None):
    """``int_{SU(2)} Omega = kappa * Vol`` via bi-invariance."""
    if G.kind != "su2":
        raise ModelError("period integral implemented for su2 only")
    return omega_density_at_identity(G, conv) * su2_volume(G)


def integrate_omega_quadrature(G, n=24, conv=None):
    """Cross-check by Gauss-Legendre quadrature in Hopf coordinates.

    ``q = (cos(th) e^{i a}, sin(th) e^{i b})`` with ``th in [0, pi/2]``, ``a, b in [0, 2 pi)``.
    Tangents are obtained as right-trivialized logs of coordinate derivatives.
    """
    if G.kind != "su2":
        raise ModelError("period integral implemented for su2 only")
    xs, ws = np.polynomial.legendre.leggauss(n)
    th = (xs + 1) * np.pi / 4
    wth = ws * np.pi / 4
    # integrand is independent of the two angles by invariance; sample a few anyway
    angles = np.linspace(0, 2 * np.pi, 4, endpoint=False) + 0.3
    total = 0.0
    for t, wt in zip(th, wth):
        acc = 0.0
        for a in angles:
            for b in angles:
                acc += abs(_hopf_density(G, t, a, b, conv))
        total += wt * acc / len(angles) ** 2
    return total * (2 * np.pi) ** 2


def _hopf_point(t, a, b):
    z, w = np.cos(t) * np.exp(1j * a), np.sin(t) * np.exp(1j * b)
    return np.array([[z, -np.conj(w)], [w, np.conj(z)]])


def _hopf_density(G, t, a, b, conv):
    g = _hopf_point(t, a, b)
    gi = G.inv(g)
    eps = 1e-6
    tangents = []
    for d in np.eye(3):
        gp = _hopf_point(t + eps * d[0], a + eps * d[1], b + eps * d[2])
        gm = _hopf_point(t - eps * d[0], a - eps * d[1], b - eps * d[2])
        tangents.append(G.algebra.vee((gp - gm) / (2 * eps) @ gi))
    return cartan_three_form(G, g, *tangents, conv)


def conjugation_invariance_residual(G, rng, samples=20):
    """``omega`` at ``(hgh^-1, hxh^-1)`` on ``Ad_h``-transported tangents equals ``omega`` at ``(g, x)``."""
    worst = 0.0
    for _ in range(samples):
        g, x, h = G.random(rng), G.random(rng), G.random(rng)
        t1 = (rng.normal(size=G.dim), rng.normal(size=G.dim))
        t2 = (rng.normal(size=G.dim), rng.normal(size=G.dim))
        hi = G.inv(h)
        p2 = (h @ g @ hi, h @ x @ hi)
        s1 = tuple(G.adjoint(h, v) for v in t1)
        s2 = tuple(G.adjoint(h, v) for v in t2)
        worst = max(worst, abs(amm_two_form(G, p2, s1, s2) - amm_two_form(G, (g, x), t1, t2)))
    return worst
