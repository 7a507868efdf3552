"""Central extensions, the affine coadjoint action and the symplectic groupoid ``G x g*``.

Two models are provided.  ``heisenberg_full`` realizes the extension group
``R -> Heis -> R^{2n}`` explicitly, so every statement about the prequantization
groupoid ``R = Heis x g*`` can be evaluated.  ``su2_coboundary`` uses the
coboundary ``lambda(x, y) = <xi0, [x, y]>`` on su(2) to exercise a nonabelian
coadjoint action; it has no extension group, so only the ``Gamma``-level checks run.

All group tangents are right-trivialized.  A point of ``Gamma = G x g*`` is
``(g, xi)`` with ``xi`` the source and ``g . xi`` the target.
"""
from __future__ import annotations

import numpy as np

from .checks import Check, Report
from .conventions import resolve
from .geometry import (DEFAULT_H, DifferentialForm, DualAtom, GroupAtom, SmoothMap, exterior_derivative,
                       pullback)
from .lie import model_registry
from .simplicial import TransformationGroupoid, simplicial_coboundary


class TwoCocycle:
    """``lambda(x, y) = x^T L y`` on a Lie algebra."""

    def __init__(self, algebra, matrix):
        L = np.asarray(matrix, dtype=float)
        if L.shape != (algebra.dim, algebra.dim):
            raise ValueError("cocycle matrix has the wrong shape")
        self.algebra = algebra
        self.matrix = L

    def __call__(self, x, y):
        return np.einsum("...i,ij,...j->...", x, self.matrix, y)

    def flat(self, v):
        """``lambda^b(v)`` with ``<lambda^b(v), u> = lambda(v, u)``."""
        return np.asarray(v) @ self.matrix

    def residuals(self):
        E = self.algebra.basis()
        br = self.algebra.bracket
        cyc = 0.0
        for x in E:
            for y in E:
                for z in E:
                    cyc = max(cyc, abs(self(br(x, y), z) + self(br(y, z), x) + self(br(z, x), y)))
        return {"antisymmetry": float(np.max(np.abs(self.matrix + self.matrix.T))), "cocycle": float(cyc)}

    @classmethod
    def coboundary(cls, algebra, xi0):
        """``lambda(x, y) = <xi0, [x, y]>``."""
        C = algebra.structure_constants  # C[k, i, j]
        return cls(algebra, np.einsum("k,kij->ij", xi0, C))


class CentralExtensionAlgebra:
    """``g + R`` with ``[(x, a), (y, b)] = ([x, y], lambda(x, y))``; elements are length ``dim+1``."""

    def __init__(self, base, cocycle):
        self.base = base
        self.cocycle = cocycle
        self.dim = base.dim + 1

    def bracket(self, u, w):
        x, y = u[..., :-1], w[..., :-1]
        return np.concatenate([self.base.bracket(x, y), self.cocycle(x, y)[..., None]], axis=-1)

    def jacobi_residual(self):
        E = np.eye(self.dim)
        br = self.bracket
        worst = 0.0
        for x in E:
            for y in E:
                for z in E:
                    worst = max(worst, np.max(np.abs(br(x, br(y, z)) + br(y, br(z, x)) + br(z, br(x, y)))))
        return float(worst)


class ExtensionModel:
    """A Lie group ``G`` with a 2-cocycle and, when available, the extension group."""

    def __init__(self, kind, group, cocycle, xi0=None, extension=None, periodic=False):
        self.kind = kind
        self.group = group
        self.algebra = group.algebra
        self.cocycle = cocycle
        self.xi0 = xi0
        self.extension = extension
        self.periodic = periodic
        self.ext_algebra = CentralExtensionAlgebra(group.algebra, cocycle)

    @classmethod
    def heisenberg_full(cls, m=2, periodic=False):
        base = model_registry(f"heisenberg({m})")
        return cls("heisenberg_full", base, TwoCocycle(base.algebra, base.cocycle),
                   extension=base.extension, periodic=periodic)

    @classmethod
    def su2_coboundary(cls, xi0=(0.3, -0.2, 0.5)):
        G = model_registry("su2")
        xi0 = np.asarray(xi0, dtype=float)
        return cls("su2_coboundary", G, TwoCocycle.coboundary(G.algebra, xi0), xi0=xi0)

    @property
    def dim(self):
        return self.group.dim

    def require_extension(self):
        if self.extension is None:
            raise ValueError(f"model {self.kind} has no extension group")

    # extension group in exponential coordinates (x, c)

    def ext_coords(self, gt):
        return self.extension.log(gt)

    def ext_from_coords(self, u):
        u = np.array(u, dtype=float)
        if self.periodic:
            u[..., -1] = np.mod(u[..., -1], 2 * np.pi)
        return self.extension.exp(u)

    def ext_product_coords(self, u, w):
        """``(x, a)(y, b) = (x + y, a + b + lambda(x, y)/2)``, central part mod 2pi if periodic."""
        x, y = u[..., :-1], w[..., :-1]
        c = u[..., -1] + w[..., -1] + 0.5 * self.cocycle(x, y)
        if self.periodic:
            c = np.mod(c, 2 * np.pi)
        return np.concatenate([x + y, c[..., None]], axis=-1)

    def project(self, gt):
        """``pi~: G~ -> G``."""
        return self.group.exp(self.ext_coords(gt)[..., :-1])

    def central(self, c):
        u = np.zeros(self.dim + 1)
        u[-1] = c
        return self.extension.exp(u)

    def random_ext(self, rng, scale=1.0):
        return self.extension.exp(scale * rng.normal(size=self.dim + 1))


# ---------------------------------------------------------------- actions

def chi(model, g, conv=None):
    """Group 1-cocycle ``G -> g*`` integrating ``chi_sign * lambda^b``."""
    s = resolve(conv).chi_sign
    if model.kind == "heisenberg_full":
        x = model.group.log(g)
        return s * model.cocycle.flat(x)
    if model.kind == "su2_coboundary":
        return -s * (model.group.coadjoint_dual(g, model.xi0) - model.xi0)
    raise ValueError(f"unknown model {model.kind}")


def gauge_action(model, g, xi, conv=None):
    """``g . xi = Ad*_{g^-1} xi + chi(g)``."""
    return model.group.coadjoint_dual(g, xi) + chi(model, g, conv)


def coadjoint_extended(model, g, xi, t, conv=None):
    """``g . (xi, t) = (Ad*_{g^-1} xi + t chi(g), t)``."""
    return model.group.coadjoint_dual(g, xi) + t * chi(model, g, conv), t


def genuine_coadjoint(model, gt, xi, t=1.0):
    """Coadjoint action of the extension group itself on ``(xi, t)``, for cross-checks."""
    model.require_extension()
    out = model.extension.coadjoint_dual(gt, np.append(xi, t))
    return out[:-1], out[-1]


def gauge_action_tangent(model, g, xi, v, eta, conv=None):
    """Derivative of ``(g, xi) -> g . xi`` along right-trivialized ``v`` and ``eta``."""
    s = resolve(conv).chi_sign
    zeta = gauge_action(model, g, xi, conv)
    ad = model.algebra.ad_matrix(v)
    return -ad.T @ zeta + s * model.cocycle.flat(v) + model.group.coadjoint_dual(g, eta)


def action_groupoid(model, conv=None):
    """``Gamma = G x g* => g*`` for the gauge action."""
    return TransformationGroupoid(
        GroupAtom(model.group), DualAtom(model.algebra),
        lambda g, xi: gauge_action(model, g, xi, conv),
        lambda g, xi, v, eta: gauge_action_tangent(model, g, xi, v, eta, conv),
        name=f"Gamma[{model.kind}]")


def prequantization_groupoid(model, conv=None):
    """``R = G~ x g* => g*`` acting through ``pi~``."""
    model.require_extension()
    E = model.extension

    def act(gt, xi):
        return gauge_action(model, model.project(gt), xi, conv)

    def act_t(gt, xi, vt, eta):
        return gauge_action_tangent(model, model.project(gt), xi, vt[:-1], eta, conv)

    return TransformationGroupoid(GroupAtom(E), DualAtom(model.algebra), act, act_t, name="R")


def projection_map(model, conv=None):
    """``pi~: R -> Gamma``; on right-trivialized tangents it drops the central coordinate."""
    R, Gam = prequantization_groupoid(model, conv), action_groupoid(model, conv)
    return SmoothMap(R.nerve(1), Gam.nerve(1),
                     lambda p: (model.project(p[0]), p[1]),
                     lambda p, v: (v[0][:-1], v[1]), name="pi")


# ---------------------------------------------------------------- affine Poisson structure

class AffineFunction:
    """``F(xi) = <xi, X> + c``; gradient ``X`` everywhere."""

    def __init__(self, X, c=0.0):
        self.X = np.asarray(X, dtype=float)
        self.c = float(c)

    def __call__(self, xi):
        return float(np.dot(xi, self.X) + self.c)

    def gradient(self, xi):
        return self.X


class QuadraticFunction:
    """``F(xi) = xi^T Q xi / 2 + <xi, X>`` with ``Q`` symmetric."""

    def __init__(self, Q, X):
        Q = np.asarray(Q, dtype=float)
        self.Q = 0.5 * (Q + Q.T)
        self.X = np.asarray(X, dtype=float)

    def __call__(self, xi):
        return float(0.5 * xi @ self.Q @ xi + xi @ self.X)

    def gradient(self, xi):
        return self.Q @ xi + self.X


def fd_gradient(F, xi, h=DEFAULT_H):
    xi = np.asarray(xi, dtype=float)
    out = np.zeros_like(xi)
    for i in range(xi.size):
        e = np.zeros_like(xi)
        e[i] = h
        out[i] = (F(xi + e) - F(xi - e)) / (2 * h)
    return out


def _grad(F, xi):
    return F.gradient(xi) if hasattr(F, "gradient") else fd_gradient(F, xi)


def affine_poisson(model, F, G, xi):
    """``{F, G}(xi) = <xi, [dF, dG]> + lambda(dF, dG)``."""
    X, Y = _grad(F, xi), _grad(G, xi)
    return float(np.dot(xi, model.algebra.bracket(X, Y)) + model.cocycle(X, Y))


def affine_bracket_linear(model, F, G):
    """The bracket of two affine functions, again affine."""
    return AffineFunction(model.algebra.bracket(F.X, G.X), model.cocycle(F.X, G.X))


def jacobi_residual(model, F, G, H, xi):
    b = lambda a, c: affine_bracket_linear(model, a, c)
    return abs(b(b(F, G), H)(xi) + b(b(G, H), F)(xi) + b(b(H, F), G)(xi))


# ---------------------------------------------------------------- forms

def omega_closed_formula(pair, bracket, lam, zeta, v1, v2, eta1, eta2):
    """``<eta2, v1> - <eta1, v2> - <zeta, [v1, v2]> - lambda(v1, v2)``.

    ``eta_i`` are tangents of the target momentum ``zeta``.  Shared with the loop model.
    """
    return pair(eta2, v1) - pair(eta1, v2) - pair(zeta, bracket(v1, v2)) - lam(v1, v2)


def omega_gamma(model, point, t1, t2, conv=None):
    """Symplectic form of ``Gamma`` at ``(g, xi)`` on right-trivialized tangents ``(v_i, eta_i)``."""
    c = resolve(conv)
    g, xi = point
    zeta = gauge_action(model, g, xi, c)
    e1 = gauge_action_tangent(model, g, xi, t1[0], t1[1], c)
    e2 = gauge_action_tangent(model, g, xi, t2[0], t2[1], c)
    val = omega_closed_formula(np.dot, model.algebra.bracket, model.cocycle, zeta, t1[0], t2[0], e1, e2)
    return c.omega_gamma_sign * float(val)


def omega_gamma_form(model, conv=None):
    gam = action_groupoid(model, conv)
    return DifferentialForm(2, gam.nerve(1), lambda p, a, b: omega_gamma(model, p, a, b, conv), "omega_Gamma")


def theta_R(model, point, t, conv=None):
    """Liouville form restricted to ``t = 1``: ``<pi~(g~) . xi, v> + a``."""
    model.require_extension()
    gt, xi = point
    zeta = gauge_action(model, model.project(gt), xi, conv)
    return float(np.dot(zeta, t[0][:-1]) + t[0][-1])


def theta_R_form(model, conv=None):
    R = prequantization_groupoid(model, conv)
    return DifferentialForm(1, R.nerve(1), lambda p, v: theta_R(model, p, v, conv), "theta_R")


def omega_R(model, point, t1, t2):
    """Canonical form of ``T*G~`` on the ``t = 1`` hyperplane, from the extension group alone.

    Uses the genuine coadjoint action of ``G~``; no convention enters.
    """
    model.require_extension()
    gt, xi = point
    E = model.extension
    zeta = E.coadjoint_dual(gt, np.append(xi, 1.0))
    e1 = E.coadjoint_dual(gt, np.append(t1[1], 0.0))
    e2 = E.coadjoint_dual(gt, np.append(t2[1], 0.0))
    v1, v2 = t1[0], t2[0]
    return float(e1 @ v2 - e2 @ v1 - zeta @ E.algebra.bracket(v1, v2))


def omega_R_form(model, conv=None):
    R = prequantization_groupoid(model, conv)
    return DifferentialForm(2, R.nerve(1), lambda p, a, b: omega_R(model, p, a, b), "omega_R")


# ---------------------------------------------------------------- verification

def _gram(form, space, p):
    basis = space.tangent_basis()
    return np.array([[form(p, a, b) for b in basis] for a in basis])


def verify_prequantization(model, samples=100, seed=7, conv=None, h=DEFAULT_H, tol=None):
    """Residual report for the prequantization statements on ``model``.

    Items needing the extension group are skipped (and listed as such) for
    ``su2_coboundary``.
    """
    c = resolve(conv)
    tol = {"exact": 1e-12, "fd": 1e-5, "mult": 1e-8, "theta_mult": 1e-10, "morphism": 1e-10,
           "nondegeneracy": 1e-6, **(tol or {})}
    rng = np.random.default_rng(seed)
    report = Report(f"prequant[{model.kind}]")
    gam = action_groupoid(model, c)
    G1 = gam.nerve(1)
    om = omega_gamma_form(model, c)

    # closedness, nondegeneracy, multiplicativity
    d_om = exterior_derivative(om, h, c)
    del_om = simplicial_coboundary(gam, 1, om, c)
    closed = mult = 0.0
    smallest = np.inf
    n_fd = min(samples, 30)
    for k in range(samples):
        if k < n_fd:
            p = G1.random_point(rng)
            vs = [G1.random_tangent(rng) for _ in range(3)]
            closed = max(closed, abs(d_om(p, *vs)))
        if k < 10:
            p = G1.random_point(rng)
            smallest = min(smallest, np.linalg.svd(_gram(om, G1, p), compute_uv=False)[-1])
        q = gam.nerve(2).random_point(rng)
        ws = [gam.nerve(2).random_tangent(rng) for _ in range(2)]
        mult = max(mult, abs(del_om(q, *ws)))
    report.add(Check("d omega_Gamma = 0", closed, tol["fd"]))
    report.add(Check("omega_Gamma nondegenerate (min singular value)", smallest, tol["nondegeneracy"],
                     kind="lower"))
    report.add(Check("del omega_Gamma = 0", mult, tol["mult"]))

    if model.extension is None:
        for item in ("omega_R basic", "omega_R = pi~* omega_Gamma", "pi~ groupoid morphism",
                     "central fiber preserves theta_R", "del theta_R = 0", "d theta_R = pi~* omega_Gamma"):
            report.skip(item, "model has no extension group")
        return report

    R = prequantization_groupoid(model, c)
    R1 = R.nerve(1)
    pi = projection_map(model, c)
    pull_om = pullback(pi, om, h)
    th = theta_R_form(model, c)
    omR = omega_R_form(model, c)
    d_th = exterior_derivative(th, h, c)
    del_th = simplicial_coboundary(R, 1, th, c)

    basic = descent = morph = fiber = th_mult = d_th_res = 0.0
    for k in range(samples):
        p = R1.random_point(rng)
        t1, t2 = R1.random_tangent(rng), R1.random_tangent(rng)
        vert = (np.append(np.zeros(model.dim), rng.normal()), np.zeros(model.dim))
        z = model.central(rng.normal())
        pz = (p[0] @ z, p[1])
        basic = max(basic, abs(omR(p, vert, t1)), abs(omR(pz, t1, t2) - omR(p, t1, t2)))
        descent = max(descent, abs(omR(p, t1, t2) - pull_om(p, t1, t2)))
        fiber = max(fiber, abs(th(pz, t1) - th(p, t1)),
                    float(np.max(np.abs(model.project(pz[0]) - model.project(p[0])))))
        # morphism: pi~ commutes with multiplication and structure maps
        a2, b2 = R.nerve(2).random_point(rng)[:2], None
        gt, ht, xi = a2[0], a2[1], R1.random_point(rng)[1]
        b = (ht, xi)
        a = (gt, R.target(b))
        ab = R.multiply(a, b)
        lhs = (model.project(ab[0]), ab[1])
        rhs = gam.multiply((model.project(a[0]), a[1]), (model.project(b[0]), b[1]))
        morph = max(morph, float(np.max(np.abs(lhs[0] - rhs[0]))), float(np.max(np.abs(lhs[1] - rhs[1]))),
                    float(np.max(np.abs(R.target(b) - gam.target((model.project(ht), xi))))))
        q = R.nerve(2).random_point(rng)
        th_mult = max(th_mult, abs(del_th(q, R.nerve(2).random_tangent(rng))))
        if k < n_fd:
            d_th_res = max(d_th_res, abs(d_th(p, t1, t2) - pull_om(p, t1, t2)))
    report.add(Check("omega_R basic", basic, tol["exact"]))
    report.add(Check("omega_R = pi~* omega_Gamma", descent, tol["exact"]))
    report.add(Check("pi~ groupoid morphism", morph, tol["morphism"]))
    report.add(Check("central fiber preserves theta_R", fiber, tol["morphism"]))
    report.add(Check("del theta_R = 0", th_mult, tol["theta_mult"]))
    report.add(Check("d theta_R = pi~* omega_Gamma", d_th_res, tol["fd"]))
    return report


def extension_structure_checks(model, samples=50, seed=7, conv=None, h=DEFAULT_H):
    """Cocycles, actions and the affine bracket behind the prequantization statements."""
    c = resolve(conv)
    rng = np.random.default_rng(seed)
    G, alg = model.group, model.algebra
    report = Report(f"extension[{model.kind}]")
    cres = model.cocycle.residuals()
    report.add(Check("lambda antisymmetric", cres["antisymmetry"], 1e-15))
    report.add(Check("lambda cocycle identity", cres["cocycle"], 1e-12))
    report.add(Check("extension bracket Jacobi", model.ext_algebra.jacobi_residual(), 1e-12))
    chi_cyc = left = slice_ = jac = dchi = genuine = per = 0.0
    for _ in range(samples):
        g1, g2 = G.random(rng), G.random(rng)
        xi = rng.normal(size=model.dim)
        chi_cyc = max(chi_cyc, float(np.max(np.abs(
            chi(model, g1 @ g2, c) - G.coadjoint_dual(g1, chi(model, g2, c)) - chi(model, g1, c)))))
        left = max(left, float(np.max(np.abs(
            gauge_action(model, g1 @ g2, xi, c) - gauge_action(model, g1, gauge_action(model, g2, xi, c), c)))))
        one, t = coadjoint_extended(model, g1, xi, 1.0, c)
        zero, _ = coadjoint_extended(model, g1, xi, 0.0, c)
        slice_ = max(slice_, float(np.max(np.abs(one - gauge_action(model, g1, xi, c)))),
                     float(np.max(np.abs(zero - G.coadjoint_dual(g1, xi)))), abs(t - 1.0))
        F, Gf, H = (AffineFunction(rng.normal(size=model.dim)) for _ in range(3))
        jac = max(jac, jacobi_residual(model, F, Gf, H, xi))
        v = rng.normal(size=model.dim)
        fd = (chi(model, G.exp(h * v), c) - chi(model, G.exp(-h * v), c)) / (2 * h)
        dchi = max(dchi, float(np.max(np.abs(fd - c.chi_sign * model.cocycle.flat(v)))))
        if model.extension is not None:
            gt = model.random_ext(rng)
            gz, tz = genuine_coadjoint(model, gt, xi)
            genuine = max(genuine, float(np.max(np.abs(gz - gauge_action(model, model.project(gt), xi, c)))),
                          abs(tz - 1.0))
            u, w = rng.normal(size=model.dim + 1), rng.normal(size=model.dim + 1)
            diff = model.ext_product_coords(u, w) - model.ext_coords(model.extension.exp(u) @ model.extension.exp(w))
            if model.periodic:
                diff[-1] = (diff[-1] + np.pi) % (2 * np.pi) - np.pi
            per = max(per, float(np.max(np.abs(diff))))
    report.add(Check("chi group cocycle identity", chi_cyc, 1e-10))
    report.add(Check("d chi at e = chi_sign lambda^b", dchi, 1e-6))
    report.add(Check("gauge action is a left action", left, 1e-10))
    report.add(Check("t = 1 slice reproduces the gauge action", slice_, 1e-12))
    report.add(Check("affine bracket Jacobi (linear functions)", jac, 1e-12))
    if model.extension is not None:
        report.add(Check("gauge action = coadjoint action of the extension group", genuine, 1e-12))
        report.add(Check("extension product in coordinates matches matrices", per, 1e-12))
    return report
