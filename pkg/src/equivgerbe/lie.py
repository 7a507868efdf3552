"""Matrix Lie algebras and groups, plus the small registry of concrete models.

Algebra elements are coordinate vectors over a fixed basis (trailing axis of
length ``dim``); dual vectors use the dual basis so the pairing is a plain dot
product.  Group elements are ``n x n`` matrices.  Every routine broadcasts over
leading axes, which is what the loop-space code relies on.
"""
from __future__ import annotations

import re
from functools import lru_cache

import numpy as np


class LogDomainError(ValueError):
    """Raised when a logarithm is requested outside the injectivity region."""


class ModelError(ValueError):
    """A Lie model failed one of its structural invariants."""


class LieAlgebra:
    """Finite-dimensional matrix Lie algebra with a chosen basis.

    Parameters
    ----------
    name : str
    matrix_basis : array_like, shape (dim, n, n)
        Matrices realizing the basis vectors ``e_i``.
    bilinear_form : array_like, shape (dim, dim), optional
        Symmetric form ``B``; defaults to the identity.
    ad_invariant : bool
        Whether ``B([x,y],z) + B(y,[x,z]) = 0`` is claimed (and checked).
    """

    def __init__(self, name, matrix_basis, bilinear_form=None, ad_invariant=False):
        basis = np.asarray(matrix_basis)
        if basis.ndim != 3 or basis.shape[1] != basis.shape[2]:
            raise ModelError("matrix_basis must have shape (dim, n, n)")
        self.name = name
        self.dim = basis.shape[0]
        self.n = basis.shape[1]
        self.matrix_basis = basis
        self.is_complex = np.iscomplexobj(basis)
        flat = self._realify(basis.reshape(self.dim, -1))
        self._coords_from_flat = np.linalg.pinv(flat)
        self.bilinear_form = (np.eye(self.dim) if bilinear_form is None
                              else np.asarray(bilinear_form, dtype=float))
        self.ad_invariant = ad_invariant
        C = np.empty((self.dim, self.dim, self.dim))
        for i in range(self.dim):
            for j in range(self.dim):
                comm = basis[i] @ basis[j] - basis[j] @ basis[i]
                C[:, i, j] = self.vee(comm, tol=1e-12)
        C[np.abs(C) < 1e-14] = 0.0
        self.structure_constants = C
        self.validate()

    @staticmethod
    def _realify(flat):
        if np.iscomplexobj(flat):
            return np.concatenate([flat.real, flat.imag], axis=-1)
        return flat

    # coordinates <-> matrices

    def hat(self, x):
        """Matrix ``sum_i x_i e_i``; broadcasts over leading axes."""
        return np.tensordot(np.asarray(x), self.matrix_basis, axes=([-1], [0]))

    def vee(self, X, tol=None):
        """Coordinates of a matrix in the span of the basis.

        With ``tol`` set, raise :class:`ModelError` when ``X`` leaves the span
        by more than ``tol`` (max-abs entry of the residual).
        """
        X = np.asarray(X)
        flat = X.reshape(X.shape[:-2] + (self.n * self.n,))
        if self.is_complex:
            flat = np.concatenate([flat.real, flat.imag], axis=-1)
        elif np.iscomplexobj(flat):
            flat = flat.real
        coords = flat @ self._coords_from_flat
        if tol is not None:
            resid = np.max(np.abs(self.hat(coords) - X), initial=0.0)
            if resid > tol:
                raise ModelError(f"matrix leaves the span of {self.name} (residual {resid:.3g})")
        return coords

    def vee_residual(self, X):
        X = np.asarray(X)
        coords = self.vee(X)
        return coords, float(np.max(np.abs(self.hat(coords) - X), initial=0.0))

    # algebra operations

    def bracket(self, x, y):
        return np.einsum("kij,...i,...j->...k", self.structure_constants, x, y)

    def inner(self, x, y):
        return np.einsum("...i,ij,...j->...", x, self.bilinear_form, y)

    def ad_matrix(self, x):
        """Matrix of ``y -> [x, y]`` in coordinates."""
        return np.einsum("kij,...i->...kj", self.structure_constants, x)

    def flat(self, x):
        """Index-lowering map ``x -> B x`` (algebra to dual coordinates)."""
        return np.asarray(x) @ self.bilinear_form

    def sharp(self, xi):
        return np.linalg.solve(self.bilinear_form, np.asarray(xi).T).T

    def basis(self):
        return np.eye(self.dim)

    def residuals(self):
        """Max residuals of the structural invariants, keyed by name."""
        C, B = self.structure_constants, self.bilinear_form
        out = {"antisymmetry": float(np.max(np.abs(C + C.transpose(0, 2, 1)), initial=0.0))}
        E = np.eye(self.dim)
        jac = 0.0
        inv = 0.0
        for a in E:
            for b in E:
                for c in E:
                    j = (self.bracket(a, self.bracket(b, c)) + self.bracket(b, self.bracket(c, a))
                         + self.bracket(c, self.bracket(a, b)))
                    jac = max(jac, float(np.max(np.abs(j))))
                    inv = max(inv, abs(self.inner(self.bracket(a, b), c) + self.inner(b, self.bracket(a, c))))
        out["jacobi"] = jac
        out["form_symmetry"] = float(np.max(np.abs(B - B.T), initial=0.0))
        out["ad_invariance"] = inv if self.ad_invariant else 0.0
        return out

    def validate(self, tol=1e-12):
        for key, value in self.residuals().items():
            if value > tol:
                raise ModelError(f"{self.name}: {key} residual {value:.3g} exceeds {tol:g}")

    def __repr__(self):
        return f"LieAlgebra({self.name!r}, dim={self.dim})"


class MatrixGroup:
    """Matrix Lie group with model-specific exponential and logarithm.

    ``kind`` selects the closed-form routines: ``"su2"`` (quaternion formula),
    ``"so3"`` (Rodrigues) or ``"nilpotent"`` (terminating power series, used by
    the abelian and Heisenberg models).
    """

    def __init__(self, name, algebra, kind):
        if kind not in ("su2", "so3", "nilpotent"):
            raise ModelError(f"unknown group kind {kind!r}")
        self.name = name
        self.algebra = algebra
        self.kind = kind
        self.dim = algebra.dim
        self.n = algebra.n
        self.dtype = complex if algebra.is_complex else float
        self.extension = None
        self.cocycle = None

    def identity(self):
        return np.eye(self.n, dtype=self.dtype)

    def mul(self, g, h):
        return np.matmul(g, h)

    def inv(self, g):
        if self.kind == "su2":
            return np.conj(np.swapaxes(g, -1, -2))
        if self.kind == "so3":
            return np.swapaxes(g, -1, -2)
        return np.linalg.inv(g)

    def exp(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "su2":
            # hat(x) = -(i/2) x.sigma, so exp = cos(|x|/2) + 2 sin(|x|/2)/|x| hat(x)
            r = np.linalg.norm(x, axis=-1)[..., None, None]
            half = 0.5 * r
            c = np.cos(half)
            s = np.where(r > 1e-8, 2.0 * np.sin(half) / np.where(r > 1e-8, r, 1.0),
                         1.0 - r**2 / 24.0)
            return c * self.identity() + s * self.algebra.hat(x)
        if self.kind == "so3":
            r = np.linalg.norm(x, axis=-1)[..., None, None]
            K = self.algebra.hat(x)
            small = r < 1e-6
            safe = np.where(small, 1.0, r)
            a = np.where(small, 1.0 - r**2 / 6.0, np.sin(safe) / safe)
            b = np.where(small, 0.5 - r**2 / 24.0, (1.0 - np.cos(safe)) / safe**2)
            return self.identity() + a * K + b * (K @ K)
        X = self.algebra.hat(x)
        out = np.broadcast_to(self.identity(), X.shape).copy()
        term = out.copy()
        for k in range(1, self.n):
            term = term @ X / k
            out = out + term
        return out

    def log(self, g):
        g = np.asarray(g)
        if self.kind == "su2":
            a0 = np.real(np.trace(g, axis1=-2, axis2=-1)) / 2.0
            # anti-hermitian part equals hat(2a) where (a0, a) is the unit quaternion
            a = 0.5 * self.algebra.vee(0.5 * (g - self.inv(g)))
            na = np.linalg.norm(a, axis=-1)
            if np.any((na < 1e-8) & (a0 < 0)):
                raise LogDomainError("su2 log undefined at -I")
            theta = 2.0 * np.arctan2(na, a0)
            scale = np.where(na > 1e-12, theta / np.where(na > 1e-12, na, 1.0), 2.0)
            return scale[..., None] * a
        if self.kind == "so3":
            tr = np.clip((np.trace(g, axis1=-2, axis2=-1) - 1.0) / 2.0, -1.0, 1.0)
            theta = np.arccos(tr)
            if np.any(theta > np.pi - 1e-6):
                raise LogDomainError("so3 log ill-defined near rotation angle pi")
            w = self.algebra.vee(0.5 * (g - np.swapaxes(g, -1, -2)))
            s = np.sin(theta)
            scale = np.where(theta > 1e-6, theta / np.where(theta > 1e-6, s, 1.0), 1.0 + theta**2 / 6.0)
            return scale[..., None] * w
        N = g - self.identity()
        out = np.zeros_like(N)
        term = np.broadcast_to(self.identity(), N.shape).copy()
        for k in range(1, self.n):
            term = term @ N
            out = out + ((-1) ** (k + 1) / k) * term
        return self.algebra.vee(out, tol=1e-8)

    def adjoint(self, g, x):
        """``Ad_g x`` in coordinates (conjugation, then projection)."""
        X = self.algebra.hat(x)
        return self.algebra.vee(np.matmul(np.matmul(g, X), self.inv(g)))

    def adjoint_matrix(self, g):
        """Matrix ``A(g)`` with ``Ad_g x = A(g) x``; broadcasts over ``g``."""
        E = self.algebra.matrix_basis
        g = np.asarray(g)
        conj = np.matmul(np.matmul(g[..., None, :, :], E), self.inv(g)[..., None, :, :])
        return np.swapaxes(self.algebra.vee(conj), -1, -2)

    def coadjoint_dual(self, g, xi):
        """``Ad*_{g^{-1}} xi``: transpose of the coordinate matrix of ``Ad_{g^{-1}}``."""
        A = self.adjoint_matrix(self.inv(g))
        return np.einsum("...ji,...j->...i", A, xi)

    def membership_residual(self, g):
        g = np.asarray(g)
        if self.kind == "su2":
            unit = np.max(np.abs(g @ self.inv(g) - self.identity()))
            det = np.max(np.abs(np.linalg.det(g) - 1.0))
            return float(max(unit, det))
        if self.kind == "so3":
            unit = np.max(np.abs(g @ np.swapaxes(g, -1, -2) - self.identity()))
            det = np.max(np.abs(np.linalg.det(g) - 1.0))
            return float(max(unit, det))
        # unipotent upper-triangular, and the log lands in the algebra span
        lower = np.max(np.abs(np.tril(g, -1)), initial=0.0)
        diag = np.max(np.abs(np.diagonal(g, axis1=-2, axis2=-1) - 1.0), initial=0.0)
        N = g - self.identity()
        L = np.zeros_like(N)
        term = np.broadcast_to(self.identity(), N.shape).copy()
        for k in range(1, self.n):
            term = term @ N
            L = L + ((-1) ** (k + 1) / k) * term
        _, resid = self.algebra.vee_residual(L)
        return float(max(lower, diag, resid))

    def project(self, g):
        """Nearest group element; removes round-off drift after long products."""
        if self.kind == "su2":
            a0 = np.real(np.trace(g, axis1=-2, axis2=-1)) / 2.0
            a = 0.5 * self.algebra.vee(0.5 * (g - self.inv(g)))
            norm = np.sqrt(a0**2 + np.sum(a**2, axis=-1))
            a0, a = a0 / norm, a / norm[..., None]
            return a0[..., None, None] * self.identity() + self.algebra.hat(2.0 * a)
        if self.kind == "so3":
            u, _, vt = np.linalg.svd(g)
            return u @ vt
        return g

    def random(self, rng, size=None, scale=1.0):
        """Random group element(s).

        For ``su2`` this draws from Haar measure (``scale`` ignored); otherwise
        it exponentiates Gaussian coordinates with standard deviation ``scale``.
        """
        shape = () if size is None else (size,) if np.isscalar(size) else tuple(size)
        if self.kind == "su2":
            q = rng.normal(size=shape + (4,))
            q /= np.linalg.norm(q, axis=-1, keepdims=True)
            return q[..., 0, None, None] * self.identity() + self.algebra.hat(2.0 * q[..., 1:])
        return self.exp(scale * rng.normal(size=shape + (self.dim,)))

    def __repr__(self):
        return f"MatrixGroup({self.name!r}, dim={self.dim})"


# module-level operations on coordinate vectors

def _same(model_a, x, y):
    if np.shape(x)[-1] != model_a.dim or np.shape(y)[-1] != model_a.dim:
        raise ValueError(f"coordinate length does not match {model_a.name} (dim {model_a.dim})")


def bracket(algebra, x, y):
    _same(algebra, x, y)
    return algebra.bracket(x, y)


def inner(algebra, x, y):
    _same(algebra, x, y)
    return algebra.inner(x, y)


# concrete models

_PAULI = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]], [[1, 0], [0, -1]]], dtype=complex)


def _su2():
    basis = -0.5j * _PAULI  # [e1, e2] = e3
    B = np.array([[-np.trace(a @ b).real for b in basis] for a in basis])
    alg = LieAlgebra("su2", basis, B, ad_invariant=True)
    return MatrixGroup("su2", alg, "su2")


def _so3():
    basis = np.zeros((3, 3, 3))
    for k, (i, j) in enumerate([(1, 2), (2, 0), (0, 1)]):
        basis[k, j, i] = 1.0
        basis[k, i, j] = -1.0
    B = np.array([[-0.5 * np.trace(a @ b) for b in basis] for a in basis])
    alg = LieAlgebra("so3", basis, B, ad_invariant=True)
    return MatrixGroup("so3", alg, "so3")


def _abelian(n, name=None):
    basis = np.zeros((n, n + 1, n + 1))
    for i in range(n):
        basis[i, 0, i + 1] = 1.0
    alg = LieAlgebra(name or f"abelian({n})", basis, np.eye(n), ad_invariant=True)
    return MatrixGroup(alg.name, alg, "nilpotent")


def standard_symplectic(m):
    """Matrix of the standard 2-form on R^{2n}: ``lambda(x, y) = p.q' - q.p'``."""
    k = m // 2
    J = np.zeros((m, m))
    J[:k, k:] = np.eye(k)
    J[k:, :k] = -np.eye(k)
    return J


def _heisenberg_full(m):
    """Heisenberg group of dimension m+1, coordinates (p_1..p_k, q_1..q_k, c)."""
    k = m // 2
    size = k + 2
    basis = np.zeros((m + 1, size, size))
    for i in range(k):
        basis[i, 0, 1 + i] = 1.0          # p_i
        basis[k + i, 1 + i, size - 1] = 1.0  # q_i
    basis[m, 0, size - 1] = 1.0           # central c
    alg = LieAlgebra(f"heis({m + 1})", basis, np.eye(m + 1), ad_invariant=False)
    return MatrixGroup(alg.name, alg, "nilpotent")


_MODEL_RE = re.compile(r"^(su2|so3|abelian|heisenberg)(?:\((\d+)\))?$")


@lru_cache(maxsize=None)
def model_registry(name):
    """Return a validated :class:`MatrixGroup` by name.

    Recognized names: ``su2``, ``so3``, ``abelian(n)`` and ``heisenberg(2n)``.
    The Heisenberg entry is the abelian base group ``R^{2n}``; the full central
    extension is attached as ``.extension`` and the cocycle matrix as ``.cocycle``.
    """
    m = _MODEL_RE.match(name.replace(" ", ""))
    if not m:
        raise KeyError(f"unknown model {name!r}")
    kind, arg = m.group(1), m.group(2)
    if kind == "su2":
        return _su2()
    if kind == "so3":
        return _so3()
    n = int(arg) if arg else (2 if kind == "heisenberg" else 1)
    if n < 1:
        raise KeyError(f"model {name!r} needs a positive size")
    if kind == "abelian":
        return _abelian(n)
    if n % 2:
        raise KeyError("heisenberg(m) needs even m")
    base = _abelian(n, name=f"heisenberg({n})")
    base.extension = _heisenberg_full(n)
    base.cocycle = standard_symplectic(n)
    return base
