"""Select every convention by trying all alternatives against independent identities.

Each stage fixes the conventions it can see and hands the result to the next:

1. frame bracket sign: ``d d f = 0`` for a function on su(2);
2. cocycle and symplectic-form signs: the prequantization checks on the Heisenberg model;
3. face orientation, ``alpha/beta`` roles and ``c_Omega``: the AMM component equation
   together with the full total-complex cocycle condition;
4. Cartan-model sign;
5. loop gauge sign: holonomy equivariance;
6. ``(s1, s2)``: the ``delta mu`` identity.

Any stage with zero or several survivors raises :class:`CalibrationError`.
"""
from __future__ import annotations

import itertools

import numpy as np

from .amm import C_OMEGA_CANDIDATES, amm_residuals, cartan_model_residuals, full_cocycle_residual
from .central_ext import ExtensionModel, verify_prequantization
from .conventions import ALPHA_BETA, ORIENTATIONS, Conventions
from .geometry import DifferentialForm, GroupAtom, SpaceDescriptor, exterior_derivative
from .lie import model_registry
from .loopspace import LoopSpace, delta_mu_residuals


class CalibrationError(RuntimeError):
    pass


def _unique(stage, survivors):
    if len(survivors) != 1:
        raise CalibrationError(f"{stage}: {len(survivors)} admissible choices {survivors}")
    return survivors[0]


def _frame_sign(rng):
    G = model_registry("su2")
    space = SpaceDescriptor((GroupAtom(G),))
    A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    f = DifferentialForm(0, space, lambda p: float(np.real(np.trace(A @ p[0] @ A @ p[0]))))
    ok = []
    for s in (1, -1):
        conv = Conventions(frame_bracket_sign=s)
        dd = exterior_derivative(exterior_derivative(f, conv=conv), conv=conv)
        worst = 0.0
        for _ in range(5):
            p = space.random_point(rng)
            worst = max(worst, abs(dd(p, space.random_tangent(rng), space.random_tangent(rng))))
        if worst < 1e-5:
            ok.append(s)
    return _unique("frame bracket sign", ok)


def _extension_signs(base):
    model = ExtensionModel.heisenberg_full(2)
    ok = []
    for chi_s, om_s in itertools.product((1, -1), repeat=2):
        conv = base.with_(chi_sign=chi_s, omega_gamma_sign=om_s)
        if verify_prequantization(model, samples=8, seed=3, conv=conv).passed:
            ok.append((chi_s, om_s))
    return _unique("cocycle / symplectic form signs", ok)


def _amm_conventions(base):
    G = model_registry("su2")
    ok = []
    for orient, ab, c in itertools.product(ORIENTATIONS, ALPHA_BETA, C_OMEGA_CANDIDATES):
        conv = base.with_(coboundary_orientation=orient, alpha_beta=ab, c_omega=c)
        comp = amm_residuals(G, 3, np.random.default_rng(5), conv)
        if comp["domega"] > 1e-5:
            continue
        full = full_cocycle_residual(G, 3, seed=5, conv=conv)
        if max(full.values()) <= 1e-5:
            ok.append((orient, ab, c))
    return _unique("face orientation / alpha-beta / c_Omega", ok)


def _cartan_sign(base, rng):
    G = model_registry("su2")
    ok = []
    xi = rng.normal(size=3)
    for s in (1, -1):
        r = cartan_model_residuals(G, xi, 3, np.random.default_rng(9), base.with_(cartan_sign=s))
        if r["degree2"] <= 1e-5:
            ok.append(s)
    return _unique("Cartan-model sign", ok)


def _loop_gauge_sign(base, rng):
    G = model_registry("su2")
    ok = []
    for s in (1, -1):
        L = LoopSpace(G, N=32, M=1024, conv=base.with_(loop_gauge_sign=s))
        worst = 0.0
        for _ in range(3):
            xi, g = L.random_algebra_loop(rng), L.random_group_loop(rng)
            lhs = L.holonomy(L.gauge_action(g, xi))
            worst = max(worst, float(np.max(np.abs(lhs - g[0] @ L.holonomy(xi) @ G.inv(g[0])))))
        if worst <= 1e-5:
            ok.append(s)
    return _unique("loop gauge sign", ok)


def _delta_mu_signs(base):
    L = LoopSpace(model_registry("su2"), N=32, M=512, conv=base)
    res = delta_mu_residuals(L, 2, np.random.default_rng(13), base)
    s1 = _unique("delta mu s1", [s for s in (1, -1) if res[("i", s)] <= 1e-3])
    s2 = _unique("delta mu s2", [s for s in (1, -1) if res[("ii", s)] <= 1e-3])
    return s1, s2


def calibrate(seed=0):
    """Run every stage and return the resulting :class:`Conventions`."""
    rng = np.random.default_rng(seed)
    conv = Conventions(frame_bracket_sign=_frame_sign(rng))
    chi_s, om_s = _extension_signs(conv)
    conv = conv.with_(chi_sign=chi_s, omega_gamma_sign=om_s)
    orient, ab, c = _amm_conventions(conv)
    conv = conv.with_(coboundary_orientation=orient, alpha_beta=ab, c_omega=c)
    conv = conv.with_(cartan_sign=_cartan_sign(conv, rng))
    conv = conv.with_(loop_gauge_sign=_loop_gauge_sign(conv, rng))
    s1, s2 = _delta_mu_signs(conv)
    return conv.with_(delta_mu_s1=s1, delta_mu_s2=s2)
