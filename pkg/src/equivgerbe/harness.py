"""Suite orchestration, configuration and JSON reports."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import amm, central_ext, loopspace, morita
from .checks import Check, Report
from .conventions import CALIBRATED, Conventions
from .geometry import DifferentialForm, GroupAtom, SpaceDescriptor, exterior_derivative, maurer_cartan_right
from .lie import model_registry
from .simplicial import max_residual, simplicial_coboundary

SCHEMA_VERSION = 1

SUITES = ("foundations", "prequant", "amm", "cartan", "period", "loop", "deltamu", "morita", "negative",
          "calibrate")

DEFAULT_MODEL = {"prequant": "heisenberg(2)"}

DEFAULT_SAMPLES = {"foundations": 20, "prequant": 200, "amm": 200, "cartan": 100, "period": 24, "loop": 50,
                   "deltamu": 50, "morita": 50, "negative": 5, "calibrate": 1}

ANCHORS = {
    "foundations": "Lie-theoretic and simplicial groundwork",
    "prequant": "prequantization of the affine Poisson structure",
    "amm": "quasi-Hamiltonian 3-cocycle on the conjugation groupoid",
    "cartan": "equivariant Cartan-model representative",
    "period": "generator of the equivariant 3-cohomology of SU(2)",
    "loop": "loop groupoid, holonomy and the Morita morphism",
    "deltamu": "transgression 2-form mu relating the two cocycles",
    "morita": "Morita bimodule G x Lg",
    "negative": "negative controls",
    "calibrate": "convention calibration",
}


class UsageError(ValueError):
    pass


@dataclass(frozen=True)
class SuiteConfig:
    suite: str
    model: str | None = None
    N: int = 64
    M: int = 1024
    h: float = 1e-4
    samples: int | None = None
    seed: int = 0
    tol: dict = field(default_factory=dict)
    conventions: str | None = None
    band: int = 4

    def __post_init__(self):
        if self.suite not in SUITES:
            raise UsageError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if self.N < 4 or self.N & (self.N - 1):
            raise UsageError("grid size must be a power of two >= 4")
        if self.M < self.N:
            raise UsageError("ODE steps must be at least the grid size")
        if self.h <= 0:
            raise UsageError("finite-difference step must be positive")
        if self.samples is not None and self.samples < 1:
            raise UsageError("sample count must be positive")
        for k, v in self.tol.items():
            if not v > 0:
                raise UsageError(f"tolerance {k} must be positive")
        if self.band > self.N // 8:
            raise UsageError("band limit must not exceed N/8")

    @property
    def model_name(self):
        return self.model or DEFAULT_MODEL.get(self.suite, "su2")

    @property
    def n_samples(self):
        return self.samples or DEFAULT_SAMPLES[self.suite]

    def echo(self):
        d = asdict(self)
        d["model"] = self.model_name
        d["samples"] = self.n_samples
        return d

    @classmethod
    def from_file(cls, path, **overrides):
        data = json.loads(Path(path).read_text())
        data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)


@dataclass
class VerificationReport:
    suite: str
    config: dict
    checks: list
    skipped: list
    conventions: dict
    info: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(c["passed"] for c in self.checks)

    def as_dict(self):
        return {"schema_version": SCHEMA_VERSION, "suite": self.suite, "passed": self.passed,
                "config": self.config, "conventions": self.conventions, "checks": self.checks,
                "skipped": self.skipped, "info": self.info}

    def to_json(self):
        return json.dumps(_finite(self.as_dict()), indent=2, sort_keys=True) + "\n"

    def summary(self):
        lines = [f"suite {self.suite} ({self.config['model']}): {'PASS' if self.passed else 'FAIL'}"]
        for c in self.checks:
            rel = "<=" if c["kind"] == "upper" else ">"
            lines.append(f"  [{'PASS' if c['passed'] else 'FAIL'}] {c['name']}: {c['value']:.3e} {rel} {c['tol']:.3g}")
        lines += [f"  [SKIP] {s['name']}: {s['reason']}" for s in self.skipped]
        return "\n".join(lines)


def _finite(obj):
    """Replace non-finite floats by strings so the JSON stays standard."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {str(k): _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def load_conventions(path):
    """Read a conventions record, calibrating and writing it first if it does not exist."""
    if path is None:
        return CALIBRATED
    p = Path(path)
    if not p.exists():
        from .calibration import calibrate
        conv = calibrate()
        conv.save(p)
        return conv
    return Conventions.load(p)


# ---------------------------------------------------------------- suites

def _foundations(cfg, conv):
    G = model_registry(cfg.model_name)
    rng = np.random.default_rng(cfg.seed)
    rep = Report("foundations")
    res = G.algebra.residuals()
    for k, v in res.items():
        if k == "ad_invariance" and not G.algebra.ad_invariant:
            continue
        rep.add(Check(f"algebra {k}", v, 1e-12))
    rt = mem = 0.0
    for _ in range(cfg.n_samples):
        x = 0.5 * rng.normal(size=G.dim)
        rt = max(rt, float(np.max(np.abs(G.log(G.exp(x)) - x))))
        mem = max(mem, G.membership_residual(G.random(rng)))
    rep.add(Check("log(exp(x)) = x", rt, 1e-12))
    rep.add(Check("group membership of samples", mem, 1e-10))
    space = SpaceDescriptor((GroupAtom(G),))
    A = rng.normal(size=(G.n, G.n))
    f = DifferentialForm(0, space, lambda p: float(np.real(np.trace(A @ p[0] @ A @ p[0]))))
    rep.add(Check("d d f = 0", max_residual(exterior_derivative(exterior_derivative(f, cfg.h, conv), cfg.h, conv),
                                            space, rng, cfg.n_samples), 1e-5))
    xi0 = rng.normal(size=G.dim)
    phi = DifferentialForm(1, space, lambda p, v: float(xi0 @ maurer_cartan_right(G, p[0], v[0])))
    oracle = DifferentialForm(2, space, lambda p, v, w: float(xi0 @ G.algebra.bracket(v[0], w[0])))
    rep.add(Check("d <xi0, theta_bar> = <xi0, [., .]>", max_residual(exterior_derivative(phi, cfg.h, conv), space, rng,
                                                                      cfg.n_samples, oracle), 1e-6))
    if G.algebra.ad_invariant:
        gpd = amm.conjugation_groupoid(G)
        for p in (2, 3):
            rep.add(Check(f"simplicial identities at level {p}",
                          gpd.simplicial_identity_residual(p, rng, 5, conv), 1e-12))
        w = rng.normal(size=G.dim)
        psi = DifferentialForm(1, gpd.nerve(1), lambda q, v: float(w @ G.adjoint(q[1], v[0]) + np.real(
            np.trace(q[0] @ q[1])) * (w @ v[1])))
        dd = simplicial_coboundary(gpd, 2, simplicial_coboundary(gpd, 1, psi, conv), conv)
        rep.add(Check("del del = 0", max_residual(dd, gpd.nerve(3), rng, 5), 1e-10))
        ax = gpd.axiom_residuals(rng, cfg.n_samples)
        rep.add(Check("groupoid axioms", max(ax.values()), 1e-10))
    return rep


def _extension_model(name):
    if name.startswith("heisenberg"):
        m = int(name[name.index("(") + 1:-1]) if "(" in name else 2
        return central_ext.ExtensionModel.heisenberg_full(m)
    if name == "su2":
        return central_ext.ExtensionModel.su2_coboundary()
    raise UsageError(f"prequant needs a heisenberg(2n) or su2 model, got {name!r}")


def _prequant(cfg, conv):
    model = _extension_model(cfg.model_name)
    rep = central_ext.verify_prequantization(model, cfg.n_samples, cfg.seed, conv, cfg.h, cfg.tol)
    rep.extend(central_ext.extension_structure_checks(model, min(cfg.n_samples, 50), cfg.seed, conv, cfg.h))
    return rep


def _amm(cfg, conv):
    G = model_registry(cfg.model_name)
    rep = amm.verify_amm_cocycle(G, cfg.n_samples, cfg.seed, conv, cfg.h, cfg.tol)
    rng = np.random.default_rng(cfg.seed + 1)
    rep.add(Check("omega invariant under conjugation", amm.conjugation_invariance_residual(G, rng), 1e-10))
    pieces = 0.0
    for _ in range(20):
        p = (G.random(rng), G.random(rng))
        t1 = (rng.normal(size=G.dim), rng.normal(size=G.dim))
        t2 = (rng.normal(size=G.dim), rng.normal(size=G.dim))
        pieces = max(pieces, abs(amm.amm_two_form(G, p, t1, t2) - amm.amm_two_form_by_pieces(G, p, t1, t2)))
    rep.add(Check("omega agrees with the matrix-level evaluator", pieces, 1e-12))
    return rep


def _cartan(cfg, conv):
    G = model_registry(cfg.model_name)
    n_xi = max(1, int(round(math.sqrt(cfg.n_samples))))
    return amm.cartan_model_check(G, n_xi, max(1, cfg.n_samples // n_xi), cfg.seed, conv, cfg.h, cfg.tol)


def _period(cfg, conv):
    G = model_registry(cfg.model_name)
    rep = Report("period")
    exact = amm.integrate_omega_su2(G, conv)
    quad = amm.integrate_omega_quadrature(G, cfg.n_samples, conv)
    rep.info.update(factorized=exact, quadrature=quad)
    rep.add(Check("quadrature vs kappa * Vol (relative)", abs(quad - exact) / abs(exact), cfg.tol.get("period", 1e-3)))
    closed = 8 * math.pi ** 2 * float(conv.c_omega) * G.algebra.inner(G.algebra.basis()[0], G.algebra.basis()[0]) ** 1.5 \
        * 2 ** 1.5
    rep.add(Check("kappa * Vol vs 8 pi^2 c (2b)^(3/2)", abs(exact - closed) / closed, 1e-12))
    return rep


def _loops(cfg, conv):
    G = model_registry(cfg.model_name)
    return loopspace.LoopSpace(G, cfg.N, cfg.M, band=cfg.band, conv=conv)


def _loop(cfg, conv):
    return loopspace.loop_suite(_loops(cfg, conv), cfg.n_samples, cfg.seed, conv, cfg.h, cfg.tol,
                                fd_samples=min(cfg.n_samples, 20))


def _deltamu(cfg, conv):
    return loopspace.loop_suite(_loops(cfg, conv), cfg.n_samples, cfg.seed, conv, cfg.h, cfg.tol,
                                fd_samples=cfg.n_samples, parts=("deltamu",))


def _morita(cfg, conv):
    return morita.verify_bimodule(_loops(cfg, conv), cfg.n_samples, cfg.seed, cfg.tol.get("morita", 1e-6))


def _calibrate(cfg, conv):
    from .calibration import calibrate
    found = calibrate(cfg.seed)
    rep = Report("calibrate")
    rep.info["calibrated"] = {k: str(v) for k, v in asdict(found).items()}
    rep.add(Check("calibration reproduces the conventions in use", float(found != conv), 0.0))
    return rep


# ---------------------------------------------------------------- negative controls

def perturbation_study(G, eps_values=(1e-4, 1e-3, 1e-2), samples=5, seed=0, conv=None):
    """Residuals of the AMM component equations for ``omega + eps * rho``, ``rho`` a random 2-form."""
    rng = np.random.default_rng(seed)
    K = rng.normal(size=(2 * G.dim, 2 * G.dim))
    K = K - K.T
    gpd = amm.conjugation_groupoid(G)

    def rho(p, a, b):
        # varies with the point so it is neither closed nor multiplicative
        wgt = 1.0 + float(np.real(np.trace(p[0] @ p[1])))
        return wgt * float(np.concatenate(a) @ K @ np.concatenate(b))

    out = []
    for eps in eps_values:
        om = DifferentialForm(2, gpd.nerve(1), lambda p, a, b, e=eps: amm.amm_two_form(G, p, a, b) + e * rho(p, a, b))
        r = amm.amm_residuals(G, samples, np.random.default_rng(seed), conv, omega=om)
        out.append((eps, max(r["domega"], r["del_omega"])))
    return out


# the quickest suite that notices each convention when it is flipped
_DETECTORS = {
    "frame_bracket_sign": ("amm", {}),
    "coboundary_orientation": ("amm", {}),
    "alpha_beta": ("amm", {}),
    "c_omega": ("amm", {}),
    "cartan_sign": ("cartan", {}),
    "chi_sign": ("prequant", {"model": "heisenberg(2)"}),
    "omega_gamma_sign": ("prequant", {"model": "heisenberg(2)"}),
    "loop_gauge_sign": ("loop", {}),
    "delta_mu_s1": ("deltamu", {}),
    "delta_mu_s2": ("deltamu", {}),
}


def _negative(cfg, conv):
    G = model_registry(cfg.model_name)
    rep = Report("negative")
    study = perturbation_study(G, samples=cfg.n_samples, seed=cfg.seed, conv=conv)
    rep.info["perturbation"] = [[e, r] for e, r in study]
    rep.add(Check("perturbed omega fails the AMM check (smallest residual)", min(r for _, r in study), 1e-5,
                  kind="lower"))
    ratios = [r / e for e, r in study]
    rep.add(Check("residual is linear in eps (ratio spread)", max(ratios) / min(ratios) - 1.0, 0.05))
    quick = {"samples": 4, "N": 32, "M": 512, "band": 2}
    for key, (suite, extra) in _DETECTORS.items():
        bad = conv.with_(c_omega=conv.c_omega / 2) if key == "c_omega" else conv.flipped(key)
        sub = SuiteConfig(suite=suite, seed=cfg.seed, h=cfg.h, **{**quick, **extra})
        failed = [c.name for c in _run_checks(sub, bad).checks if not c.passed]
        rep.info.setdefault("detected_by", {})[key] = failed
        detected = bool(failed)
        rep.add(Check(f"altered {key} is detected by {suite}", float(detected), 0.5, kind="lower"))
    return rep


_RUNNERS = {"foundations": _foundations, "prequant": _prequant, "amm": _amm, "cartan": _cartan,
            "period": _period, "loop": _loop, "deltamu": _deltamu, "morita": _morita, "negative": _negative,
            "calibrate": _calibrate}


def _run_checks(cfg, conv):
    return _RUNNERS[cfg.suite](cfg, conv)


def run_suite(cfg, conv=None):
    """Run one suite; deterministic given the config, seed and conventions."""
    conv = load_conventions(cfg.conventions) if conv is None else conv
    try:
        model_registry(cfg.model_name)
    except KeyError as exc:
        raise UsageError(str(exc)) from exc
    rep = _run_checks(cfg, conv)
    anchor = ANCHORS[cfg.suite]
    checks = []
    for c in rep.checks:
        d = c.as_dict()
        d["anchor"] = f"{anchor}: {c.name}"
        d["samples"] = cfg.n_samples
        checks.append(d)
    return VerificationReport(cfg.suite, cfg.echo(), checks, list(rep.skipped),
                              {k: str(v) for k, v in asdict(conv).items()}, dict(rep.info))
