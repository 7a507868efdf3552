"""Sign and orientation conventions, and their key-value text file.

Every entry is chosen by :func:`equivgerbe.calibration.calibrate`, which tries
the finitely many alternatives against independent identities and keeps the
unique survivor.  :data:`CALIBRATED` freezes that result so library calls do
not need to recalibrate; a test checks the two agree.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from fractions import Fraction
from pathlib import Path

ORIENTATIONS = ("standard", "reversed")
ALPHA_BETA = ("target,source", "source,target")


@dataclass(frozen=True)
class Conventions:
    """Calibrated conventions.

    frame_bracket_sign
        ``[X_v, X_w] = sign * X_[v,w]`` for right-invariant frame fields.
    coboundary_orientation
        ``standard`` means face ``d_0`` of a transformation groupoid nerve drops
        the first arrow, so ``d_0 = source`` and ``d_1 = target`` on arrows;
        ``reversed`` uses ``d_i -> d_{p-i}`` (hence ``d_0 = target``).
    alpha_beta
        Which structure maps play ``alpha, beta`` in ``d omega = alpha*Omega - beta*Omega``.
    c_omega
        Constant in ``Omega(v1,v2,v3) = c * (u1, [u2, u3])``.
    cartan_sign
        ``d(1/2 <theta + theta_bar, xi>) + sign * i_{xi_G} Omega = 0``.
    chi_sign
        Derivative of the group 1-cocycle at the identity is ``sign * lambda^b``.
    omega_gamma_sign
        Global sign in front of the closed formula for the descended 2-form.
    loop_gauge_sign
        Gauge action ``xi -> Ad_g xi + sign * g' g^{-1}`` on loops.
    delta_mu_s1, delta_mu_s2
        ``omega_loop - f*omega = s1 * del mu`` and ``-hol*Omega = s2 * d mu``.
    """

    frame_bracket_sign: int = -1
    coboundary_orientation: str = "reversed"
    alpha_beta: str = "target,source"
    c_omega: Fraction = Fraction(1, 2)
    cartan_sign: int = -1
    chi_sign: int = -1
    omega_gamma_sign: int = -1
    loop_gauge_sign: int = -1
    delta_mu_s1: int = 1
    delta_mu_s2: int = 1

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "coboundary_orientation" and v not in ORIENTATIONS:
                raise ValueError(f"bad orientation {v!r}")
            elif f.name == "alpha_beta" and v not in ALPHA_BETA:
                raise ValueError(f"bad alpha_beta {v!r}")
            elif f.name == "c_omega":
                object.__setattr__(self, "c_omega", Fraction(v))
            elif f.type == "int" and v not in (1, -1):
                raise ValueError(f"{f.name} must be +1 or -1, got {v!r}")

    def with_(self, **changes):
        return replace(self, **changes)

    def flipped(self, key):
        """Copy with one discrete convention switched to its alternative."""
        value = getattr(self, key)
        if key == "coboundary_orientation":
            return replace(self, **{key: ORIENTATIONS[1 - ORIENTATIONS.index(value)]})
        if key == "alpha_beta":
            return replace(self, **{key: ALPHA_BETA[1 - ALPHA_BETA.index(value)]})
        if key == "c_omega":
            raise ValueError("c_omega is a scale, not a sign")
        return replace(self, **{key: -value})

    @classmethod
    def sign_keys(cls):
        return [f.name for f in fields(cls) if f.name != "c_omega"]

    def as_text(self):
        lines = ["# equivgerbe conventions record (key = value)"]
        for key, value in asdict(self).items():
            lines.append(f"{key} = {value}")
        return "\n".join(lines) + "\n"

    def save(self, path):
        Path(path).write_text(self.as_text())

    @classmethod
    def from_text(cls, text):
        values = {}
        names = {f.name: f for f in fields(cls)}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or key not in names:
                raise ValueError(f"bad conventions line: {raw!r}")
            if key == "c_omega":
                values[key] = Fraction(value)
            elif names[key].type == "int":
                values[key] = int(value)
            else:
                values[key] = value
        missing = set(names) - set(values)
        if missing:
            raise ValueError(f"conventions file lacks {sorted(missing)}")
        return cls(**values)

    @classmethod
    def load(cls, path):
        return cls.from_text(Path(path).read_text())


CALIBRATED = Conventions()


def resolve(conv):
    return CALIBRATED if conv is None else conv
