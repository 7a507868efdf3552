"""Residual records shared by all verification routines."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
import math


@dataclass
class Check:
    """One measured quantity compared with a tolerance.

    ``kind="upper"`` passes when ``value <= tol``; ``kind="lower"`` when ``value > tol``.
    """

    name: str
    value: float
    tol: float
    kind: str = "upper"
    detail: str = ""

    def __post_init__(self):
        self.value = float(self.value)
        self.tol = float(self.tol)

    @property
    def passed(self):
        if math.isnan(self.value):
            return False
        return self.value <= self.tol if self.kind == "upper" else self.value > self.tol

    def line(self):
        rel = "<=" if self.kind == "upper" else ">"
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.value:.3e} ({rel} {self.tol:.3g})"

    def as_dict(self):
        d = asdict(self)
        d["passed"] = self.passed
        return d


@dataclass
class Report:
    name: str
    checks: list = field(default_factory=list)
    skipped: list = field(default_factory=list)
    info: dict = field(default_factory=dict)

    def add(self, check):
        self.checks.append(check)
        return check

    def skip(self, name, reason):
        self.skipped.append({"name": name, "reason": reason})

    def extend(self, other, prefix=""):
        for c in other.checks:
            self.add(Check(prefix + c.name, c.value, c.tol, c.kind, c.detail))
        self.skipped.extend({"name": prefix + s["name"], "reason": s["reason"]} for s in other.skipped)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def lines(self):
        out = [c.line() for c in self.checks]
        out += [f"[SKIP] {s['name']}: {s['reason']}" for s in self.skipped]
        return out

    def as_dict(self):
        return {"name": self.name, "passed": self.passed, "checks": [c.as_dict() for c in self.checks],
                "skipped": list(self.skipped), "info": dict(self.info)}
