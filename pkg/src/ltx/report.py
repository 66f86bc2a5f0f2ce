"""Structured verdicts returned by every verification routine."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any


def jsonable(obj):
    """Best-effort conversion of library objects into JSON-compatible data."""
    if hasattr(obj, "to_json"):
        return obj.to_json()
    if isinstance(obj, Fraction):
        return str(obj) if obj.denominator != 1 else int(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, str, type(None))):
        return obj
    if isinstance(obj, int):
        return obj if abs(obj) < 2 ** 53 else str(obj)
    if isinstance(obj, float):
        return obj
    return str(obj)


@dataclass
class CheckEntry:
    name: str
    identity: str
    status: str  # "pass" | "fail"
    precision: Any = None
    witness: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def to_json(self):
        return {
            "name": self.name,
            "identity": self.identity,
            "paper_ref": self.identity,
            "status": self.status,
            "precision": jsonable(self.precision),
            "witness": jsonable(self.witness),
        }


@dataclass
class AuditReport:
    command: str
    params: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    seed: Any = None
    wall_clock: float = 0.0
    _t0: float = field(default_factory=time.perf_counter, repr=False)

    def check(self, name: str, ok: bool, identity: str = "", precision=None, **witness) -> bool:
        self.checks.append(CheckEntry(name, identity or name, "pass" if ok else "fail", precision, witness))
        return ok

    def extend(self, other: "AuditReport", prefix: str = ""):
        for c in other.checks:
            self.checks.append(CheckEntry(prefix + c.name, c.identity, c.status, c.precision, c.witness))
        return self

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c.passed]

    def finish(self) -> "AuditReport":
        self.wall_clock = time.perf_counter() - self._t0
        return self

    def summary(self) -> dict:
        n_pass = sum(c.passed for c in self.checks)
        return {"total": len(self.checks), "pass": n_pass, "fail": len(self.checks) - n_pass}

    def to_json(self, timing: bool = True) -> dict:
        out = {
            "command": self.command,
            "params": jsonable(self.params),
            "seed": self.seed,
            "status": "pass" if self.passed else "fail",
            "summary": self.summary(),
            "checks": [c.to_json() for c in self.checks],
            "data": jsonable(self.data),
        }
        if timing:
            out["wall_clock"] = round(self.wall_clock, 4)
        return out

    def dumps(self, timing: bool = True) -> str:
        return json.dumps(self.to_json(timing), indent=2, sort_keys=True)


# precisions and certified lower bounds grow with N by design
VOLATILE_KEYS = frozenset({"precision", "prec", "wall_clock", "timings", "certified_digits",
                           "residual_valuation", "residual_min_valuation"})


def _padic_json(x) -> bool:
    return isinstance(x, dict) and {"ring", "coeffs", "prec"} <= set(x)


def report_discrepancies(a, b, path: str = "") -> list:
    """Paths where two report JSON trees disagree.

    p-adic values are compared to the smaller of their two precisions;
    precision fields themselves are ignored.
    """
    if _padic_json(a) and _padic_json(b):
        from .padic_core import PadicElement

        x, y = PadicElement.from_json(a), PadicElement.from_json(b)
        n = min(x.prec, y.prec)
        return [] if (x.with_prec(n) - y.with_prec(n)).is_zero() else [path]
    if isinstance(a, dict) and isinstance(b, dict):
        out = [] if set(a) == set(b) else [path + " (keys)"]
        for k in sorted(set(a) & set(b)):
            if k not in VOLATILE_KEYS:
                out += report_discrepancies(a[k], b[k], f"{path}/{k}")
        return out
    if isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            return [path + " (length)"]
        out = []
        for i, (x, y) in enumerate(zip(a, b)):
            out += report_discrepancies(x, y, f"{path}[{i}]")
        return out
    return [] if a == b else [path]
