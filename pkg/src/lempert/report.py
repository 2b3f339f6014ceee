"""Verification report containers used by the checkers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def to_jsonable(obj):
    """Convert reports, numpy scalars/arrays and complex numbers to JSON-safe data.

    Complex numbers become [re, im] pairs, complex vectors become arrays of
    pairs; this is the wire format used by the CLI.
    """
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return float(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        c = complex(obj)
        return [c.real, c.imag]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if hasattr(obj, "as_vec"):
        return to_jsonable(obj.as_vec())
    raise TypeError("cannot serialize object of type %s" % type(obj).__name__)


@dataclass(frozen=True)
class CheckResult:
    """One named check: worst violation, the sample achieving it, and the bar."""

    name: str
    max_violation: float
    witness: object
    samples: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.max_violation <= self.tolerance)

    def to_dict(self):
        return {
            "name": self.name,
            "max_violation": float(self.max_violation),
            "witness": to_jsonable(self.witness),
            "samples": int(self.samples),
            "tolerance": float(self.tolerance),
            "passed": self.passed,
        }


@dataclass(frozen=True)
class VerificationReport:
    """A bundle of checks; passes only when every check passes."""

    checks: tuple

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self):
        return {
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }
