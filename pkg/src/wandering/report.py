"""Check records shared by every verification routine and by the CLI reports."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any


def _jsonable(x):
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, float):
        return x if math.isfinite(x) else str(x)
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, tuple) and type(x) is not tuple:
        # Word and other tuple subclasses print themselves
        return str(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if hasattr(x, "item"):
        return _jsonable(x.item())
    return str(x)


@dataclass
class CheckResult:
    """Outcome of one numerical check.

    ``passed`` is ``None`` when the check was skipped; ``reason`` then says why.
    ``witness`` locates the worst offender (word pair, sample point, column index).
    """

    name: str
    passed: bool | None
    max_dev: float | None = None
    witness: Any = None
    reason: str | None = None
    details: dict = field(default_factory=dict)

    @property
    def skipped(self) -> bool:
        return self.passed is None

    def __bool__(self) -> bool:
        return bool(self.passed)

    @classmethod
    def from_dev(cls, name, dev, tol, witness=None, **details):
        dev = float(dev)
        return cls(name, dev <= tol, dev, witness, details=details)

    @classmethod
    def skip(cls, name, reason):
        return cls(name, None, reason=reason)

    def to_dict(self) -> dict:
        out = {"name": self.name, "pass": self.passed, "max_dev": _jsonable(self.max_dev),
               "witness": _jsonable(self.witness)}
        if self.reason is not None:
            out["reason"] = self.reason
        if self.details:
            out["details"] = _jsonable(self.details)
        return out


class Worst:
    """Running maximum of a deviation together with where it occurred."""

    def __init__(self):
        self.dev = 0.0
        self.where = None

    def update(self, dev, where):
        dev = float(dev)
        if self.where is None or dev > self.dev:
            self.dev, self.where = dev, where

    def result(self, name, tol, **details) -> CheckResult:
        return CheckResult.from_dev(name, self.dev, tol, self.where, **details)
