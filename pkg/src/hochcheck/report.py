"""Structured outcomes of verification checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .linalg import fmt


@dataclass
class VerificationReport:
    check: str
    mode: str
    status: str
    passed: bool = True
    value: Any = None
    residual_form: str | None = None
    witnesses: list | None = None
    details: dict = field(default_factory=dict)
    runtime_ms: float = 0.0

    def to_dict(self) -> dict:
        out = {"check": self.check, "mode": self.mode, "status": self.status,
               "passed": self.passed}
        if self.value is not None:
            out["value"] = encode_value(self.value)
        if self.residual_form is not None:
            out["residual_form"] = self.residual_form
        if self.witnesses is not None:
            out["witnesses"] = [encode_value(w) for w in self.witnesses]
        if self.details:
            out["details"] = encode_value(self.details)
        out["runtime_ms"] = round(self.runtime_ms, 3)
        return out


def encode_value(x):
    """Rationals become ``"p/q"`` strings, floats keep 17 significant digits."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, Fraction):
        return fmt(x)
    if isinstance(x, int):
        return x
    if isinstance(x, float):
        return float(f"{x:.17g}")
    if isinstance(x, dict):
        return {str(k): encode_value(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode_value(v) for v in x]
    if hasattr(x, "tolist"):
        return encode_value(x.tolist())
    return str(x)

