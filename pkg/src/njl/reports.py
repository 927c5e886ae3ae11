"""Structured records for identity and inequality checks."""

from dataclasses import dataclass, field

import numpy as np

SCHEMA_VERSION = "1.0"


def _clean(v):
    """JSON-friendly value with floats rounded to 12 significant digits."""
    if isinstance(v, dict):
        return {str(k): _clean(v[k]) for k in sorted(v, key=str)}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not np.isfinite(v):
            return str(v)
        return float(f"{v:.12g}") + 0.0
    if isinstance(v, (complex, np.complexfloating)):
        return [_clean(v.real), _clean(v.imag)]
    return v


@dataclass
class BoundReport:
    """One check: passed iff lhs <= rhs + tolerance.

    Identities are stored as lhs = residual, rhs = 0.  Records
    (``asserted=False``) carry measured values and never fail a run.
    """

    name: str
    lhs: float
    rhs: float
    tolerance: float = 0.0
    context: dict = field(default_factory=dict)
    anchor: str = ""
    asserted: bool = True
    extra: dict = field(default_factory=dict)

    @property
    def margin(self):
        return self.rhs - self.lhs

    @property
    def passed(self):
        if not self.asserted:
            return True
        return bool(self.lhs <= self.rhs + self.tolerance)

    @classmethod
    def identity(cls, name, residual, tol, context, anchor="", **extra):
        return cls(name, float(residual), 0.0, tol, dict(context), anchor, True, extra)

    @classmethod
    def inequality(cls, name, lhs, rhs, tol, context, anchor="", **extra):
        return cls(name, float(lhs), float(rhs), tol, dict(context), anchor, True, extra)

    @classmethod
    def record(cls, name, value, context, anchor="", **extra):
        return cls(name, float(value), float(value), 0.0, dict(context), anchor, False, extra)

    def to_dict(self):
        return _clean({
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "asserted": self.asserted,
            "anchor": self.anchor,
            "context": self.context,
            "extra": self.extra,
        })


def all_passed(reports):
    return all(r.passed for r in reports)


def failures(reports):
    return [r for r in reports if not r.passed]
