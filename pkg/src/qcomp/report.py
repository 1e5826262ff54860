"""Pass/fail records produced by the checks."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass
class CheckReport:
    """Outcome of one numerical check.

    ``passed`` is always ``worst_violation <= tolerance_used`` unless a
    hypothesis failed first, in which case ``metadata['precondition']``
    carries the reason and ``passed`` is False.
    """

    name: str
    passed: bool
    worst_violation: float
    worst_location: tuple = ()
    tolerance_used: float = 0.0
    metadata: dict = field(default_factory=dict)

    @classmethod
    def from_violation(cls, name, violation, tol, location=(), **metadata):
        violation = float(violation)
        return cls(name, bool(violation <= tol), violation, tuple(location), float(tol), metadata)

    def to_json(self):
        return {
            "name": self.name,
            "passed": self.passed,
            "worst_violation": self.worst_violation,
            "worst_location": list(self.worst_location),
            "tolerance_used": self.tolerance_used,
            "metadata": self.metadata,
        }

    def __str__(self):
        flag = "PASS" if self.passed else "FAIL"
        v = self.worst_violation
        vs = f"{v:.3e}" if math.isfinite(v) else str(v)
        return f"[{flag}] {self.name}: worst={vs} tol={self.tolerance_used:.3e}"
