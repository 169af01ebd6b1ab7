from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class CheckResult:
    """Worst value found by a sampled check, with the sample that produced it."""

    worst: float
    witness: Any = None
    samples: int = 0
    clamped: int = 0
    violations: int = 0
    extra: dict = field(default_factory=dict)

    def __float__(self):
        return float(self.worst)
