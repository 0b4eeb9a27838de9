"""Outcome record shared by every identity check."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class CheckResult:
    """Outcome of one identity check.

    ``witness`` is set exactly when the check failed and locates the first
    failure (a coefficient order, a basis element, an index triple...).
    ``details`` carries informative values that are reported either way.
    """

    passed: bool
    witness: dict[str, Any] | None = None
    details: dict[str, Any] = field(default_factory=dict)

    def __bool__(self):
        return self.passed

    @classmethod
    def ok(cls, **details) -> "CheckResult":
        return cls(True, None, details)

    @classmethod
    def fail(cls, witness: dict, **details) -> "CheckResult":
        return cls(False, witness, details)
