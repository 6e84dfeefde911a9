"""Verdicts for discharged obligations."""

from __future__ import annotations

from dataclasses import dataclass

PROVED = "proved"
REFUTED = "refuted"
UNKNOWN = "unknown"


@dataclass
class VcResult:
    status: str
    backend: str
    counterexample: dict | None = None
    reason: str | None = None
    elapsed: float = 0.0

    def __post_init__(self):
        if self.status == REFUTED and self.counterexample is None:
            raise ValueError("a refutation needs a counterexample")

    @property
    def definitive(self):
        return self.status in (PROVED, REFUTED)
