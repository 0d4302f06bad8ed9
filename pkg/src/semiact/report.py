"""Uniform result object returned by every check."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any

from .scalar import Scalar

__all__ = ["Report", "timed", "PASS", "FAIL", "jsonable"]

PASS = "pass"
FAIL = "fail"
MAX_WITNESSES = 5


def jsonable(v: Any) -> Any:
    """Render points, lattice elements, scalars and fractions as strings."""
    if v is None or isinstance(v, (bool, int, str)):
        return v
    if isinstance(v, float):
        return v
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, set, frozenset)):
        return [jsonable(x) for x in v]
    if isinstance(v, Scalar):
        return str(v)
    return str(v)


@dataclass
class Report:
    check: str
    status: str = PASS
    witnesses: list = field(default_factory=list)
    samples: int = 0
    elapsed: float = 0.0
    details: dict = field(default_factory=dict)
    ref: str = ""

    def __bool__(self):
        return self.status == PASS

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def fail(self, witness: Any) -> None:
        self.status = FAIL
        if len(self.witnesses) < MAX_WITNESSES:
            self.witnesses.append(witness)

    def to_dict(self) -> dict:
        d = {
            "check": self.check,
            "status": self.status,
            "witnesses": jsonable(self.witnesses),
            "samples": self.samples,
        }
        if self.details:
            d["details"] = jsonable(self.details)
        return d

    def summary(self) -> str:
        line = f"{self.status.upper():4} {self.check} ({self.samples} samples)"
        if self.witnesses:
            line += f" witness: {jsonable(self.witnesses[0])}"
        return line


@contextmanager
def timed(report: Report):
    t0 = time.perf_counter()
    try:
        yield report
    finally:
        report.elapsed = time.perf_counter() - t0
