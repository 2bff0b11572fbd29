"""Named numerical checks and the JSON report they are collected into."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class Check:
    name: str
    params: dict
    value: float
    target: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(math.isfinite(self.value) and abs(self.value - self.target) <= self.tolerance)

    def as_dict(self):
        d = asdict(self)
        d["pass"] = self.passed
        return d


@dataclass(frozen=True)
class BoolCheck(Check):
    """A check whose value is 1.0 when a property holds and 0.0 otherwise."""

    @classmethod
    def of(cls, name: str, params: dict, ok: bool) -> "BoolCheck":
        return cls(name, params, 1.0 if ok else 0.0, 1.0, 0.0)


def suite_report(name: str, checks: list[Check]) -> dict:
    """JSON-ready report {suite, checks, pass}."""
    items = [c.as_dict() for c in checks]
    return {"suite": name, "checks": items, "pass": all(c["pass"] for c in items)}


def merge_reports(name: str, reports: list[dict]) -> dict:
    checks = [dict(c, name=f"{r['suite']}/{c['name']}") for r in reports for c in r["checks"]]
    return {"suite": name, "checks": checks, "pass": all(r["pass"] for r in reports)}


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2)
