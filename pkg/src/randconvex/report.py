"""Check records and JSON-safe rendering of exact values."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, is_dataclass
from fractions import Fraction

PASS = "pass"
FAIL = "fail"
NOT_APPLICABLE = "not-applicable"
PREFIX_ONLY = "prefix-only"

STATUSES = (PASS, FAIL, NOT_APPLICABLE, PREFIX_ONLY)


@dataclass
class Check:
    name: str
    status: str
    details: dict = field(default_factory=dict)
    expected: str = PASS

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status!r}")

    @property
    def ok(self) -> bool:
        """Status matches what the scenario expects of this check."""
        if self.status == self.expected:
            return True
        return self.expected == PASS and self.status == PREFIX_ONLY

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "expected": self.expected,
                "details": jsonable(self.details)}


@dataclass
class Findings:
    title: str
    checks: list

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def status(self, name: str) -> str:
        return self[name].status

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def to_dict(self) -> dict:
        return {"title": self.title, "checks": [c.to_dict() for c in self.checks]}


def jsonable(obj):
    """Turn exact values and workbench objects into JSON-ready data.

    Rationals become ``"p/q"`` strings; objects with ``to_dict`` use it.
    """
    from .l0core import fmt

    if obj is None or isinstance(obj, (bool, str, int)):
        return obj
    if isinstance(obj, Fraction):
        return fmt(obj)
    if isinstance(obj, float):
        if math.isinf(obj):
            return fmt(obj)
        return {"display-only": repr(obj)}
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj, key=repr) if isinstance(obj, (set, frozenset)) else obj
        return [jsonable(x) for x in items]
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    if type(obj).__name__ == "BlockElement":
        return {"blocks": [[[m, jsonable(c)] for m, c in s.terms] for s in obj.blocks],
                "tail": None if obj.tail is None else [[m, jsonable(c)] for m, c in obj.tail.terms]}
    if is_dataclass(obj):
        return {f.name: jsonable(getattr(obj, f.name)) for f in fields(obj)
                if f.name not in ("space", "algebra")}
    return repr(obj)
