"""Finder results: an optional witness plus an ordered stage trace."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from ..exact import Threshold, fmt_rational
from ..graphcore import Blockade, Pattern, Witness, verify_witness


class FinderPrecondition(ValueError):
    """The finder cannot run on this input at all (e.g. wrong blockade length)."""


def _fmt(q: Any) -> Any:
    if isinstance(q, Threshold):
        return str(q)
    if isinstance(q, Fraction):
        return fmt_rational(q)
    return q


@dataclass(frozen=True)
class Stage:
    name: str
    required: Any
    measured: Any
    passed: bool
    note: str = ""

    def to_dict(self) -> dict:
        d = {"stage": self.name, "required": _fmt(self.required), "measured": _fmt(self.measured),
             "passed": self.passed}
        if self.note:
            d["note"] = self.note
        return d


@dataclass
class FinderOutcome:
    result: Optional[Witness]
    pattern: Optional[Pattern]
    trace: list[Stage] = field(default_factory=list)
    failure_stage: Optional[str] = None
    regime: Optional[dict] = None

    @property
    def ok(self) -> bool:
        return self.result is not None

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "pattern": self.pattern.name if self.pattern is not None else None,
            "witness": self.result.to_dict() if self.result is not None else None,
            "failure_stage": self.failure_stage,
            "trace": [s.to_dict() for s in self.trace],
            "regime": self.regime,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)


class Tracer:
    """Collects stages in proof order and assembles the outcome."""

    def __init__(self, card=None, W=None):
        self.stages: list[Stage] = []
        self.regime = card.to_dict(W) if card is not None else None

    def log(self, name: str, required, measured, passed: bool, note: str = "") -> bool:
        self.stages.append(Stage(name, required, measured, bool(passed), note))
        return bool(passed)

    def at_least(self, name: str, thr, measured: int, note: str = "") -> bool:
        """Record ``measured >= thr`` (thr a Threshold or a number)."""
        ok = thr.le(measured) if isinstance(thr, Threshold) else measured >= thr
        return self.log(name, thr, measured, ok, note)

    def fail(self, name: str, required, measured, note: str = "", pattern=None) -> FinderOutcome:
        self.log(name, required, measured, False, note)
        return self.outcome(None, pattern)

    def outcome(self, witness: Optional[Witness], pattern: Optional[Pattern]) -> FinderOutcome:
        if witness is not None:
            return FinderOutcome(witness, pattern, list(self.stages), None, self.regime)
        first = next((s.name for s in self.stages if not s.passed), None)
        return FinderOutcome(None, pattern, list(self.stages), first or "unknown", self.regime)

    def success(self, b: Blockade, pattern: Pattern, witness: Witness) -> FinderOutcome:
        v = verify_witness(b, pattern, witness)
        if not v:
            # constructions are sound by design; reaching this is a bug, but it must never
            # surface as an unverified witness
            return self.fail("witness-verification", "valid", v.reason or "invalid", pattern=pattern)
        self.log("witness-verification", "valid", "valid", True)
        return self.outcome(witness, pattern)
