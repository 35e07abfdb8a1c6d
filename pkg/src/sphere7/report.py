"""Check records, suite reports, exit codes and deterministic JSON output."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_IO = 3
EXIT_CONSTRAINT = 4


@dataclass
class CheckResult:
    check: str  # stable identifier, also the sort key
    claim: str  # short tag of the statement the check certifies
    status: str
    parameters: dict = field(default_factory=dict)
    result: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)

    def __post_init__(self):
        if self.status not in (PASS, FAIL, INCONCLUSIVE):
            raise ValueError(f"bad status {self.status!r}")

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "claim": self.claim,
            "status": self.status,
            "parameters": self.parameters,
            "result": self.result,
            "witnesses": self.witnesses,
        }


def status_of(ok: bool) -> str:
    return PASS if ok else FAIL


def combine(statuses: Iterable[str]) -> str:
    sts = list(statuses)
    if FAIL in sts:
        return FAIL
    if INCONCLUSIVE in sts:
        return INCONCLUSIVE
    return PASS


@dataclass
class Report:
    command: str
    suite: str
    parameters: dict
    checks: list[CheckResult] = field(default_factory=list)
    timing: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)

    def add(self, check: CheckResult) -> None:
        self.checks.append(check)

    def extend(self, checks: Iterable[CheckResult]) -> None:
        self.checks.extend(checks)

    @property
    def status(self) -> str:
        return combine(c.status for c in self.checks)

    @property
    def exit_code(self) -> int:
        return {PASS: EXIT_OK, FAIL: EXIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}[self.status]

    def sorted_checks(self) -> list[CheckResult]:
        return sorted(self.checks, key=lambda c: c.check)

    def to_json(self, include_timing: bool = True) -> dict:
        checks = self.sorted_checks()
        out: dict[str, Any] = {
            "command": self.command,
            "suite": self.suite,
            "parameters": self.parameters,
            "status": self.status,
            "summary": {
                "total": len(checks),
                PASS: sum(c.status == PASS for c in checks),
                FAIL: sum(c.status == FAIL for c in checks),
                INCONCLUSIVE: sum(c.status == INCONCLUSIVE for c in checks),
            },
            "checks": [c.to_json() for c in checks],
        }
        out.update(self.extra)
        if include_timing:
            out["timing"] = self.timing
        return out

    def dumps(self, include_timing: bool = True) -> str:
        return dumps(self.to_json(include_timing))

    def text_lines(self) -> list[str]:
        lines = [f"{c.status.upper():13s} {c.check}  [{c.claim}]" for c in self.sorted_checks()]
        lines.append(f"overall: {self.status} ({len(self.checks)} checks)")
        return lines


def _default(o):
    # numpy scalars, Fractions and similar
    if hasattr(o, "item"):
        return o.item()
    if hasattr(o, "numerator") and hasattr(o, "denominator"):
        return str(o)
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, default=_default) + "\n"


def strip_timing(obj: Any) -> Any:
    """Drop every key named ``timing`` (recursively) for reproducibility comparisons."""
    if isinstance(obj, dict):
        return {k: strip_timing(v) for k, v in obj.items() if k != "timing"}
    if isinstance(obj, list):
        return [strip_timing(v) for v in obj]
    return obj
