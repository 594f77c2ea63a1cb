"""
Check records and deviation metrics for the verification suite.
"""

from typing import Any, Dict, Iterable, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

CONSISTENCY = "consistency"
REFERENCE = "reference"


class CheckResult(BaseModel):
    """
    One named check. Consistency checks gate the exit status; reference
    checks only report how far a result lies from a published number.
    """

    model_config = ConfigDict(populate_by_name=True, frozen=True)

    name: str
    passed: bool = Field(alias="pass")
    detail: str = ""
    kind: str = CONSISTENCY
    deviation: Optional[float] = None

    @property
    def label(self) -> str:
        return f"{self.kind}:{self.name}"

    def to_record(self) -> Dict[str, Any]:
        """Record as written to JSON output: name, pass, detail."""
        return {"name": self.label, "pass": self.passed, "detail": self.detail}


def max_abs_deviation(a, b) -> float:
    """Largest entrywise |a − b|; NaN entries count as infinite."""
    diff = np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))
    if diff.size == 0:
        return 0.0
    return float(np.max(np.nan_to_num(diff, nan=np.inf)))


def tolerance_check(
    name: str,
    value: float,
    expected: float,
    tol: float,
    kind: str = CONSISTENCY,
    unit: str = "",
) -> CheckResult:
    """|value − expected| <= tol."""
    deviation = abs(float(value) - float(expected))
    passed = bool(np.isfinite(deviation) and deviation <= tol)
    detail = f"got {value:.10g}{unit}, expected {expected:.10g}{unit} (|diff| = {deviation:.3e}, tol {tol:.1e})"
    return CheckResult(name=name, passed=passed, detail=detail, kind=kind, deviation=deviation)


def summarize_checks(checks: Iterable[CheckResult]) -> Dict[str, Any]:
    """
    Pass/fail counts per kind.

    Returns:
        Dictionary with total, passed, failed and the failed consistency
        check names
    """
    checks = list(checks)
    summary: Dict[str, Any] = {"total": len(checks)}
    for kind in (CONSISTENCY, REFERENCE):
        subset = [c for c in checks if c.kind == kind]
        summary[kind] = {
            "total": len(subset),
            "passed": sum(1 for c in subset if c.passed),
            "failed": sum(1 for c in subset if not c.passed),
        }
    failed: List[str] = [c.label for c in checks if c.kind == CONSISTENCY and not c.passed]
    summary["failed_consistency"] = failed
    summary["consistent"] = not failed
    return summary
