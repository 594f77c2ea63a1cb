"""
Verification suite for the Bell toolkit.
Checks closed forms against the density-matrix pipeline, structural
invariants, and published reference numbers.
"""

from .runner import VerificationRunner
from .report import ReportGenerator
from .metrics import (
    CheckResult,
    max_abs_deviation,
    summarize_checks,
    tolerance_check,
)

__all__ = [
    "VerificationRunner",
    "ReportGenerator",
    "CheckResult",
    "max_abs_deviation",
    "summarize_checks",
    "tolerance_check",
]
