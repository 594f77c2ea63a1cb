"""
Verification Runner.
Orchestrates all evaluators and produces one verification result.
"""

import sys
from pathlib import Path
from typing import Any, Dict, List

sys.path.insert(0, str(Path(__file__).parent.parent))
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from core.logging_utils import get_logger
from core.settings import get_settings
from evaluation.evaluators.closed_form_evaluator import ClosedFormEvaluator
from evaluation.evaluators.invariant_evaluator import InvariantEvaluator
from evaluation.evaluators.reference_evaluator import ReferenceEvaluator
from evaluation.metrics import CONSISTENCY, REFERENCE, CheckResult, summarize_checks

logger = get_logger("Verify")


def _banner(title: str) -> None:
    print("=" * 70, file=sys.stderr)
    print(title, file=sys.stderr)
    print("=" * 70, file=sys.stderr)


class VerificationRunner:
    """
    Main orchestrator for the verification suite.

    Coordinates:
    - closed form against density matrix
    - structural invariants and the rational filtered values
    - published reference numbers (informational)
    """

    def __init__(self, d_max: int = 10, include_reference: bool = True, tol: float = None):
        """
        Initialize the verification runner.

        Args:
            d_max: Largest dimension checked on the density-matrix path
            include_reference: Whether to compare against published numbers
            tol: Consistency tolerance (default Settings.consistency_tol)
        """
        tol = get_settings().consistency_tol if tol is None else tol
        self.d_max = d_max
        self.include_reference = include_reference
        self.closed_form_evaluator = ClosedFormEvaluator(tol=tol)
        self.invariant_evaluator = InvariantEvaluator(tol=tol)
        self.reference_evaluator = ReferenceEvaluator() if include_reference else None
        self.results: Dict[str, Any] = {}

    @property
    def dimensions(self) -> List[int]:
        return list(range(2, self.d_max + 1))

    def _run_section(self, key: str, label: str, fn, kind: str = CONSISTENCY) -> Dict[str, Any]:
        logger.info(f"Running {label}...")
        try:
            return fn()
        except Exception as e:
            logger.error(f"{label} failed: {e}")
            failure = CheckResult(name=f"{key}_section", passed=False, detail=f"{type(e).__name__}: {e}", kind=kind)
            return {"checks": [failure], "error": str(e)}

    def run_full_verification(self) -> Dict[str, Any]:
        """
        Run every evaluator.

        Returns:
            Dictionary with configuration, checks, summary, cross-term
            localization and rational-form deviations
        """
        _banner("STARTING VERIFICATION")
        closed = self._run_section(
            "closed_form", "closed form vs density matrix", lambda: self.closed_form_evaluator.evaluate_batch(self.dimensions)
        )
        invariants = self._run_section(
            "invariants", "invariants", lambda: self.invariant_evaluator.evaluate_batch(self.dimensions)
        )
        checks: List[CheckResult] = list(closed["checks"]) + list(invariants["checks"])
        if self.reference_evaluator is not None:
            reference = self._run_section(
                "reference", "reference numbers", self.reference_evaluator.evaluate_batch, kind=REFERENCE
            )
            checks += reference["checks"]

        self.results = {
            "configuration": {"d_max": self.d_max, "include_reference": self.include_reference},
            "checks": checks,
            "summary": summarize_checks(checks),
            "localization": closed.get("localization", []),
            "rational_forms": invariants.get("rational_forms", []),
        }
        _banner("VERIFICATION COMPLETE")
        return self.results

    @property
    def consistent(self) -> bool:
        return bool(self.results.get("summary", {}).get("consistent", False))

    def get_results(self) -> Dict[str, Any]:
        """Get accumulated verification results."""
        return self.results

    def clear_results(self):
        self.results = {}
        self.closed_form_evaluator.clear_results()
        self.invariant_evaluator.clear_results()
        if self.reference_evaluator is not None:
            self.reference_evaluator.clear_results()
