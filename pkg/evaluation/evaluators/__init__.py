"""
Evaluators for the verification suite.
"""

from .closed_form_evaluator import ClosedFormEvaluator
from .invariant_evaluator import InvariantEvaluator
from .reference_evaluator import ReferenceEvaluator

__all__ = [
    "ClosedFormEvaluator",
    "InvariantEvaluator",
    "ReferenceEvaluator",
]
