"""
Invariant Evaluator.
Structural properties of states, tables and filters, plus the rational
filtered values of the maximally violating states against the density matrix.
"""

import sys
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent.parent))
sys.path.insert(0, str(Path(__file__).parent.parent.parent / "src"))

from bell.filtering import FilterPair, RATIONAL_FORMS, apply_filters, filtered_rational, filtered_state
from bell.functionals import LOCAL_BOUND, cglmp_closed_form_optimal, cglmp_value, chsh_value
from core.measurements import ALICE, joint_probability_table, relabel_outcomes, signaling_deviation
from core.qmath import is_hermitian
from core.states import KNOWN_OPTIMAL_GAMMAS, SchmidtCoefficients, mixture, schmidt_state
from evaluation.metrics import CheckResult, max_abs_deviation


def _state_defects(rho: np.ndarray) -> Dict[str, float]:
    return {
        "hermitian": 0.0 if is_hermitian(rho) else float(np.max(np.abs(rho - rho.conj().T))),
        "trace": abs(float(np.trace(rho).real) - 1.0),
        "psd": max(0.0, -float(np.min(np.linalg.eigvalsh(rho)))),
    }


class InvariantEvaluator:
    """
    Property checks that must hold for every dimension:
    - mixed and filtered states are valid density matrices
    - joint tables are non-signaling
    - the identity filter leaves states unchanged
    - the filtered maximally entangled table is invariant under k, l -> k+c, l+c
    - the unfiltered optimum grows with d
    """

    def __init__(self, tol: float = 1e-10, rational_tol: float = 2e-2):
        self.tol = tol
        self.rational_tol = rational_tol
        self.results: List[CheckResult] = []

    def _record(self, name: str, deviation: float, tol: float, detail: str) -> CheckResult:
        check = CheckResult(name=name, passed=bool(deviation <= tol), detail=detail, deviation=deviation)
        self.results.append(check)
        return check

    def evaluate_states(self, d: int, q: float = 0.6, xi: float = 0.5) -> CheckResult:
        worst = 0.0
        for rho in (mixture(d, q), filtered_state(d, q, xi).rho_f):
            worst = max(worst, max(_state_defects(rho).values()))
        return self._record(f"density_matrices[d={d}]", worst, self.tol, f"largest defect {worst:.3e}")

    def evaluate_no_signaling(self, d: int, q: float = 0.6, xi: float = 0.5) -> CheckResult:
        deviation = signaling_deviation(joint_probability_table(filtered_state(d, q, xi).rho_f))
        return self._record(f"no_signaling[d={d}]", deviation, self.tol, f"marginal change {deviation:.3e}")

    def evaluate_identity_filter(self, d: int, q: float = 0.6) -> CheckResult:
        rho = mixture(d, q)
        filtered = apply_filters(rho, FilterPair.identity(d))
        deviation = max(max_abs_deviation(filtered.rho_f.real, rho.real), max_abs_deviation(filtered.rho_f.imag, rho.imag))
        deviation = max(deviation, abs(filtered.success_prob - 1.0))
        return self._record(f"identity_filter[d={d}]", deviation, self.tol, f"max |ρ_F − ρ| = {deviation:.3e}")

    def evaluate_cyclic_symmetry(self, d: int, q: float = 0.6, xi: float = 0.5) -> CheckResult:
        probs = joint_probability_table(filtered_state(d, q, xi).rho_f).probs
        worst = 0.0
        for c in range(1, d):
            shifted = np.roll(np.roll(probs, -c, axis=2), -c, axis=3)
            worst = max(worst, max_abs_deviation(shifted, probs))
        return self._record(f"cyclic_symmetry[d={d}]", worst, self.tol, f"max |P(k+c, l+c) − P(k, l)| = {worst:.3e}")

    def evaluate_chsh_equivalence(self, q: float = 0.8, xi: float = 0.7) -> CheckResult:
        """On qubits CGLMP equals CHSH once Alice's second outcomes are relabelled."""
        table = joint_probability_table(filtered_state(2, q, xi).rho_f)
        deviation = abs(cglmp_value(table).value - chsh_value(relabel_outcomes(table, ALICE, 2, 1)).value)
        return self._record("cglmp_chsh_equivalence[d=2]", deviation, self.tol, f"|I − CHSH| = {deviation:.3e}")

    def evaluate_monotone_optimum(self, dimensions: Sequence[int]) -> CheckResult:
        values = [cglmp_closed_form_optimal(d) for d in sorted(dimensions)]
        steps = np.diff(values)
        worst = float(max(0.0, -steps.min())) if steps.size else 0.0
        passed = bool(np.all(steps > 0))
        check = CheckResult(
            name="optimum_increasing_in_d",
            passed=passed,
            detail=f"smallest increment {steps.min() if steps.size else float('nan'):.3e}",
            deviation=worst,
        )
        self.results.append(check)
        return check

    def evaluate_rational_forms(self, d: int, n: int = 10) -> Dict[str, Any]:
        """
        Rational filtered value against the density matrix of the filtered
        maximally violating mixture, on the cells of an n×n grid that violate.
        """
        psi = schmidt_state(SchmidtCoefficients.normalized(KNOWN_OPTIMAL_GAMMAS[d]))
        worst = 0.0
        cells = 0
        for q in np.linspace(0.7, 1.0, n):
            for fraction in np.linspace(0.55, 1.0, n):
                xi = float(fraction * np.sqrt(q))
                oracle = cglmp_value(joint_probability_table(filtered_state(d, float(q), xi, psi=psi).rho_f)).value
                if oracle <= LOCAL_BOUND:
                    continue
                cells += 1
                worst = max(worst, abs(filtered_rational(d, float(q), xi) - oracle))
        self._record(
            f"rational_form[d={d}]",
            worst,
            self.rational_tol,
            f"max |rational − oracle| = {worst:.3e} over {cells} violating cells",
        )
        return {"d": d, "cells": cells, "max_deviation": worst}

    def evaluate_batch(self, dimensions: Sequence[int]) -> Dict[str, Any]:
        self.results = []
        for d in dimensions:
            self.evaluate_states(d)
            self.evaluate_no_signaling(d)
            self.evaluate_identity_filter(d)
            self.evaluate_cyclic_symmetry(d)
        if 2 in dimensions:
            self.evaluate_chsh_equivalence()
        self.evaluate_monotone_optimum([d for d in dimensions if d >= 2])
        rational = [self.evaluate_rational_forms(d) for d in sorted(RATIONAL_FORMS) if d in dimensions]
        return {"checks": list(self.results), "rational_forms": rational}

    def clear_results(self):
        self.results = []
