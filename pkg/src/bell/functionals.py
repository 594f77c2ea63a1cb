"""
Bell functionals evaluated on joint probability tables, plus the closed-form
optimum of the CGLMP functional for the maximally entangled state.

Both functionals have local bound 2.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Tuple

import numpy as np
from numpy.typing import NDArray
from scipy.special import polygamma

from core.errors import InvalidParameterError
from core.measurements import JointProbabilityTable
from core.qmath import ComplexMatrix, as_matrix

LOCAL_BOUND = 2.0

PAULI = (
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.array([[1, 0], [0, -1]], dtype=np.complex128),
)


class Order(str, Enum):
    """Which party carries the shift in P(X = Y + k)."""

    A_EQ_B_PLUS_K = "A_eq_B_plus_k"
    B_EQ_A_PLUS_K = "B_eq_A_plus_k"


@dataclass(frozen=True)
class BellValue:
    value: float
    local_bound: float = LOCAL_BOUND

    @property
    def violated(self) -> bool:
        return self.value > self.local_bound


def aggregate(table: JointProbabilityTable, a: int, b: int, k: int, order: Order) -> float:
    """
    Probability that the outcomes of A_a and B_b differ by k mod d.

    A_EQ_B_PLUS_K: Σ_j P(A_a = j + k, B_b = j)
    B_EQ_A_PLUS_K: Σ_j P(A_a = j, B_b = j + k)
    """
    d = table.d
    cells = table.slice(a, b)
    j = np.arange(d)
    shifted = (j + k) % d
    if Order(order) is Order.A_EQ_B_PLUS_K:
        return float(cells[shifted, j].sum())
    return float(cells[j, shifted].sum())


def cglmp_weights(d: int) -> Tuple[NDArray[np.int64], NDArray[np.float64]]:
    """Indices k = 0..⌊d/2⌋−1 and weights 1 − 2k/(d−1)."""
    if d < 2:
        raise InvalidParameterError(f"Local dimension must be >= 2, got {d}")
    k = np.arange(d // 2)
    return k, 1.0 - 2.0 * k / (d - 1)


def cglmp_value(table: JointProbabilityTable) -> BellValue:
    """Two-setting, d-outcome CGLMP functional."""
    A, B = Order.A_EQ_B_PLUS_K, Order.B_EQ_A_PLUS_K
    total = 0.0
    for k, weight in zip(*cglmp_weights(table.d)):
        k = int(k)
        plus = (
            aggregate(table, 1, 1, k, A)
            + aggregate(table, 2, 1, k + 1, B)
            + aggregate(table, 2, 2, k, A)
            + aggregate(table, 1, 2, k, B)
        )
        minus = (
            aggregate(table, 1, 1, -k - 1, A)
            + aggregate(table, 2, 1, -k, B)
            + aggregate(table, 2, 2, -k - 1, A)
            + aggregate(table, 1, 2, -k - 1, B)
        )
        total += weight * (plus - minus)
    return BellValue(float(total))


def correlator(table: JointProbabilityTable, a: int, b: int) -> float:
    """⟨A_a B_b⟩ with outcome 0 -> +1 and 1 -> −1."""
    cells = table.slice(a, b)
    return float(cells[0, 0] + cells[1, 1] - cells[0, 1] - cells[1, 0])


def chsh_value(table: JointProbabilityTable) -> BellValue:
    """E11 + E12 + E21 − E22 for a qubit table."""
    if table.d != 2:
        raise InvalidParameterError(f"CHSH needs d = 2, got d = {table.d}")
    value = correlator(table, 1, 1) + correlator(table, 1, 2) + correlator(table, 2, 1) - correlator(table, 2, 2)
    return BellValue(value)


def correlation_matrix(rho: ComplexMatrix) -> NDArray[np.float64]:
    """T_ij = Tr[ρ σ_i ⊗ σ_j] of a two-qubit state."""
    rho = as_matrix(rho)
    if rho.shape != (4, 4):
        raise InvalidParameterError(f"Correlation matrix needs a two-qubit state, got shape {rho.shape}")
    return np.array([[np.trace(rho @ np.kron(si, sj)).real for sj in PAULI] for si in PAULI])


def chsh_optimal_value(rho: ComplexMatrix) -> BellValue:
    """
    Largest CHSH value of a two-qubit state over all dichotomic projective
    observables: 2·sqrt(t1² + t2²), t1 ≥ t2 the top singular values of T.
    """
    singular = np.linalg.svd(correlation_matrix(rho), compute_uv=False)
    return BellValue(float(2.0 * np.sqrt(singular[0] ** 2 + singular[1] ** 2)))


def _half_inverse_sin2(angle: NDArray[np.float64]) -> NDArray[np.float64]:
    return 1.0 / (2.0 * np.sin(angle) ** 2)


def cglmp_closed_form_optimal(d: int) -> float:
    """
    CGLMP value of the maximally entangled state at q = 1:
    (4/d²) Σ_k w_k (s_k − s_{−(k+1)}),  s_c = 1/(2 sin²(π(c + 1/4)/d)).
    """
    k, weights = cglmp_weights(d)
    s_plus = _half_inverse_sin2(np.pi * (k + 0.25) / d)
    s_minus = _half_inverse_sin2(np.pi * (-(k + 1) + 0.25) / d)
    return float(4.0 / d**2 * np.sum(weights * (s_plus - s_minus)))


def unfiltered_threshold(d: int) -> float:
    """Smallest q above which the unfiltered mixture violates CGLMP."""
    return LOCAL_BOUND / cglmp_closed_form_optimal(d)


def cglmp_asymptotic_optimal() -> float:
    """d -> ∞ limit of cglmp_closed_form_optimal: (2/π²)(ψ′(1/4) − ψ′(3/4))."""
    return float(2.0 / np.pi**2 * (polygamma(1, 0.25) - polygamma(1, 0.75)))


def asymptotic_threshold() -> float:
    return LOCAL_BOUND / cglmp_asymptotic_optimal()
