"""
Bipartite qudit states: maximally entangled and Schmidt-form pure states and
their mixture with colour noise |0⟩⟨0| ⊗ I/d on Alice's side.

Bipartite index convention: (j_A, j_B) -> j_A·d + j_B.
"""

from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from core.errors import InvalidParameterError
from core.qmath import ComplexMatrix, ComplexVector, as_vector, kron, outer

NORM_TOL = 1e-10

# Schmidt coefficients of the states with the largest CGLMP value at q = 1
KNOWN_OPTIMAL_GAMMAS: Dict[int, Tuple[float, ...]] = {
    3: (0.6169, 0.4888, 0.6169),
    4: (0.5686, 0.4204, 0.4204, 0.5686),
    5: (0.5368, 0.3859, 0.3548, 0.3859, 0.5368),
}

KNOWN_OPTIMAL_VALUES: Dict[int, float] = {3: 2.915, 4: 2.972, 5: 3.0158}


@dataclass(frozen=True)
class SchmidtCoefficients:
    """Non-negative weights γ_j of Σ_j γ_j |jj⟩, normalized to Σγ² = 1."""

    gammas: Tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(g) for g in self.gammas)
        object.__setattr__(self, "gammas", values)
        if len(values) < 2:
            raise InvalidParameterError(f"Need at least 2 Schmidt coefficients, got {len(values)}")
        if any(g < 0 for g in values):
            raise InvalidParameterError(f"Schmidt coefficients must be non-negative: {values}")
        total = sum(g * g for g in values)
        if abs(total - 1.0) > NORM_TOL:
            raise InvalidParameterError(f"Schmidt coefficients not normalized (Σγ² = {total:.12g})")

    @classmethod
    def normalized(cls, raw: Sequence[float]) -> "SchmidtCoefficients":
        """Build from arbitrary non-negative weights, rescaling to unit norm."""
        arr = np.abs(np.asarray(raw, dtype=float))
        length = float(np.linalg.norm(arr))
        if length == 0.0:
            raise InvalidParameterError("Cannot normalize an all-zero coefficient vector")
        return cls(tuple(arr / length))

    @property
    def d(self) -> int:
        return len(self.gammas)

    def reversed(self) -> "SchmidtCoefficients":
        return SchmidtCoefficients(tuple(reversed(self.gammas)))


@dataclass(frozen=True)
class MixedStateParams:
    """Inputs of q|ψ⟩⟨ψ| + (1−q)|0⟩⟨0| ⊗ I/d."""

    d: int
    q: float
    psi: ComplexVector

    def __post_init__(self):
        if self.d < 2:
            raise InvalidParameterError(f"Local dimension must be >= 2, got {self.d}")
        if not 0.0 < self.q <= 1.0:
            raise InvalidParameterError(f"Mixing parameter q must satisfy 0 < q <= 1, got {self.q}")
        psi = as_vector(self.psi)
        if psi.shape[0] != self.d * self.d:
            raise InvalidParameterError(f"State has dimension {psi.shape[0]}, expected {self.d * self.d}")
        if abs(np.linalg.norm(psi) - 1.0) > NORM_TOL:
            raise InvalidParameterError("Pure state must be normalized")
        object.__setattr__(self, "psi", psi)


def uniform_gammas(d: int) -> SchmidtCoefficients:
    if d < 2:
        raise InvalidParameterError(f"Local dimension must be >= 2, got {d}")
    return SchmidtCoefficients(tuple([1.0 / np.sqrt(d)] * d))


def schmidt_state(gammas: SchmidtCoefficients) -> ComplexVector:
    """Σ_j γ_j |jj⟩ as a d²-vector."""
    if not isinstance(gammas, SchmidtCoefficients):
        gammas = SchmidtCoefficients(tuple(gammas))
    d = gammas.d
    psi = np.zeros(d * d, dtype=np.complex128)
    diagonal = np.arange(d) * (d + 1)
    psi[diagonal] = gammas.gammas
    return psi


def max_entangled(d: int) -> ComplexVector:
    """(1/√d) Σ_j |jj⟩."""
    return schmidt_state(uniform_gammas(d))


def noise_state(d: int) -> ComplexMatrix:
    """Colour noise |0⟩⟨0| ⊗ I/d."""
    if d < 2:
        raise InvalidParameterError(f"Local dimension must be >= 2, got {d}")
    zero = np.zeros((d, d), dtype=np.complex128)
    zero[0, 0] = 1.0
    return kron(zero, np.eye(d, dtype=np.complex128) / d)


def mixed_state(params: MixedStateParams) -> ComplexMatrix:
    """q|ψ⟩⟨ψ| + (1−q)|0⟩⟨0| ⊗ I/d."""
    pure = outer(params.psi, params.psi)
    if params.q == 1.0:
        return pure
    return params.q * pure + (1.0 - params.q) * noise_state(params.d)


def mixture(d: int, q: float, psi: ComplexVector = None) -> ComplexMatrix:
    """Shortcut for mixed_state with the maximally entangled state as default."""
    return mixed_state(MixedStateParams(d=d, q=q, psi=max_entangled(d) if psi is None else psi))
