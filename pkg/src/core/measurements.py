"""
Fourier-type measurement bases and joint outcome probabilities.

Alice, setting a, outcome k:  (1/√d) Σ_j exp(i2π j (k + α_a)/d) |j⟩
Bob,   setting b, outcome l:  (1/√d) Σ_j exp(i2π j (−l + β_b)/d) |j⟩

Settings are numbered 1 and 2; outcomes 0..d−1.
"""

from dataclasses import dataclass
from typing import Tuple

import numpy as np
from numpy.typing import NDArray

from core.errors import DimensionError, InvalidParameterError, NumericalConsistencyError
from core.qmath import ComplexMatrix, ComplexVector, as_matrix

ALICE = "alice"
BOB = "bob"

IMAG_TOL = 1e-9
RANGE_TOL = 1e-12
SUM_TOL = 1e-10


@dataclass(frozen=True)
class PhaseOffsets:
    """Phase offsets α_1, α_2 (Alice) and β_1, β_2 (Bob)."""

    alpha1: float = 0.0
    alpha2: float = 0.5
    beta1: float = 0.25
    beta2: float = -0.25

    @classmethod
    def chsh(cls) -> "PhaseOffsets":
        """
        Same bases as the default, with Alice's second observable relabelled
        (k -> k+1), so that E11 + E12 + E21 − E22 reaches 2√2 on qubits.
        """
        return cls(alpha1=0.0, alpha2=-0.5, beta1=0.25, beta2=-0.25)

    def alpha(self, a: int) -> float:
        _check_setting(a)
        return self.alpha1 if a == 1 else self.alpha2

    def beta(self, b: int) -> float:
        _check_setting(b)
        return self.beta1 if b == 1 else self.beta2

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.alpha1, self.alpha2, self.beta1, self.beta2)


DEFAULT_OFFSETS = PhaseOffsets()


@dataclass(frozen=True)
class JointProbabilityTable:
    """P(A_a = k, B_b = l) stored as probs[a−1, b−1, k, l]."""

    d: int
    probs: NDArray[np.float64]

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        if probs.shape != (2, 2, self.d, self.d):
            raise DimensionError(f"Probability table has shape {probs.shape}, expected (2, 2, {self.d}, {self.d})")
        if probs.min() < -RANGE_TOL or probs.max() > 1.0 + RANGE_TOL:
            raise NumericalConsistencyError(
                f"Probabilities outside [0, 1]: min={probs.min():.3e}, max={probs.max():.3e}"
            )
        probs = np.clip(probs, 0.0, 1.0)
        sums = probs.sum(axis=(2, 3))
        if np.max(np.abs(sums - 1.0)) > SUM_TOL:
            raise NumericalConsistencyError(f"Probability slices do not sum to 1: {sums.tolist()}")
        probs.setflags(write=False)
        object.__setattr__(self, "probs", probs)

    def p(self, a: int, b: int, k: int, l: int) -> float:
        """P(A_a = k mod d, B_b = l mod d)."""
        _check_setting(a)
        _check_setting(b)
        return float(self.probs[a - 1, b - 1, k % self.d, l % self.d])

    def slice(self, a: int, b: int) -> NDArray[np.float64]:
        _check_setting(a)
        _check_setting(b)
        return self.probs[a - 1, b - 1]


def _check_setting(s: int) -> None:
    if s not in (1, 2):
        raise InvalidParameterError(f"Measurement setting must be 1 or 2, got {s}")


def _check_outcome(d: int, k: int) -> None:
    if d < 2:
        raise InvalidParameterError(f"Local dimension must be >= 2, got {d}")
    if not 0 <= k < d:
        raise InvalidParameterError(f"Outcome {k} outside 0..{d - 1}")


def _fourier_vector(d: int, shift: float) -> ComplexVector:
    j = np.arange(d)
    return np.exp(2j * np.pi * j * shift / d) / np.sqrt(d)


def alice_eigenvector(d: int, a: int, k: int, offsets: PhaseOffsets = DEFAULT_OFFSETS) -> ComplexVector:
    _check_outcome(d, k)
    return _fourier_vector(d, k + offsets.alpha(a))


def bob_eigenvector(d: int, b: int, l: int, offsets: PhaseOffsets = DEFAULT_OFFSETS) -> ComplexVector:
    _check_outcome(d, l)
    return _fourier_vector(d, -l + offsets.beta(b))


def measurement_basis(d: int, party: str, setting: int, offsets: PhaseOffsets = DEFAULT_OFFSETS) -> ComplexMatrix:
    """
    Eigenvectors of one observable as the columns of a d×d unitary.

    Args:
        d: Local dimension
        party: "alice" or "bob"
        setting: 1 or 2
        offsets: Phase offsets

    Returns:
        Matrix whose column k is the eigenvector for outcome k
    """
    j = np.arange(d)[:, None]
    k = np.arange(d)[None, :]
    if party == ALICE:
        shift = k + offsets.alpha(setting)
    elif party == BOB:
        shift = -k + offsets.beta(setting)
    else:
        raise InvalidParameterError(f"Unknown party '{party}'")
    return np.exp(2j * np.pi * j * shift / d) / np.sqrt(d)


def local_dimension(rho: ComplexMatrix) -> int:
    """d such that rho is d²×d²."""
    n = rho.shape[0]
    if rho.shape[0] != rho.shape[1]:
        raise DimensionError(f"Density matrix must be square, got {rho.shape}")
    d = int(round(np.sqrt(n)))
    if d * d != n or d < 2:
        raise DimensionError(f"Density matrix dimension {n} is not d² with d >= 2")
    return d


def joint_probability_table(rho: ComplexMatrix, offsets: PhaseOffsets = DEFAULT_OFFSETS) -> JointProbabilityTable:
    """
    Tr[(Π_k^{A_a} ⊗ Π_l^{B_b}) ρ] for all settings and outcomes.

    Every probability is the quadratic form ⟨u_k ⊗ v_l|ρ|u_k ⊗ v_l⟩; the d⁴
    forms of one (a, b) pair are contracted in a single einsum.
    """
    rho = as_matrix(rho)
    d = local_dimension(rho)
    rho4 = rho.reshape(d, d, d, d)
    probs = np.empty((2, 2, d, d))
    for a in (1, 2):
        u = measurement_basis(d, ALICE, a, offsets)
        for b in (1, 2):
            v = measurement_basis(d, BOB, b, offsets)
            cell = np.einsum("ik,jl,ijmn,mk,nl->kl", u.conj(), v.conj(), rho4, u, v, optimize=True)
            residue = float(np.max(np.abs(cell.imag)))
            if residue > IMAG_TOL:
                raise NumericalConsistencyError(
                    f"Probability table has imaginary residue {residue:.3e} at settings ({a}, {b})"
                )
            probs[a - 1, b - 1] = cell.real
    return JointProbabilityTable(d=d, probs=probs)


def relabel_outcomes(table: JointProbabilityTable, party: str, setting: int, shift: int) -> JointProbabilityTable:
    """Rename the outcomes of one observable k -> k + shift (mod d)."""
    _check_setting(setting)
    probs = np.array(table.probs)
    if party == ALICE:
        probs[setting - 1] = np.roll(probs[setting - 1], shift, axis=1)
    elif party == BOB:
        probs[:, setting - 1] = np.roll(probs[:, setting - 1], shift, axis=2)
    else:
        raise InvalidParameterError(f"Unknown party '{party}'")
    return JointProbabilityTable(d=table.d, probs=probs)


def alice_marginal(table: JointProbabilityTable, a: int, b: int) -> NDArray[np.float64]:
    return table.slice(a, b).sum(axis=1)


def bob_marginal(table: JointProbabilityTable, a: int, b: int) -> NDArray[np.float64]:
    return table.slice(a, b).sum(axis=0)


def signaling_deviation(table: JointProbabilityTable) -> float:
    """Largest change of one party's marginal under the other party's setting."""
    worst = 0.0
    for s in (1, 2):
        worst = max(worst, float(np.max(np.abs(alice_marginal(table, s, 1) - alice_marginal(table, s, 2)))))
        worst = max(worst, float(np.max(np.abs(bob_marginal(table, 1, s) - bob_marginal(table, 2, s)))))
    return worst


def pure_state_probability_table(psi, offsets: PhaseOffsets = DEFAULT_OFFSETS) -> JointProbabilityTable:
    """
    Same table as joint_probability_table(|ψ⟩⟨ψ|), from the amplitudes
    ⟨u_k ⊗ v_l|ψ⟩ = (U† Ψ V*)[k, l] with Ψ the d×d reshaping of ψ.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    d = int(round(np.sqrt(psi.shape[0])))
    if psi.ndim != 1 or d * d != psi.shape[0] or d < 2:
        raise DimensionError(f"State of dimension {psi.shape} is not a d²-vector with d >= 2")
    amplitudes = psi.reshape(d, d)
    probs = np.empty((2, 2, d, d))
    for a in (1, 2):
        u = measurement_basis(d, ALICE, a, offsets)
        for b in (1, 2):
            v = measurement_basis(d, BOB, b, offsets)
            probs[a - 1, b - 1] = np.abs(u.conj().T @ amplitudes @ v.conj()) ** 2
    return JointProbabilityTable(d=d, probs=probs)
