"""
Diagonal local filters on each side, the filtered (post-selected) states they
produce, and closed forms for the filtered maximally entangled mixture.

The coupled strategy attenuates Alice's |0⟩ by ξ and Bob's by δ = ξ/√q so
that the pure and colour-noise components are rebalanced. In the strict
domain this needs ξ ≤ √q. The extended domain also accepts ξ > √q: Bob then
applies diag(1, √q/ξ, ..., √q/ξ), which is δ = ξ/√q up to an overall factor
and therefore yields the same normalized state.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from bell.functionals import cglmp_weights
from core.errors import DegenerateFilterError, EvaluationError, InvalidParameterError
from core.measurements import DEFAULT_OFFSETS, PhaseOffsets
from core.qmath import ComplexMatrix, as_matrix, dagger, kron, trace
from core.states import mixture

TRACE_FLOOR = 1e-14
COUPLING_TOL = 1e-12


class CrossTermConvention(str, Enum):
    """
    EXACT reproduces the density-matrix result. PUBLISHED evaluates the
    pure/colour-noise interference term as 1/sin(πx/d) instead of the exact
    1 ± cot(πx/d); it is kept to regenerate the published closed-form column.
    """

    EXACT = "exact"
    PUBLISHED = "published"


class CouplingDomain(str, Enum):
    STRICT = "strict"
    EXTENDED = "extended"


@dataclass(frozen=True)
class FilterPair:
    """
    Alice applies diag(xi, 1, ..., 1); Bob applies diag(delta, bob_rest, ..., bob_rest).
    """

    d: int
    xi: float
    delta: float
    bob_rest: float = 1.0

    def __post_init__(self):
        if self.d < 2:
            raise InvalidParameterError(f"Local dimension must be >= 2, got {self.d}")
        for name, value in (("xi", self.xi), ("delta", self.delta), ("bob_rest", self.bob_rest)):
            if not 0.0 <= value <= 1.0:
                raise InvalidParameterError(f"Filter parameter {name} must lie in [0, 1], got {value}")
        if self.bob_rest == 0.0:
            raise InvalidParameterError("Bob's filter cannot annihilate every level above |0⟩")

    @classmethod
    def coupled(cls, d: int, q: float, xi: float, domain: CouplingDomain = CouplingDomain.STRICT) -> "FilterPair":
        """δ = ξ/√q, rescaled on Bob's side when ξ > √q in the extended domain."""
        _check_q(q)
        root = np.sqrt(q)
        if xi <= root + COUPLING_TOL:
            return cls(d=d, xi=xi, delta=min(xi / root, 1.0))
        if CouplingDomain(domain) is CouplingDomain.EXTENDED and xi <= 1.0:
            return cls(d=d, xi=xi, delta=1.0, bob_rest=root / xi)
        raise InvalidParameterError(f"Coupled filters need xi <= sqrt(q) = {root:.6g}, got xi = {xi}")

    @classmethod
    def identity(cls, d: int) -> "FilterPair":
        return cls(d=d, xi=1.0, delta=1.0)

    @property
    def delta_ratio(self) -> float:
        """Bob's |0⟩ weight relative to his other levels."""
        return self.delta / self.bob_rest

    def operator(self) -> ComplexMatrix:
        return kron(filter_operator(self.d, self.xi), filter_operator(self.d, self.delta, self.bob_rest))


@dataclass(frozen=True)
class FilteredState:
    rho_f: ComplexMatrix
    success_prob: float


def _check_q(q: float) -> None:
    if not 0.0 < q <= 1.0:
        raise InvalidParameterError(f"Mixing parameter q must satisfy 0 < q <= 1, got {q}")


def _resolve_delta(q: float, xi: float, delta: Optional[float], domain: CouplingDomain) -> float:
    _check_q(q)
    if delta is None:
        return FilterPair.coupled(2, q, xi, domain).delta_ratio
    return FilterPair(2, xi, delta).delta


def filter_operator(d: int, p: float, rest: float = 1.0) -> ComplexMatrix:
    """diag(p, rest, ..., rest); rest is 1 for the filters of the coupled strategy."""
    for value in (p, rest):
        if not 0.0 <= value <= 1.0:
            raise InvalidParameterError(f"Filter parameter must lie in [0, 1], got {value}")
    diagonal = np.full(d, rest, dtype=np.complex128)
    diagonal[0] = p
    return np.diag(diagonal)


def apply_filters(rho: ComplexMatrix, f: FilterPair) -> FilteredState:
    """
    (F_A ⊗ F_B) ρ (F_A ⊗ F_B)† renormalized, with its trace as the success
    probability.
    """
    rho = as_matrix(rho)
    if rho.shape != (f.d * f.d, f.d * f.d):
        raise InvalidParameterError(f"State shape {rho.shape} does not match filters for d = {f.d}")
    op = f.operator()
    unnormalized = op @ rho @ dagger(op)
    success = trace(unnormalized).real
    if success <= TRACE_FLOOR:
        raise DegenerateFilterError(f"Filtered operator has vanishing trace {success:.3e}")
    return FilteredState(rho_f=unnormalized / success, success_prob=float(success))


def filtered_state(
    d: int,
    q: float,
    xi: float,
    psi=None,
    delta: Optional[float] = None,
    domain: CouplingDomain = CouplingDomain.STRICT,
) -> FilteredState:
    """Filtered mixture q|ψ⟩⟨ψ| + (1−q)|0⟩⟨0|⊗I/d; ψ defaults to maximally entangled."""
    f = FilterPair.coupled(d, q, xi, domain) if delta is None else FilterPair(d, xi, delta)
    return apply_filters(mixture(d, q, psi), f)


def success_probability_closed_form(
    d: int,
    q: float,
    xi: float,
    delta: Optional[float] = None,
    domain: CouplingDomain = CouplingDomain.STRICT,
) -> float:
    """
    Tr[F ρ F†] for the maximally entangled mixture with Bob's filter diag(δ, 1, ..., 1).

    With δ = ξ/√q this is N_d = [q + (1−q)ξ²](1 − 1/d) + ξ⁴/(qd). A coupled
    pair rescaled into the extended domain scales it by bob_rest².
    """
    scale = 1.0
    if delta is None:
        pair = FilterPair.coupled(2, q, xi, domain)
        delta, scale = pair.delta_ratio, pair.bob_rest**2
    else:
        delta = _resolve_delta(q, xi, delta, domain)
    return scale * (q * (delta**2 * xi**2 + d - 1) + (1.0 - q) * xi**2 * (delta**2 + d - 1)) / d


def _fourier_sum_terms(d: int, x: float):
    """|G|² and 2·Re G for G = Σ_j exp(−i2πjx/d)."""
    y = np.pi * x / d
    s = np.sin(y)
    if abs(s) < 1e-12:
        g = np.exp(-2j * np.pi * np.arange(d) * x / d).sum()
        return abs(g) ** 2, 2.0 * g.real
    return np.sin(np.pi * x) ** 2 / s**2, 1.0 + np.sin(2.0 * np.pi * x - y) / s


def filtered_prob_closed_form(
    d: int,
    q: float,
    xi: float,
    a: int,
    b: int,
    k: int,
    l: int,
    offsets: PhaseOffsets = DEFAULT_OFFSETS,
    delta: Optional[float] = None,
    domain: CouplingDomain = CouplingDomain.STRICT,
) -> float:
    """
    P(A_a = k, B_b = l) on the filtered maximally entangled mixture.

    P = [q|G|² + qc·2Re G + qc² + (1−q)ξ²(δ² + d − 1)] / (d³ N),
    c = δξ − 1, x = k − l + α_a + β_b. For the default offsets sin²(πx) = 1/2
    and 2Re G = 1 ± cot(πx/d), + when α_a + β_b ≡ 1/4 and − when ≡ 3/4 (mod 1).
    """
    if d < 2:
        raise InvalidParameterError(f"Local dimension must be >= 2, got {d}")
    delta = _resolve_delta(q, xi, delta, domain)
    c = delta * xi - 1.0
    g2, two_re_g = _fourier_sum_terms(d, k - l + offsets.alpha(a) + offsets.beta(b))
    numerator = q * g2 + q * c * two_re_g + q * c**2 + (1.0 - q) * xi**2 * (delta**2 + d - 1)
    norm = (q * (delta**2 * xi**2 + d - 1) + (1.0 - q) * xi**2 * (delta**2 + d - 1)) / d
    return float(numerator / (d**3 * norm))


def cglmp_fourier_sums(d: int, convention: CrossTermConvention = CrossTermConvention.EXACT) -> Tuple[float, float]:
    """
    (A, B) of the filtered CGLMP closed form:
    A = Σ_k w_k [1/(2sin²a_k) − 1/(2sin²b_k)], a_k = π(k+1/4)/d, b_k = π(k+3/4)/d,
    B = Σ_k w_k [cot a_k + cot b_k]   (exact)
    B = Σ_k w_k [1/sin a_k + 1/sin b_k]   (published).
    """
    k, weights = cglmp_weights(d)
    angle_a = np.pi * (k + 0.25) / d
    angle_b = np.pi * (k + 0.75) / d
    a_sum = np.sum(weights * (0.5 / np.sin(angle_a) ** 2 - 0.5 / np.sin(angle_b) ** 2))
    if CrossTermConvention(convention) is CrossTermConvention.EXACT:
        b_sum = np.sum(weights * (1.0 / np.tan(angle_a) + 1.0 / np.tan(angle_b)))
    else:
        b_sum = np.sum(weights * (1.0 / np.sin(angle_a) + 1.0 / np.sin(angle_b)))
    return float(a_sum), float(b_sum)


def filtered_cglmp_closed_form(
    d: int,
    q: float,
    xi: float,
    convention: CrossTermConvention = CrossTermConvention.EXACT,
    delta: Optional[float] = None,
    domain: CouplingDomain = CouplingDomain.STRICT,
) -> float:
    """
    CGLMP value of the filtered maximally entangled mixture (default offsets):
    I = 4[qA + qcB] / (d² N), c = δξ − 1, with (A, B) from cglmp_fourier_sums.
    """
    delta = _resolve_delta(q, xi, delta, domain)
    a_sum, b_sum = cglmp_fourier_sums(d, convention)
    qc = q * (delta * xi - 1.0)
    norm = (q * (delta**2 * xi**2 + d - 1) + (1.0 - q) * xi**2 * (delta**2 + d - 1)) / d
    return float(4.0 * (q * a_sum + qc * b_sum) / (d**2 * norm))


def _check_rational_domain(q: float, xi: float) -> None:
    _check_q(q)
    if not 0.0 <= xi <= np.sqrt(q) + COUPLING_TOL:
        raise InvalidParameterError(f"Need 0 <= xi <= sqrt(q), got xi = {xi}, q = {q}")


def _ratio(numerator: float, denominator: float, label: str) -> float:
    if abs(denominator) < 1e-14:
        raise EvaluationError(f"{label}: denominator {denominator:.3e} vanishes")
    return float(numerator / denominator)


def filtered_rational_d3(q: float, xi: float) -> float:
    """Filtered CGLMP value of the d = 3 maximally violating mixture, 3-decimal coefficients."""
    _check_rational_domain(q, xi)
    numerator = 2.218 * xi**2 * np.sqrt(q) + 0.696 * q
    denominator = xi**4 * (0.047 * q + 0.333) / q - 0.666 * xi**2 * (q - 1.0) + 0.619 * q
    return _ratio(numerator, denominator, "d=3 rational form")


def filtered_rational_d4(q: float, xi: float) -> float:
    _check_rational_domain(q, xi)
    numerator = -2.562 * xi**2 * q**1.5 - 1.401 * q**2
    denominator = -0.902 * q**2 + xi**4 * (-0.097 * q - 0.333) - xi**2 * q * (1.0 - q)
    return _ratio(numerator, denominator, "d=4 rational form")


def filtered_rational_d5(q: float, xi: float) -> float:
    _check_rational_domain(q, xi)
    numerator = -2.172 * xi**2 * q**1.5 - 1.597 * q**2
    denominator = -0.889 * q**2 + xi**4 * (-0.110 * q - 0.25) - xi**2 * q * (1.0 - q)
    return _ratio(numerator, denominator, "d=5 rational form")


RATIONAL_FORMS: Dict[int, Callable[[float, float], float]] = {
    3: filtered_rational_d3,
    4: filtered_rational_d4,
    5: filtered_rational_d5,
}


def filtered_rational(d: int, q: float, xi: float) -> float:
    if d not in RATIONAL_FORMS:
        raise InvalidParameterError(f"No rational form for d = {d}; available: {sorted(RATIONAL_FORMS)}")
    return RATIONAL_FORMS[d](q, xi)
