"""
Value functions (q, ξ) -> Bell value used by threshold searches and region
scans. One BellEvaluator fixes the dimension, the state family, whether the
coupled filters are applied, the functional, and the evaluation path.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from bell.filtering import CouplingDomain, CrossTermConvention, filtered_cglmp_closed_form, filtered_state
from bell.functionals import cglmp_closed_form_optimal, cglmp_value, chsh_optimal_value
from core.errors import InvalidParameterError
from core.measurements import joint_probability_table
from core.settings import get_settings
from core.states import SchmidtCoefficients, mixture, schmidt_state


class StateKind(str, Enum):
    MAX_ENTANGLED = "max-entangled"
    MAX_VIOLATING = "max-violating"


class Inequality(str, Enum):
    AUTO = "auto"
    CGLMP = "cglmp"
    # Optimal-observable CHSH, qubits only
    CHSH = "chsh"

    def resolve(self, d: int) -> "Inequality":
        if self is Inequality.AUTO:
            return Inequality.CHSH if d == 2 else Inequality.CGLMP
        if self is Inequality.CHSH and d != 2:
            raise InvalidParameterError(f"CHSH is defined for d = 2 only, got d = {d}")
        return self


@dataclass
class BellEvaluator:
    """
    Callable (q, xi) -> Bell value.

    The maximally entangled CGLMP value goes through the closed form unless
    use_oracle is set; every other combination builds the density matrix.
    """

    d: int
    state_kind: StateKind = StateKind.MAX_ENTANGLED
    filtered: bool = True
    inequality: Inequality = Inequality.AUTO
    convention: CrossTermConvention = CrossTermConvention.EXACT
    domain: CouplingDomain = CouplingDomain.STRICT
    use_oracle: bool = False
    gammas: Optional[SchmidtCoefficients] = None
    oracle_cap: Optional[int] = None

    def __post_init__(self):
        if self.d < 2:
            raise InvalidParameterError(f"Local dimension must be >= 2, got {self.d}")
        self.state_kind = StateKind(self.state_kind)
        self.inequality = Inequality(self.inequality).resolve(self.d)
        self.convention = CrossTermConvention(self.convention)
        self.domain = CouplingDomain(self.domain)
        if self.oracle_cap is None:
            self.oracle_cap = get_settings().oracle_cap
        if self.state_kind is StateKind.MAX_VIOLATING and self.d < 3:
            raise InvalidParameterError("The maximally violating state differs from the maximally entangled one only for d >= 3")
        if self.convention is CrossTermConvention.PUBLISHED and not self.uses_closed_form:
            raise InvalidParameterError("The published convention exists only for the maximally entangled closed form")
        if not self.uses_closed_form and self.d > self.oracle_cap:
            raise InvalidParameterError(f"Density-matrix path is capped at d = {self.oracle_cap}, got d = {self.d}")
        self._psi = None
        if self.state_kind is StateKind.MAX_VIOLATING:
            if self.gammas is None:
                from search.gammas import maximally_violating_gammas
                self.gammas = maximally_violating_gammas(self.d)
            self._psi = schmidt_state(self.gammas)

    @property
    def uses_closed_form(self) -> bool:
        return (
            self.state_kind is StateKind.MAX_ENTANGLED
            and self.inequality is Inequality.CGLMP
            and (not self.use_oracle or self.convention is CrossTermConvention.PUBLISHED)
        )

    def state(self, q: float, xi: float = 1.0) -> np.ndarray:
        """Density matrix evaluated on the oracle path."""
        if self.filtered:
            return filtered_state(self.d, q, xi, psi=self._psi, domain=self.domain).rho_f
        return mixture(self.d, q, self._psi)

    def __call__(self, q: float, xi: float = 1.0) -> float:
        if self.uses_closed_form:
            if self.filtered:
                return filtered_cglmp_closed_form(self.d, q, xi, self.convention, domain=self.domain)
            return q * cglmp_closed_form_optimal(self.d)
        rho = self.state(q, xi)
        if self.inequality is Inequality.CHSH:
            return chsh_optimal_value(rho).value
        return cglmp_value(joint_probability_table(rho)).value

    def describe(self) -> dict:
        return {
            "d": self.d,
            "state_kind": self.state_kind.value,
            "filtered": self.filtered,
            "inequality": self.inequality.value,
            "convention": self.convention.value,
            "domain": self.domain.value,
            "path": "closed-form" if self.uses_closed_form else "density-matrix",
        }
