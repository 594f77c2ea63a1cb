"""
Schmidt coefficients of the pure state with the largest CGLMP value.

Derivative-free coordinate ascent on a raw vector x with γ = |x|/‖x‖. A
coordinate move of ±step is accepted when it raises the value; a sweep
without any accepted move halves the step. The search stops once the step
drops below the configured minimum.

Restart schedule (deterministic): uniform coefficients, the known optimum
when one is tabulated for d, then cosine-tilted starts
x_j = 1 + 0.25·cos(2πr(j + 1/2)/d), r = 1, 2, ..., which are symmetric under
j -> d−1−j.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, List, Optional, Tuple

import numpy as np

from bell.functionals import cglmp_value
from core.errors import InvalidParameterError
from core.logging_utils import get_logger
from core.measurements import pure_state_probability_table
from core.settings import get_settings
from core.states import KNOWN_OPTIMAL_GAMMAS, SchmidtCoefficients, schmidt_state

MAX_DIMENSION = 8
IMPROVEMENT_FLOOR = 1e-15

logger = get_logger("Gammas")


@dataclass(frozen=True)
class GammaOptimum:
    d: int
    gammas: SchmidtCoefficients
    value: float
    converged: bool = True
    sweeps: int = 0
    restarts: int = 1
    history: Tuple[float, ...] = field(default=(), compare=False)

    def symmetry_defect(self) -> float:
        """Largest |γ_j − γ_{d+1−j}|."""
        g = np.asarray(self.gammas.gammas)
        return float(np.max(np.abs(g - g[::-1])))


def schmidt_value(gammas: SchmidtCoefficients) -> float:
    """CGLMP value of Σ_j γ_j |jj⟩ at q = 1."""
    return cglmp_value(pure_state_probability_table(schmidt_state(gammas))).value


def _expand(params: np.ndarray, d: int, symmetric: bool) -> np.ndarray:
    if not symmetric:
        return params
    return np.concatenate([params, params[: d // 2][::-1]])


def _to_gammas(raw: np.ndarray) -> SchmidtCoefficients:
    return SchmidtCoefficients.normalized(raw)


def restart_schedule(d: int, count: int) -> List[np.ndarray]:
    """The first `count` starting vectors (length d)."""
    starts = [np.ones(d)]
    if d in KNOWN_OPTIMAL_GAMMAS:
        starts.append(np.asarray(KNOWN_OPTIMAL_GAMMAS[d], dtype=float))
    r = 1
    j = np.arange(d)
    while len(starts) < count:
        starts.append(1.0 + 0.25 * np.cos(2.0 * np.pi * r * (j + 0.5) / d))
        r += 1
    return starts[:count]


def _coordinate_ascent(
    objective: Callable[[np.ndarray], float],
    x0: np.ndarray,
    initial_step: float,
    min_step: float,
    max_sweeps: int,
) -> Tuple[np.ndarray, float, int, bool]:
    x = np.array(x0, dtype=float)
    best = objective(x)
    step = initial_step
    sweeps = 0
    while step >= min_step and sweeps < max_sweeps:
        sweeps += 1
        improved = False
        for i in range(x.size):
            for direction in (1.0, -1.0):
                trial = x.copy()
                trial[i] += direction * step
                if not np.any(trial):
                    continue
                value = objective(trial)
                if value > best + IMPROVEMENT_FLOOR:
                    x, best, improved = trial, value, True
                    break
        if not improved:
            step /= 2.0
    return x, best, sweeps, step < min_step


def optimize_gammas(
    d: int,
    restarts: Optional[int] = None,
    symmetric: bool = False,
) -> GammaOptimum:
    """
    Maximize the q = 1 CGLMP value over Schmidt coefficients.

    Args:
        d: Local dimension, 3 <= d <= 8 (and within the oracle cap)
        restarts: Number of starting points from the restart schedule
        symmetric: Optimize only ⌈d/2⌉ mirrored parameters

    Returns:
        Best optimum over all restarts; converged is False when any run hit
        the sweep limit
    """
    settings = get_settings()
    if not 3 <= d <= min(MAX_DIMENSION, settings.oracle_cap):
        raise InvalidParameterError(
            f"Schmidt optimization supports 3 <= d <= {min(MAX_DIMENSION, settings.oracle_cap)}, got d = {d}"
        )
    count = restarts if restarts is not None else settings.gamma_restarts
    if count < 1:
        raise InvalidParameterError(f"Need at least one restart, got {count}")

    def objective(params: np.ndarray) -> float:
        return schmidt_value(_to_gammas(_expand(params, d, symmetric)))

    best: Optional[GammaOptimum] = None
    all_converged = True
    total_sweeps = 0
    history = []
    for index, start in enumerate(restart_schedule(d, count)):
        params0 = start[: (d + 1) // 2] if symmetric else start
        params, value, sweeps, converged = _coordinate_ascent(
            objective,
            params0,
            settings.gamma_initial_step,
            settings.gamma_min_step,
            settings.gamma_max_sweeps,
        )
        total_sweeps += sweeps
        all_converged = all_converged and converged
        history.append(value)
        logger.info(f"d={d} restart {index}: value={value:.10f} after {sweeps} sweeps")
        if best is None or value > best.value:
            best = GammaOptimum(d=d, gammas=_to_gammas(_expand(params, d, symmetric)), value=value)

    if not all_converged:
        logger.warning(f"d={d}: sweep limit {settings.gamma_max_sweeps} reached before the step converged")
    return GammaOptimum(
        d=d,
        gammas=best.gammas,
        value=best.value,
        converged=all_converged,
        sweeps=total_sweeps,
        restarts=count,
        history=tuple(history),
    )


@lru_cache(maxsize=None)
def maximally_violating_gammas(d: int) -> SchmidtCoefficients:
    """Cached optimum for d (symmetric mode, default restarts)."""
    return optimize_gammas(d, symmetric=True).gammas
