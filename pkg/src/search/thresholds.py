"""
Mixing-parameter thresholds: the smallest q at which a state family violates
the local bound, for a fixed filter strength ξ or optimized over ξ.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import bisect, minimize_scalar

from bell.filtering import CouplingDomain, CrossTermConvention
from bell.functionals import LOCAL_BOUND
from core.errors import InvalidParameterError, MultipleCrossingsError, NumericalConsistencyError
from core.logging_utils import get_logger
from core.settings import get_settings
from search.evaluators import BellEvaluator, Inequality, StateKind

logger = get_logger("Threshold")


class ThresholdStatus(str, Enum):
    CROSSING = "crossing"
    WHOLE_RANGE = "whole_range"
    NO_VIOLATION = "no_violation"


@dataclass(frozen=True)
class ThresholdResult:
    """
    Located threshold. q_star is None for NO_VIOLATION and equals the lower
    end of the searched interval for WHOLE_RANGE.
    """

    d: int
    state_kind: StateKind
    q_star: Optional[float]
    xi_star: float
    bell_at_threshold: Optional[float]
    filtered: bool
    status: ThresholdStatus = ThresholdStatus.CROSSING
    inequality: Inequality = Inequality.CGLMP
    convention: CrossTermConvention = CrossTermConvention.EXACT
    q_lower: float = 0.0
    scan: Tuple[Tuple[float, float], ...] = field(default=(), compare=False, repr=False)

    @property
    def found(self) -> bool:
        return self.status is not ThresholdStatus.NO_VIOLATION

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "state_kind": self.state_kind.value,
            "filtered": self.filtered,
            "inequality": self.inequality.value,
            "convention": self.convention.value,
            "status": self.status.value,
            "q_star": self.q_star,
            "xi_star": self.xi_star,
            "bell_at_threshold": self.bell_at_threshold,
            "q_lower": self.q_lower,
        }


def search_interval(evaluator: BellEvaluator, xi: float) -> Tuple[float, float]:
    """[max(ξ², q_min), 1] for coupled filters in the strict domain, [q_min, 1] otherwise."""
    q_min = get_settings().q_min
    if evaluator.filtered and evaluator.domain is CouplingDomain.STRICT:
        return max(xi * xi, q_min), 1.0
    return q_min, 1.0


def _sign_changes(violated: np.ndarray) -> List[int]:
    return [int(i) for i in np.nonzero(violated[1:] != violated[:-1])[0]]


def q_threshold(
    d: int,
    xi: float = 1.0,
    state_kind: StateKind = StateKind.MAX_ENTANGLED,
    filtered: bool = True,
    tol: Optional[float] = None,
    inequality: Inequality = Inequality.AUTO,
    convention: CrossTermConvention = CrossTermConvention.EXACT,
    domain: Optional[CouplingDomain] = None,
    use_oracle: bool = False,
    evaluator: Optional[BellEvaluator] = None,
) -> ThresholdResult:
    """
    Smallest q whose Bell value exceeds the local bound at filter strength xi.

    A pre-scan over the interval checks that the value crosses the bound at
    most once, from below, before bisecting the bracketing cell.

    Args:
        d: Local dimension
        xi: Alice's filter parameter (ignored when filtered is False)
        state_kind: Pure component of the mixture
        filtered: Apply the coupled filters
        tol: Bisection tolerance on q (default Settings.q_tol)
        inequality, convention, domain, use_oracle: Forwarded to BellEvaluator
        evaluator: Ready-made value function; overrides the arguments above

    Returns:
        ThresholdResult with status crossing, whole_range or no_violation

    Raises:
        MultipleCrossingsError: The pre-scan crosses the bound more than once
        NumericalConsistencyError: The value violates only below the crossing
    """
    settings = get_settings()
    tol = settings.q_tol if tol is None else tol
    if tol <= 0:
        raise InvalidParameterError(f"Tolerance must be positive, got {tol}")
    if evaluator is None:
        evaluator = BellEvaluator(
            d=d,
            state_kind=state_kind,
            filtered=filtered,
            inequality=inequality,
            convention=convention,
            domain=CouplingDomain(domain or settings.coupling_domain),
            use_oracle=use_oracle,
        )
    if evaluator.filtered and not 0.0 <= xi <= 1.0:
        raise InvalidParameterError(f"Filter parameter xi must lie in [0, 1], got {xi}")
    xi_star = float(xi) if evaluator.filtered else 1.0

    q_lo, q_hi = search_interval(evaluator, xi_star)
    qs = np.linspace(q_lo, q_hi, settings.prescan_points)
    values = np.array([evaluator(float(q), xi_star) for q in qs])
    scan = tuple(zip(qs.tolist(), values.tolist()))
    violated = values > LOCAL_BOUND
    changes = _sign_changes(violated)

    base = dict(
        d=evaluator.d,
        state_kind=evaluator.state_kind,
        xi_star=xi_star,
        filtered=evaluator.filtered,
        inequality=evaluator.inequality,
        convention=evaluator.convention,
        q_lower=float(q_lo),
        scan=scan,
    )

    if len(changes) > 1:
        raise MultipleCrossingsError(
            f"d={evaluator.d}, xi={xi_star}: Bell value crosses {LOCAL_BOUND} {len(changes)} times on [{q_lo:.4g}, 1]",
            scan=list(scan),
        )
    if not changes:
        if violated[0]:
            logger.info(f"d={evaluator.d} xi={xi_star}: violation on the whole interval from q={q_lo:.4g}")
            return ThresholdResult(
                q_star=float(q_lo),
                bell_at_threshold=float(values[0]),
                status=ThresholdStatus.WHOLE_RANGE,
                **base,
            )
        logger.info(f"d={evaluator.d} xi={xi_star}: no violation on [{q_lo:.4g}, 1]")
        return ThresholdResult(q_star=None, bell_at_threshold=None, status=ThresholdStatus.NO_VIOLATION, **base)

    i = changes[0]
    if violated[i]:
        raise NumericalConsistencyError(
            f"d={evaluator.d}, xi={xi_star}: violation only below q={qs[i + 1]:.6g}; "
            "the value is expected to grow with q"
        )

    def excess(q: float) -> float:
        return evaluator(q, xi_star) - LOCAL_BOUND

    q_star = float(bisect(excess, float(qs[i]), float(qs[i + 1]), xtol=tol))
    bell = evaluator(q_star, xi_star)
    logger.info(f"d={evaluator.d} xi={xi_star}: q*={q_star:.6f} (I={bell:.6f})")
    return ThresholdResult(q_star=q_star, bell_at_threshold=float(bell), **base)


def _xi_grid(step: float) -> np.ndarray:
    count = int(round(1.0 / step))
    return np.round(np.arange(1, count + 1) * step, 10)


def _threshold_or_none(evaluator: BellEvaluator, xi: float, tol: float) -> Optional[ThresholdResult]:
    try:
        return q_threshold(evaluator.d, xi, tol=tol, evaluator=evaluator)
    except MultipleCrossingsError as e:
        logger.warning(f"Skipping xi={xi}: {e}")
        return None


def _rank(result: Optional[ThresholdResult]) -> float:
    if result is None or result.q_star is None:
        return np.inf
    return result.q_star


def optimize_xi(
    d: int,
    state_kind: StateKind = StateKind.MAX_ENTANGLED,
    inequality: Inequality = Inequality.AUTO,
    convention: CrossTermConvention = CrossTermConvention.EXACT,
    domain: Optional[CouplingDomain] = None,
    use_oracle: bool = False,
    tol: Optional[float] = None,
    threads: Optional[int] = None,
    xi_step: Optional[float] = None,
) -> ThresholdResult:
    """
    Filter strength ξ that minimizes the filtered threshold.

    Every ξ on the coarse grid gets its own q_threshold; the best cell is then
    refined with a bounded Brent search over [ξ_best − step, ξ_best + step].
    A violation down to q_min is not refined.
    """
    settings = get_settings()
    tol = settings.q_tol if tol is None else tol
    step = settings.xi_step if xi_step is None else xi_step
    workers = settings.threads if threads is None else threads
    evaluator = BellEvaluator(
        d=d,
        state_kind=state_kind,
        filtered=True,
        inequality=inequality,
        convention=convention,
        domain=CouplingDomain(domain or settings.coupling_domain),
        use_oracle=use_oracle,
    )
    grid = _xi_grid(step)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(lambda xi: _threshold_or_none(evaluator, float(xi), tol), grid))

    ranks = np.array([_rank(r) for r in results])
    best_index = int(np.argmin(ranks))
    best = results[best_index]
    if best is None or not np.isfinite(ranks[best_index]):
        logger.warning(f"d={d}: no xi on the grid gives a violation")
        return ThresholdResult(
            d=d,
            state_kind=evaluator.state_kind,
            q_star=None,
            xi_star=float(grid[-1]),
            bell_at_threshold=None,
            filtered=True,
            status=ThresholdStatus.NO_VIOLATION,
            inequality=evaluator.inequality,
            convention=evaluator.convention,
        )
    if best.status is ThresholdStatus.WHOLE_RANGE and best.q_star <= settings.q_min:
        return best

    lo = max(float(grid[best_index]) - step, step / 10.0)
    hi = min(float(grid[best_index]) + step, 1.0)
    refined = minimize_scalar(
        lambda xi: min(_rank(_threshold_or_none(evaluator, float(xi), tol)), 2.0),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": 1e-4},
    )
    if refined.success and np.isfinite(refined.fun) and refined.fun < best.q_star:
        candidate = _threshold_or_none(evaluator, float(refined.x), tol)
        if candidate is not None and candidate.q_star is not None and candidate.q_star < best.q_star:
            best = candidate
    logger.info(f"d={d}: xi*={best.xi_star:.4f}, q*={best.q_star:.6f}")
    return best


def hidden_nonlocality_window(
    d: int,
    state_kind: StateKind = StateKind.MAX_ENTANGLED,
    xi: Optional[float] = None,
    inequality: Inequality = Inequality.AUTO,
    convention: CrossTermConvention = CrossTermConvention.EXACT,
    domain: Optional[CouplingDomain] = None,
    use_oracle: bool = False,
) -> Tuple[Optional[float], Optional[float]]:
    """
    (q_filtered, q_unfiltered): mixtures with q in this interval violate only
    after filtering. xi=None optimizes the filter strength first.
    """
    options = dict(inequality=inequality, convention=convention, domain=domain, use_oracle=use_oracle)
    if xi is None:
        filtered = optimize_xi(d, state_kind, **options)
    else:
        filtered = q_threshold(d, xi, state_kind, filtered=True, **options)
    unfiltered = q_threshold(d, 1.0, state_kind, filtered=False, inequality=inequality, use_oracle=use_oracle)
    return filtered.q_star, unfiltered.q_star
