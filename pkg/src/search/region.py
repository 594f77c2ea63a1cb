"""
Bell values on a (q, ξ) grid.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from numpy.typing import NDArray

from bell.filtering import COUPLING_TOL, CouplingDomain, CrossTermConvention
from bell.functionals import LOCAL_BOUND
from core.errors import InvalidParameterError
from core.logging_utils import get_logger
from core.settings import get_settings
from search.evaluators import BellEvaluator, Inequality, StateKind

logger = get_logger("Region")


@dataclass(frozen=True)
class RegionGrid:
    """values[i, j] is the Bell value at (q_values[i], xi_values[j]); NaN where invalid."""

    d: int
    q_values: NDArray[np.float64]
    xi_values: NDArray[np.float64]
    values: NDArray[np.float64]
    valid: NDArray[np.bool_]

    def __post_init__(self):
        expected = (len(self.q_values), len(self.xi_values))
        if self.values.shape != expected or self.valid.shape != expected:
            raise InvalidParameterError(
                f"Grid shape {self.values.shape} does not match {expected} (q, xi) points"
            )

    @property
    def violated(self) -> NDArray[np.bool_]:
        return self.valid & (np.nan_to_num(self.values, nan=-np.inf) > LOCAL_BOUND)

    def to_frame(self) -> pd.DataFrame:
        """Valid cells as rows d, q, xi, value, violated, sorted by (q, xi)."""
        qq, xx = np.meshgrid(self.q_values, self.xi_values, indexing="ij")
        mask = self.valid
        frame = pd.DataFrame(
            {
                "d": np.full(int(mask.sum()), self.d, dtype=int),
                "q": qq[mask],
                "xi": xx[mask],
                "value": self.values[mask],
            }
        )
        frame["violated"] = frame["value"] > LOCAL_BOUND
        return frame.sort_values(["q", "xi"], kind="mergesort").reset_index(drop=True)


def _check_grid(name: str, grid: NDArray[np.float64], low: float) -> None:
    if grid.ndim != 1:
        raise InvalidParameterError(f"{name} grid must be one-dimensional")
    if grid.size and (grid.min() < low or grid.max() > 1.0):
        raise InvalidParameterError(f"{name} grid must lie in ({low}, 1], got [{grid.min()}, {grid.max()}]")
    if grid.size > 1 and np.any(np.diff(grid) <= 0):
        raise InvalidParameterError(f"{name} grid must be strictly increasing")


def region_scan(
    d: int,
    q_grid: Sequence[float],
    xi_grid: Sequence[float],
    state_kind: StateKind = StateKind.MAX_ENTANGLED,
    inequality: Inequality = Inequality.AUTO,
    convention: CrossTermConvention = CrossTermConvention.EXACT,
    domain: Optional[CouplingDomain] = None,
    use_oracle: bool = False,
    threads: Optional[int] = None,
) -> RegionGrid:
    """
    Filtered Bell value at every valid (q, ξ) cell.

    In the strict domain cells with ξ > √q are left as NaN and marked
    invalid. Rows are distributed over a thread pool; each cell is a pure
    function of (q, ξ) so the grid does not depend on the worker count.
    """
    settings = get_settings()
    q_values = np.asarray(q_grid, dtype=float)
    xi_values = np.asarray(xi_grid, dtype=float)
    _check_grid("q", q_values, np.finfo(float).tiny)
    _check_grid("xi", xi_values, 0.0)

    evaluator = BellEvaluator(
        d=d,
        state_kind=state_kind,
        filtered=True,
        inequality=inequality,
        convention=convention,
        domain=CouplingDomain(domain or settings.coupling_domain),
        use_oracle=use_oracle,
    )
    if evaluator.domain is CouplingDomain.STRICT:
        valid = xi_values[None, :] <= np.sqrt(q_values)[:, None] + COUPLING_TOL
    else:
        valid = np.ones((q_values.size, xi_values.size), dtype=bool)

    def row(i: int) -> NDArray[np.float64]:
        out = np.full(xi_values.size, np.nan)
        for j in np.nonzero(valid[i])[0]:
            out[j] = evaluator(float(q_values[i]), float(xi_values[j]))
        return out

    workers = settings.threads if threads is None else threads
    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(row, range(q_values.size)))
    values = np.vstack(rows) if rows else np.empty((0, xi_values.size))
    logger.info(f"d={d}: {int(valid.sum())} of {valid.size} cells evaluated")
    return RegionGrid(d=d, q_values=q_values, xi_values=xi_values, values=values, valid=valid)


def grid_points(start: float, stop: float, step: float) -> NDArray[np.float64]:
    """Inclusive arithmetic grid rounded to 10 decimals."""
    if step <= 0:
        raise InvalidParameterError(f"Grid step must be positive, got {step}")
    if stop < start:
        raise InvalidParameterError(f"Grid end {stop} lies below its start {start}")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 10)
