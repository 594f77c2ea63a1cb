"""
Threshold tables: unfiltered and filtered thresholds per dimension at the
tabulated filter strengths, with the resulting hidden-nonlocality window.
"""

from typing import Dict, List, Optional

import pandas as pd

from bell.filtering import CouplingDomain, CrossTermConvention
from core.errors import InvalidParameterError
from core.logging_utils import get_logger
from core.settings import get_settings
from search.evaluators import StateKind
from search.thresholds import q_threshold

logger = get_logger("Tables")

# None stands for ξ -> 0, evaluated at Settings.xi_limit
MAX_ENTANGLED_XI: Dict[int, Optional[float]] = {
    3: 0.85,
    4: 0.81,
    5: 0.71,
    6: 0.60,
    7: 0.25,
    8: None,
    9: None,
    10: None,
    100: None,
}

MAX_VIOLATING_XI: Dict[int, Optional[float]] = {3: 0.73, 4: 0.64, 5: 0.54}

TABLES = {
    1: (StateKind.MAX_ENTANGLED, MAX_ENTANGLED_XI),
    2: (StateKind.MAX_VIOLATING, MAX_VIOLATING_XI),
}

COLUMNS = ["d", "xi", "q_unfiltered", "q_filtered", "status", "window_low", "window_high"]


def reproduce_table(
    which: int,
    convention: CrossTermConvention = CrossTermConvention.EXACT,
    domain: CouplingDomain = CouplingDomain.EXTENDED,
    dimensions: Optional[List[int]] = None,
) -> List[dict]:
    """
    Row records for threshold table 1 (maximally entangled) or 2 (maximally
    violating).

    Args:
        which: 1 or 2
        convention: Cross-term convention of the maximally entangled closed
            form; table 2 always evaluates density matrices
        domain: Coupling domain; several tabulated ξ exceed √q*, which only
            the extended domain admits
        dimensions: Subset of the table's dimensions

    Returns:
        One dict per row, keys as in COLUMNS
    """
    if which not in TABLES:
        raise InvalidParameterError(f"Unknown table {which}; choose 1 or 2")
    state_kind, xi_by_d = TABLES[which]
    if state_kind is StateKind.MAX_VIOLATING:
        convention = CrossTermConvention.EXACT
    dims = sorted(xi_by_d) if dimensions is None else list(dimensions)
    unknown = [d for d in dims if d not in xi_by_d]
    if unknown:
        raise InvalidParameterError(f"Table {which} has no rows for d = {unknown}")

    xi_limit = get_settings().xi_limit
    rows = []
    for d in dims:
        xi = xi_by_d[d] if xi_by_d[d] is not None else xi_limit
        unfiltered = q_threshold(d, 1.0, state_kind, filtered=False)
        filtered = q_threshold(d, xi, state_kind, filtered=True, convention=convention, domain=domain)
        rows.append(
            {
                "d": d,
                "xi": xi,
                "q_unfiltered": unfiltered.q_star,
                "q_filtered": filtered.q_star,
                "status": filtered.status.value,
                "window_low": filtered.q_star,
                "window_high": unfiltered.q_star,
            }
        )
        logger.info(f"Table {which} d={d}: {unfiltered.q_star} -> {filtered.q_star} at xi={xi}")
    return rows


def table_frame(rows: List[dict]) -> pd.DataFrame:
    return pd.DataFrame(rows, columns=COLUMNS)
