"""
Result writers: JSON documents and CSV tables, to a file or stdout.

Both formats are byte-stable: fixed key order, no timestamps, LF line endings.
"""

import io
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import pandas as pd

from core.errors import OutputError
from core.logging_utils import get_logger
from search.region import RegionGrid
from search.tables import COLUMNS, table_frame

logger = get_logger("Output")

PathLike = Union[str, Path]

REGION_COLUMNS = ["d", "q", "xi", "value", "violated"]


def format_float(x: Optional[float]) -> str:
    """Shortest repr of x rounded to 10 significant digits; empty for None or NaN."""
    if x is None or pd.isna(x):
        return ""
    return repr(float(f"{float(x):.10g}"))


def _write(text: str, path: Optional[PathLike]) -> None:
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    except OSError as e:
        raise OutputError(f"Cannot write {target}: {e}") from e
    logger.info(f"Wrote {target}")


def render_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False, default=str) + "\n"


def emit_json(payload: Dict[str, Any], path: Optional[PathLike] = None) -> str:
    """
    Write a result document.

    Args:
        payload: {command, params, results, checks}
        path: Target file; stdout when None

    Returns:
        The rendered text
    """
    text = render_json(payload)
    _write(text, path)
    return text


def _frame_to_csv(frame: pd.DataFrame) -> str:
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, lineterminator="\n")
    return buffer.getvalue()


def region_csv(grid: RegionGrid) -> str:
    frame = grid.to_frame()
    out = pd.DataFrame(
        {
            "d": frame["d"].astype(int).astype(str),
            "q": frame["q"].map(format_float),
            "xi": frame["xi"].map(format_float),
            "value": frame["value"].map(format_float),
            "violated": frame["violated"].map(lambda v: "true" if v else "false"),
        },
        columns=REGION_COLUMNS,
    )
    return _frame_to_csv(out)


def emit_region_csv(grid: RegionGrid, path: Optional[PathLike] = None) -> str:
    """
    Valid cells as CSV rows d,q,xi,value,violated sorted by (q, xi).
    An empty grid produces the header only.
    """
    text = region_csv(grid)
    _write(text, path)
    return text


def table_csv(rows: List[dict]) -> str:
    frame = table_frame(rows)
    out = pd.DataFrame(
        {
            column: frame[column].astype(str) if column in ("d", "status") else frame[column].map(format_float)
            for column in COLUMNS
        },
        columns=COLUMNS,
    )
    return _frame_to_csv(out)


def emit_table_csv(rows: List[dict], path: Optional[PathLike] = None) -> str:
    text = table_csv(rows)
    _write(text, path)
    return text
