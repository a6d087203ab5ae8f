"""Shape summaries of sweep curves: peaks, unimodality and curve deviations."""
from typing import Any, Dict, Optional, Sequence

import numpy as np
import pandas as pd

from ..core.models import SweepRecord
from .writer import sweep_frame


def argmax_param(records: Sequence[SweepRecord], column: str) -> Optional[float]:
    """Grid parameter at which `column` peaks, ignoring failed points."""
    frame = sweep_frame(records).dropna(subset=[column])
    if frame.empty:
        return None
    values = pd.to_numeric(frame[column])
    return float(frame["param"].loc[values.idxmax()])


def is_unimodal(values: Sequence[float], tolerance: float = 1e-9) -> bool:
    """True if the sequence rises (weakly) to its maximum and falls (weakly) after it."""
    array = np.asarray(values, dtype=float)
    if array.size < 3:
        return True
    peak = int(np.argmax(array))
    steps = np.diff(array)
    return bool(np.all(steps[:peak] >= -tolerance) and np.all(steps[peak:] <= tolerance))


def max_abs_deviation(first: Sequence[Optional[float]],
                      second: Sequence[Optional[float]]) -> Optional[float]:
    """Largest |a - b| over points where both curves have a value."""
    if len(first) != len(second):
        raise ValueError("curves must have the same length")
    pairs = [(a, b) for a, b in zip(first, second) if a is not None and b is not None]
    if not pairs:
        return None
    return float(max(abs(a - b) for a, b in pairs))


def summarize_sweep(records: Sequence[SweepRecord]) -> Dict[str, Any]:
    """Peaks of each curve, shape of the total minus nn-sum gap and residual sign."""
    frame = sweep_frame(records).dropna(subset=["gqd_total", "nn_sum"])
    gap = (pd.to_numeric(frame["gqd_total"]) - pd.to_numeric(frame["nn_sum"])).tolist()
    residual = pd.to_numeric(frame["residual"])
    return {
        "argmax_gqd_total": argmax_param(records, "gqd_total"),
        "argmax_nn_sum": argmax_param(records, "nn_sum"),
        "argmax_residual": argmax_param(records, "residual"),
        "gap_unimodal": is_unimodal(gap),
        "min_gap": min(gap) if gap else None,
        "min_residual": float(residual.min()) if not residual.empty else None,
        "negative_residual_params": frame.loc[residual < 0, "param"].astype(float).tolist(),
        "failed_points": sum(1 for r in records if r.error),
    }
