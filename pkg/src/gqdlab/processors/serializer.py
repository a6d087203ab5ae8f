"""JSON-safe conversion of result payloads."""
import math
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, List, Tuple

import numpy as np
from pydantic import BaseModel


def sanitize(value: Any, path: str = "$") -> Tuple[Any, List[str]]:
    """Return a JSON-ready copy of `value` and a warning for every NaN/Inf replaced by null."""
    warnings: List[str] = []
    clean = _sanitize(value, path, warnings)
    return clean, warnings


def _sanitize(value: Any, path: str, warnings: List[str]) -> Any:
    if isinstance(value, BaseModel):
        value = value.model_dump(mode="python")
    if isinstance(value, dict):
        return {str(k): _sanitize(v, f"{path}.{k}", warnings) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_sanitize(v, f"{path}[{i}]", warnings) for i, v in enumerate(value)]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        number = float(value)
        if not math.isfinite(number):
            warnings.append(f"non-finite value {number} at {path} replaced by null")
            return None
        return number
    if isinstance(value, (datetime, Path)):
        return value.isoformat() if isinstance(value, datetime) else str(value)
    return value
