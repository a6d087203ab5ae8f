"""CSV and JSON writers for command results."""
import json
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd
import structlog

from ..core.exceptions import ExportError
from ..core.models import SweepRecord
from .serializer import sanitize


logger = structlog.get_logger(__name__)

CSV_FLOAT_FORMAT = "%.12g"


def sweep_frame(records: Sequence[SweepRecord]) -> pd.DataFrame:
    """One row per record, in the fixed CSV column order."""
    return pd.DataFrame([r.csv_row() for r in records], columns=list(SweepRecord.CSV_COLUMNS))


def write_csv(records: Sequence[SweepRecord], path: Optional[Path] = None) -> None:
    """Write sweep rows as UTF-8 CSV with 12 significant digits; empty cells for nulls."""
    frame = sweep_frame(records)
    options = dict(index=False, float_format=CSV_FLOAT_FORMAT, lineterminator="\n", na_rep="")
    if path is None:
        frame.to_csv(sys.stdout, **options)
        return
    try:
        frame.to_csv(path, encoding="utf-8", **options)
    except OSError as e:
        raise ExportError(f"Cannot write {path}: {e}")
    logger.debug("CSV written", path=str(path), rows=len(frame))


def write_json(payload: Dict[str, Any], path: Optional[Path] = None) -> List[str]:
    """Write one JSON object with `generated_at` and `warnings`; return the warnings."""
    clean, warnings = sanitize(payload)
    warnings = list(clean.pop("warnings", None) or []) + warnings
    clean["generated_at"] = datetime.now(timezone.utc).isoformat()
    clean["warnings"] = warnings
    text = json.dumps(clean, indent=2, allow_nan=False) + "\n"
    if path is None:
        sys.stdout.write(text)
        return warnings
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise ExportError(f"Cannot write {path}: {e}")
    logger.debug("JSON written", path=str(path), warnings=len(warnings))
    return warnings
