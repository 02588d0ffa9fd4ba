"""
CSV and JSON writers for trajectories, ensembles, sweeps and reports.
"""
from typing import Any, Dict, Mapping
from pathlib import Path
import json
import logging
import math

import pandas as pd

from app.core.trajectory import Trajectory

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def output_path(prefix: str, suffix: str) -> Path:
    """``<prefix>_<suffix>``, creating the parent directory if needed."""
    path = Path(f"{prefix}_{suffix}")
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_frame(frame: pd.DataFrame, path: str | Path) -> Path:
    """Write a frame as CSV with full float precision."""
    path = Path(path)
    try:
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.info(f"Wrote {len(frame)} rows to {path}")
        return path
    except Exception as e:
        logger.error(f"Error writing CSV {path}: {e}")
        raise


def write_trajectory(trajectory: Trajectory, path: str | Path) -> Path:
    return write_frame(trajectory.to_frame(), path)


def _jsonable(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if hasattr(value, "item"):
        return value.item()
    return value


def write_report(document: Mapping[str, Any], path: str | Path) -> Path:
    """Write a flat key-value document as JSON (non-finite floats become null)."""
    path = Path(path)
    payload: Dict[str, Any] = {key: _jsonable(value) for key, value in document.items()}
    try:
        path.write_text(json.dumps(payload, indent=2) + "\n")
        logger.info(f"Wrote report to {path}")
        return path
    except Exception as e:
        logger.error(f"Error writing report {path}: {e}")
        raise


def run_summary(trajectory: Trajectory) -> Dict[str, Any]:
    """Scalar metadata of a run, prefixed for inclusion in the report."""
    summary: Dict[str, Any] = {"engine": trajectory.engine.value, "samples": len(trajectory)}
    final = trajectory.final_state()
    summary.update({"final_y_s": final.y_s, "final_y_i": final.y_i, "final_y_q": final.y_q})
    for key, value in trajectory.metadata.items():
        if value is None or isinstance(value, (int, float, str, bool)):
            summary[f"run_{key}"] = value
    if trajectory.severe is not None:
        tail = trajectory.severe[int(len(trajectory.severe) * 0.75):]
        summary["empirical_xi_tail"] = float(tail.mean())
    return summary
