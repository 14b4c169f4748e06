"""
Report writer
Self-describing JSON reports with optional CSV projections
"""

import csv
import json
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Sequence

import numpy as np
import structlog

from ..config import FORMAT_VERSION
from .config import RunConfig

logger = structlog.get_logger(__name__)


def _to_jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    return str(value)


def build_report(config: RunConfig, body: Dict[str, Any]) -> Dict[str, Any]:
    """Wrap a command result; generated_at is the only field that changes between identical runs"""
    return {
        "format_version": FORMAT_VERSION,
        "command": config.command,
        "config": config.resolved(),
        "config_hash": config.config_hash(),
        "generated_at": datetime.now(timezone.utc).isoformat(),
        "result": body,
    }


def render_report(report: Dict[str, Any]) -> str:
    return json.dumps(report, sort_keys=True, indent=2, default=_to_jsonable) + "\n"


def write_report(report: Dict[str, Any], path: Optional[str] = None) -> None:
    """Write to path, or to stdout when no path is given"""
    text = render_report(report)
    if path is None:
        sys.stdout.write(text)
        return
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
    logger.info("Report written", path=str(target), command=report.get("command"))


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with open(target, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    logger.info("CSV written", path=str(target))
