"""
Harness module exports
"""

from .commands import (
    COMMANDS,
    CommandResult,
    Example,
    ExitCode,
    classification_examples,
    cmd_classify_examples,
    cmd_feasibility,
    cmd_threshold_scan,
    cmd_verify_werner,
    exit_code_for,
    run_command,
)
from .config import RunConfig
from .reports import build_report, render_report, write_csv, write_report

__all__ = [
    "COMMANDS",
    "CommandResult",
    "Example",
    "ExitCode",
    "RunConfig",
    "build_report",
    "classification_examples",
    "cmd_classify_examples",
    "cmd_feasibility",
    "cmd_threshold_scan",
    "cmd_verify_werner",
    "exit_code_for",
    "render_report",
    "run_command",
    "write_csv",
    "write_report",
]
