"""
Leggett Toolkit - Command Line
Reproducible experiments: Werner-model verification, threshold scan,
example classification and feasibility runs
"""

import argparse
import logging
import sys
from typing import List, NoReturn, Optional

import structlog
from pydantic import ValidationError

from .config import apply_tolerance_overrides, parse_tolerance_overrides, settings
from .errors import (
    CorrelationFormatError,
    InvalidArgumentError,
    LeggettToolkitError,
    NumericDomainError,
    OutOfRegimeError,
    PositivityViolationError,
    SignalingError,
)
from .harness import ExitCode, RunConfig, build_report, run_command, write_csv, write_report
from .solvers import GridMode


def configure_logging(level: Optional[str] = None):
    """Structured JSON logs on stderr; reports own stdout"""
    logging.basicConfig(format="%(message)s", stream=sys.stderr, level=level or settings.log_level, force=True)
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            structlog.processors.JSONRenderer(),
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=False,
    )


logger = structlog.get_logger()


class ToolkitArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with ExitCode.USAGE instead of argparse's 2 (taken by Undetermined)"""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(ExitCode.USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", metavar="PATH", help="Write the JSON report here instead of stdout")
    common.add_argument("--csv", metavar="PATH", help="Also write the CSV projection of the run")
    common.add_argument("--seed", type=int, default=settings.default_seed)
    common.add_argument("--tolerance", action="append", default=[], metavar="KEY=VAL",
                        help="Override one numeric tolerance for this run (repeatable)")
    common.add_argument("--lp-backend", choices=["simplex", "highs"], default=None)
    common.add_argument("--log-level", default=None, help="Level for the stderr log stream")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--grid-mode", choices=[m.value for m in GridMode], default=None)
    grid.add_argument("--grid-n", type=int, default=None, help="Fibonacci nodes (per factor in product mode)")
    grid.add_argument("--preset", default=None, help="Settings preset (hidden-variable candidates for feasibility)")

    parser = ToolkitArgumentParser(
        prog="leggett",
        description="Leggett crypto-nonlocality toolkit",
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    verify = commands.add_parser("verify-werner", parents=[common], help="Check the explicit Werner model")
    verify.add_argument("--V", type=float, required=True, help="Visibility")
    verify.add_argument("--n", type=int, default=100_000, help="Quadrature nodes")
    verify.add_argument("--trials", type=int, default=50, help="Random setting pairs")

    scan = commands.add_parser("threshold-scan", parents=[common], help="Locate the critical visibility")
    scan.add_argument("--resolution", type=int, default=1_000_000)

    examples = commands.add_parser("classify-examples", parents=[common, grid],
                                   help="Leggett vs Bell classification of the reference examples")
    examples.add_argument("--include-spread", action="store_true",
                          help="Add the high-visibility Werner row on the spread preset")

    feasibility = commands.add_parser("feasibility", parents=[common, grid],
                                      help="Leggett membership of a correlation file")
    feasibility.add_argument("--input", required=True, metavar="PATH")

    return parser


def _run_config(args: argparse.Namespace) -> RunConfig:
    fields = {
        key: value for key, value in vars(args).items()
        if key in RunConfig.model_fields and value is not None
    }
    return RunConfig(**fields)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    try:
        overrides = parse_tolerance_overrides(args.tolerance)
    except InvalidArgumentError as e:
        parser.error(str(e))

    saved_tolerances, saved_backend = settings.tolerances, settings.lp_backend
    try:
        apply_tolerance_overrides(overrides)
        if args.lp_backend:
            settings.lp_backend = args.lp_backend
        config = _run_config(args).model_copy(update={
            "tolerance_overrides": overrides,
            "lp_backend": settings.lp_backend,
        })

        logger.info("Run started", command=config.command, config_hash=config.config_hash())
        result = run_command(config)
        write_report(build_report(config, result.body), config.output)
        if config.csv and result.csv_header:
            write_csv(config.csv, result.csv_header, result.csv_rows)
        logger.info("Run finished", command=config.command, exit_code=int(result.exit_code))
        return int(result.exit_code)

    except OutOfRegimeError as e:
        logger.error("Visibility out of regime", error=str(e), visibility=e.visibility, bound=e.bound)
        print(f"error: {e}", file=sys.stderr)
        return int(ExitCode.OUT_OF_REGIME)
    except (SignalingError, PositivityViolationError) as e:
        logger.error("Invalid correlation", error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return int(ExitCode.INVALID_CORRELATION)
    except (CorrelationFormatError, OSError) as e:
        logger.error("Input/output failure", error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return int(ExitCode.IO_ERROR)
    except (InvalidArgumentError, NumericDomainError, ValidationError) as e:
        logger.error("Invalid argument", error=str(e))
        print(f"error: {e}", file=sys.stderr)
        return int(ExitCode.INVALID_ARGUMENT)
    except LeggettToolkitError as e:
        logger.error("Run failed", error=str(e), exc_info=True)
        print(f"error: {e}", file=sys.stderr)
        return int(ExitCode.INVALID_ARGUMENT)
    finally:
        settings.tolerances, settings.lp_backend = saved_tolerances, saved_backend


if __name__ == "__main__":
    sys.exit(main())
