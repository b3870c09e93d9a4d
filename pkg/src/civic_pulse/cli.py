"""Command line entry point.

    civic-pulse [run] {ingest,score,topics,spatiotemporal,stats,report,all} --config PATH
                [--threads N] [--out DIR]

Exit status: 0 success, 1 usage or config validation error, 2 runtime error.
Log level comes from CIVIC_PULSE_LOG (error, warn, info, debug; default warn).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .pipeline import STAGES, Pipeline

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2

_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "warning": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="civic-pulse", description="Social-media traffic sentiment pipeline.")
    p.add_argument("stage", choices=STAGES + ("all",), help="stage to run ('all' runs every stage in order)")
    p.add_argument("--config", required=True, type=Path, help="pipeline config (JSON)")
    p.add_argument("--threads", type=int, default=1, help="worker cap for parallel stages")
    p.add_argument("--out", type=Path, default=None, help="output directory (overrides the config)")
    return p


def _setup_logging() -> None:
    level = _LEVELS.get(os.environ.get("CIVIC_PULSE_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv[:1] == ["run"]:
        argv = argv[1:]
    _setup_logging()
    try:
        args = build_parser().parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    if args.threads < 1:
        print("civic-pulse: error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INVALID

    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print("civic-pulse: invalid config:", file=sys.stderr)
        for problem in exc.problems:
            print(f"  - {problem}", file=sys.stderr)
        return EXIT_INVALID

    try:
        Pipeline(config, args.out, args.threads).run(args.stage)
    except Exception as exc:  # every runtime failure maps to one exit code
        logging.getLogger("civic_pulse").debug("stage failure", exc_info=True)
        print(f"civic-pulse: {args.stage}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
