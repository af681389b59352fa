"""
Run orchestration for qdstack.

This module provides the run configuration and the command-line entry point.

Modules:
    config: RunConfig schema, loader and logging setup
    cli: argparse surface, run(argv) and main()
"""

from qdstack.orchestration.cli import build_parser, main, run
from qdstack.orchestration.config import RunConfig, configure_logging

__all__ = [
    "RunConfig",
    "build_parser",
    "configure_logging",
    "main",
    "run",
]
