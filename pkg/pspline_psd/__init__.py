"""
Bayesian P-spline spectral density estimation with Q-spaced knots.

:copyright: (c) 2025-2026 by Meir Miyara.
:license: MPL-2.0, see LICENSE for more details.
"""

from __future__ import annotations

import logging
import os
from importlib.metadata import PackageNotFoundError, version
from typing import Sequence

try:
    __version__ = version("pspline-psd")
except PackageNotFoundError:
    __version__ = "0.0.0"


async def main(argv: Sequence[str] | None = None) -> int:
    """Async entry point: configure logging, then hand the parsed command to `cli.dispatch`."""
    from pspline_psd.cli import build_parser, dispatch
    from pspline_psd.const import LOG_FORMAT, LOG_LEVEL_ENV

    args = build_parser().parse_args(argv)

    level = "DEBUG" if args.debug else os.getenv(LOG_LEVEL_ENV, "INFO").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.INFO),
        format=LOG_FORMAT,
        force=True,
    )

    _LOG = logging.getLogger(__name__)
    _LOG.debug("Starting pspline-psd v%s: %s", __version__, args.subcommand)
    return await dispatch(args)
