"""Command-line entry point."""

import logging
import sys

import structlog

from src.cli.router import cli
from src.config import get_settings

settings = get_settings()

# Reports own stdout, so logs go to stderr
logging.basicConfig(
    stream=sys.stderr,
    format="%(message)s",
    level=getattr(logging, settings.log_level.upper(), logging.WARNING),
)

# Configure structured logging
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
    wrapper_class=structlog.stdlib.BoundLogger,
    context_class=dict,
    logger_factory=structlog.stdlib.LoggerFactory(),
    cache_logger_on_first_use=True,
)

logger = structlog.get_logger()


def main() -> None:
    """Run the reflattice command line."""
    logger.debug("Starting reflattice", version=settings.app_version, argv=sys.argv[1:])
    cli(prog_name="reflattice")


if __name__ == "__main__":
    main()
