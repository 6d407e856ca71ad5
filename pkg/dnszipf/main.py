import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from . import __version__
from .commands import EXIT_DATA, EXIT_USAGE, analyze, detect, report, simulate, train
from .config import settings
from .exceptions import DnsZipfError, UsageError

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dnszipf",
        description="Detect DNS tunnels from the character-frequency profile of queried names",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG logs")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in (train, analyze, detect, report, simulate):
        command.register(subparsers)
    return parser


def configure_logging(verbosity: int = 0) -> None:
    level = settings.effective_log_level
    if verbosity:
        level = "DEBUG" if verbosity > 1 else "INFO"
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    configure_logging(args.verbose)
    try:
        return args.handler(args)
    except (UsageError, ValidationError) as e:
        logger.debug(f"{args.command} rejected its arguments", exc_info=True)
        print(f"dnszipf {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DnsZipfError, OSError) as e:
        logger.debug(f"{args.command} failed on its input", exc_info=True)
        print(f"dnszipf {args.command}: error: {e}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
