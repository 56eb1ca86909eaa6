import argparse
import logging
import sys
from typing import List, Optional

from dotenv import load_dotenv

from app import config
from app.commands import classify, sweep, verify
from app.errors import OracleBudgetError

load_dotenv()

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="knot-toolkit",
        description="Exact p-local lattice computations for X(k̃) over CM-fields",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    classify.register(subparsers)
    sweep.register(subparsers)
    verify.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=config.log_level(), stream=sys.stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    try:
        return args.handler(args)
    except (ValueError, OracleBudgetError) as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
