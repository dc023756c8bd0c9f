import argparse
import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from commands import barcode, jordan, lu, morse
from errors import EngineError, UsageError
from schemas import RunConfig


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; usage errors here exit with 1."""

    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="persistence-engine",
                     description="Exact persistent homology over GF(p) with Morse reduction")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG")
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    barcode.register(subparsers)
    lu.register(subparsers)
    morse.register(subparsers)
    jordan.register(subparsers)
    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity == 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = vars(build_parser().parse_args(argv))
        _configure_logging(args.pop("verbose"))
        handler = args.pop("handler")
        config = RunConfig(**{k: v for k, v in args.items() if v is not None})
        return handler(config)
    except ValidationError as exc:
        print(f"error: {exc.errors()[0]['msg'].removeprefix('Value error, ')}", file=sys.stderr)
        return 1
    except EngineError as exc:
        print(f"error: {exc.detail}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
