import argparse
import json
import logging
import re
import sys
from typing import List, Optional

from src.config import Config
from src.core.errors import UsageError
from src.handlers.command_handler import EXIT_USAGE, CommandHandler
from src.utils.schemas import RunConfig

logging.basicConfig(level=getattr(logging, Config.LOG_LEVEL.upper(), logging.WARNING),
                    format="%(asctime)s %(name)s %(levelname)s %(message)s")
logger = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # rational literals such as -1/2 are positional values, not options
        self._negative_number_matcher = re.compile(r"^-\d+(/\d+)?$")

    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="opencore", description="Order, codes and interiors over the rationals with A")
    parser.add_argument("--format", dest="output_format", choices=["text", "structured"], default=Config.OUTPUT_FORMAT)
    parser.add_argument("--seed", type=int, default=Config.CORPUS_SEED)
    parser.add_argument("--depth", type=int, default=Config.CERTIFICATE_DEPTH)
    parser.add_argument("--anchors", type=int, default=Config.ANCHOR_LIMIT)
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    qe = commands.add_parser("qe", help="eliminate quantifiers of a pure-order or weak monadic formula")
    qe.add_argument("formula")
    qe.add_argument("--language", choices=["order", "wmso"], default="order")

    for name, help_text in [("rnf", "normal form on every sign stratum"),
                            ("omin", "openness report of a unary formula")]:
        commands.add_parser(name, help=help_text).add_argument("formula")

    cells = commands.add_parser("cells", help="complete order cells on which a formula holds")
    cells.add_argument("formula")
    cells.add_argument("--vars", dest="variables")

    for name in ("rho", "fiber"):
        commands.add_parser(name, help=f"{name} of a rational").add_argument("value")

    commands.add_parser("witness", help="code with more than N fiber elements").add_argument("bound", type=int)

    evaluate = commands.add_parser("eval", help="truth of a formula at a point")
    evaluate.add_argument("formula")
    evaluate.add_argument("assignments", nargs="*", help="name=value, values are rationals or {..} sets")
    evaluate.add_argument("--language", choices=["order-A", "wmso"], default="order-A")

    interior = commands.add_parser("interior", help="pure-order formula for the interior")
    interior.add_argument("formula")
    interior.add_argument("--method", choices=["cells", "qe"], default="cells")

    nonelem = commands.add_parser("nonelem", help="closed discrete fibers of unbounded size")
    nonelem.add_argument("bound", type=int)
    nonelem.add_argument("--table", action="store_true")

    selftest = commands.add_parser("selftest", help="run the acceptance checks")
    selftest.add_argument("--scale", type=float, default=1.0)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = vars(build_parser().parse_args(argv))
        config = RunConfig(anchor_limit=args.pop("anchors"), seed=args.pop("seed"),
                           depth=args.pop("depth"), output_format=args.pop("output_format"))
    except UsageError as e:
        print(f"❌ usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        print(f"❌ invalid option: {e}", file=sys.stderr)
        return EXIT_USAGE
    command = args.pop("command")
    outcome = CommandHandler(config).run(command, args)
    if config.output_format == "structured":
        print(json.dumps(outcome.record.model_dump(mode="json"), ensure_ascii=False, sort_keys=True))
    else:
        print(outcome.text)
    return outcome.status


if __name__ == "__main__":
    sys.exit(main())
