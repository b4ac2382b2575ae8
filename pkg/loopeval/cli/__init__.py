"""Entry point for the command-line program"""

import logging
import sys

from ..analysis import SingularMatrixError, UnreachableError
from ..bounds import PreconditionViolation
from ..experiments import ExperimentError
from ..mrp import DiscountError, MRPError
from .commands import COMMANDS, add_common_options
from .config import ConfigError, get_config
from .error import EXIT_FAILED, EXIT_OK, EXIT_USAGE, CommandParser, UsageError, ValidationFailed

_logger = logging.getLogger(__name__)

_handler = None


def _global_parser():
    lines = ["%prog [--debug|--verbose] [--config PATH] <command> [options]", "", "commands:"]
    lines.extend("  {0:<11} {1}".format(c.name, c.summary) for c in COMMANDS.values())
    p = CommandParser(prog="loopeval", usage="\n".join(lines))
    p.disable_interspersed_args()
    add_common_options(p)
    return p


def _setup_logging(debug, verbose):
    global _handler
    logger = logging.getLogger()
    if _handler is not None:
        logger.removeHandler(_handler)
    _handler = logging.StreamHandler()
    _handler.setFormatter(logging.Formatter("%(levelname)s:%(name)s:%(message)s"))
    logger.addHandler(_handler)
    if debug:
        logger.setLevel(logging.DEBUG)
    elif verbose:
        logger.setLevel(logging.INFO)
    else:
        logger.setLevel(logging.ERROR)


def _fail(code, message, synopsis=None):
    sys.stderr.write("loopeval: error: {0}\n".format(message))
    if synopsis:
        sys.stderr.write("{0}\n".format(synopsis))
    return code


def run(argv):
    """Run one command; ``argv`` holds the arguments after the program name"""
    out = sys.stdout
    try:
        gparser = _global_parser()
        (goptions, rest) = gparser.parse_args(list(argv))
        if not rest:
            raise UsageError("no command given", gparser.get_usage().strip())
        command = COMMANDS.get(rest[0])
        if command is None:
            raise UsageError("unknown command {0!r}".format(rest[0]), gparser.get_usage().strip())

        parser = command.parser()
        (options, args) = parser.parse_args(rest[1:])
        _setup_logging(
            goptions.debug or options.debug, goptions.verbose or options.verbose
        )
        config = get_config()
        config.load(options.config or goptions.config)
        return command.func(parser, options, args, config, out)

    except SystemExit as e:
        # --help
        return e.code or EXIT_OK
    except (UsageError, ConfigError) as e:
        return _fail(EXIT_USAGE, e, getattr(e, "synopsis", None))
    except DiscountError as e:
        return _fail(EXIT_USAGE, e)
    except ValidationFailed as e:
        for v in e.violations:
            out.write("invalid: {0}\n".format(v))
        return EXIT_FAILED
    except (
        UnreachableError,
        SingularMatrixError,
        PreconditionViolation,
        ExperimentError,
        MRPError,
    ) as e:
        _logger.error("%s", e)
        return EXIT_FAILED


def main(argv=None):
    return run(sys.argv[1:] if argv is None else argv)
