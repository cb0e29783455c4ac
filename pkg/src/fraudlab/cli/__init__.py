#!/usr/bin/env python
# coding utf-8
"""
The ``flab`` command line: one subcommand per pipeline stage.
"""

import logging

import click
import orjson

from fraudlab import __version__
from fraudlab.cli.settings import LabSettings
from fraudlab.core import LabError
from fraudlab.features.matrix import MATRIX_FORMAT_VERSION
from fraudlab.features.registry import FEATURE_REGISTRY_VERSION
from fraudlab.records import LOG_FORMAT_VERSION
from fraudlab.trees.model_file import MODEL_FORMAT_VERSION
from fraudlab.utils import TqdmLoggingHandler

settings = LabSettings()

EXIT_CODES = """\b
Exit codes:
  0  success
  1  internal error
  2  invalid command-line usage
  3  missing input file
  4  malformed input (CSV row, model file)
  5  invalid or infeasible configuration
  6  invalid data (single class, leaked app, manifest mismatch)
Failures print one JSON line {"error", "exit_code", "message"} to stderr."""


def error_line(name: str, exit_code: int, message: str) -> str:
    return orjson.dumps(
        {"error": name, "exit_code": exit_code, "message": message},
        option=orjson.OPT_SORT_KEYS,
    ).decode()


class LabGroup(click.Group):
    """A click group that turns lab errors into exit codes and a JSON error line."""

    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except (click.exceptions.ClickException, click.exceptions.Exit, click.exceptions.Abort):
            raise
        except LabError as exc:
            logging.getLogger("flab").debug("Command failed", exc_info=True)
            click.echo(error_line(exc.code, exc.exit_code, str(exc)), err=True)
            ctx.exit(exc.exit_code)
        except Exception as exc:
            logging.getLogger("flab").exception("Internal error")
            click.echo(error_line("internal_error", 1, f"{type(exc).__name__}: {exc}"), err=True)
            ctx.exit(1)


def print_version(ctx, param, value):
    if not value or ctx.resilient_parsing:
        return
    click.echo(f"fraudlab {__version__}")
    click.echo(f"event log format {LOG_FORMAT_VERSION}")
    click.echo(f"model file format {MODEL_FORMAT_VERSION}")
    click.echo(f"feature matrix format {MATRIX_FORMAT_VERSION}")
    click.echo(f"feature registry {FEATURE_REGISTRY_VERSION}")
    ctx.exit()


def setup_logging(verbosity: int):
    levels = [logging.WARNING, logging.INFO, logging.DEBUG]
    level = levels[min(len(levels) - 1, verbosity)]  # capped to number of levels
    root = logging.getLogger()
    # INFO reaches the run manifest even when the console is quieter
    root.setLevel(min(level, logging.INFO))
    for handler in [h for h in root.handlers if isinstance(h, TqdmLoggingHandler)]:
        root.removeHandler(handler)
    ch = TqdmLoggingHandler(level)
    formatter = logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    ch.setFormatter(formatter)
    root.addHandler(ch)


@click.group(cls=LabGroup, epilog=EXIT_CODES)
@click.option(
    "-v",
    "--verbose",
    "verbosity",
    count=True,
    help="Controls logging level per number of v's",
    default=settings.VERBOSITY,
)
@click.option(
    "-t",
    "--threads",
    "threads",
    help="Number of worker processes per stage. Outputs do not depend on it",
    default=settings.THREADS,
    type=click.IntRange(1),
)
@click.option("--no_bars", is_flag=True, default=settings.NO_BARS, help="Turns off progress bars")
@click.option(
    "--version",
    is_flag=True,
    expose_value=False,
    is_eager=True,
    callback=print_version,
    help="Show the package and file format versions and exit",
)
@click.pass_context
def cli(ctx, verbosity, threads, no_bars):
    """Download-fraud detection lab: simulate, label, featurize, train and evaluate."""
    setup_logging(verbosity)
    ctx.obj = {"threads": threads, "no_bars": no_bars}


from fraudlab.cli.commands import COMMANDS  # noqa: E402

for command in COMMANDS:
    cli.add_command(command)
