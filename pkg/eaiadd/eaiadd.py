# -*- coding: utf-8 -*-
""" EAI-ADD command line tool: synthetic data, training, evaluation,
inconsistency analysis and gradient checking for the emotion-acoustic
inconsistency detector.
"""

import sys

import click

from ._version import __version__
from .classes import (ConfigError, FormatError, ValidationError,
                      eaiadd_internal_object)
from .helper_funcs import load_config
from .report_commands import report_commands
from .synth_commands import synth_commands
from .train_commands import train_commands

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_IO = 2


# Main Click Entry Point
@click.group()
@click.version_option(version=__version__)
@click.option('-c', '--config-file', 'config_file', default=None,
              type=click.File('r'),
              help="YAML file with per-command option defaults.")
@click.option('-d', '--debug', 'debug', default=False, is_flag=True,
              help="Print tracebacks for unexpected errors.")
@click.pass_context
def cli(ctx, config_file, debug):
    """\
Emotion-acoustic inconsistency audio deepfake detection.
Generate synthetic feature sets, train the detector, score it (EER and
optionally min t-DCF), analyse emotion/acoustic change correlation and
check every gradient against finite differences.
    """
    config = load_config(config_file) if config_file is not None else {}
    ctx.default_map = config
    ctx.ensure_object(eaiadd_internal_object).debug = debug


# Add Click Sub Commands
cli.add_command(synth_commands.synth)
cli.add_command(train_commands.train)
cli.add_command(train_commands.gradcheck)
cli.add_command(report_commands.evaluate)
cli.add_command(report_commands.analyze)


def run(argv=None):
    """Run the command line with ``argv`` and return the exit code:
    0 success, 1 validation / usage error, 2 I/O or file format error."""
    obj = eaiadd_internal_object()
    try:
        rv = cli.main(args=argv, prog_name="eaiadd", standalone_mode=False,
                      obj=obj)
    except click.FileError as e:
        e.show()
        return EXIT_IO
    except click.ClickException as e:
        e.show()
        return EXIT_VALIDATION
    except click.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_VALIDATION
    except ConfigError as e:
        for err in e.errors:
            click.echo(err, err=True)
        click.echo("Config Errors", err=True)
        return EXIT_VALIDATION
    except ValidationError as e:
        click.echo("Error: %s" % e, err=True)
        return EXIT_VALIDATION
    except FormatError as e:
        click.echo("Error: %s" % e, err=True)
        return EXIT_IO
    except OSError as e:
        click.echo("Error: %s" % e, err=True)
        return EXIT_IO
    except Exception as e:
        if obj.debug:
            from traceback import format_exc
            click.echo(format_exc(), err=True)
        else:
            click.echo(e, err=True)
        click.echo("Unexpected Errors %s"
                   % ("" if obj.debug else "(pass -d/--debug for traceback)"),
                   err=True)
        return EXIT_VALIDATION
    return rv if isinstance(rv, int) else EXIT_OK


def main():
    sys.exit(run(sys.argv[1:]))
