# srtmkit/main.py
from dotenv import load_dotenv
load_dotenv()

import logging
import sys
from typing import List, Optional

import click

from config import Config
from srtmkit.api.commands import cli
from srtmkit.errors import SrtmError, UsageProblem

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3


def configure_logging(level: str = Config.LOG_LEVEL) -> None:
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, level, logging.WARNING),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def dispatch(argv: Optional[List[str]] = None) -> int:
    """Run one command; results go to stdout, diagnostics to stderr."""
    configure_logging()
    try:
        result = cli.main(args=argv, prog_name="srtmkit", standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.exceptions.Abort:
        click.echo("aborted", err=True)
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return EXIT_USAGE
    except UsageProblem as e:
        click.echo(f"error: {type(e).__name__}: {e}", err=True)
        return EXIT_USAGE
    except SrtmError as e:
        click.echo(f"error: {type(e).__name__}: {e}", err=True)
        return EXIT_DOMAIN
    except RecursionError:
        logger.exception("nesting too deep")
        return EXIT_DOMAIN
    return result if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(dispatch())
