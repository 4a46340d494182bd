"""Surfacer command-line interface."""
import os
import sys
import typing

from surfacer import interactivity
from surfacer import templating


def main(arguments: typing.List[str] = None) -> bool:
    """
    Execute the command given by the command line arguments.

    :return:
        Whether every requested artifact was written without error.
    """
    print(f"\n[DIRECTORY]: {os.path.realpath(os.curdir)}")
    try:
        session = interactivity.run_session(arguments)
    except SystemExit as exit_request:
        return not exit_request.code
    except FileNotFoundError as error:
        templating.print_error(str(error))
        return False
    return session.succeeded


def main_cli() -> None:  # pragma: no cover
    """Execute entrypoint for the installed console script."""
    sys.exit(0 if main() else 1)


if __name__ == "__main__":  # pragma: no cover
    main_cli()
