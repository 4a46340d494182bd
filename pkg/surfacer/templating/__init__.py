"""
Console output of surfacer commands.

Every command reports through a jinja2 template stored next to its module,
addressed by its path relative to the surfacer package. The filters below
cover the coloring and layout those templates share.
"""
import pathlib
import re
import textwrap
import traceback
import typing

import colorama
import yaml
from jinja2 import Environment

import surfacer

_COLOR_MAP = {
    "green": colorama.Fore.GREEN,
    "red": colorama.Fore.RED,
    "error": colorama.Fore.RED,
    "cyan": colorama.Fore.CYAN,
    "magenta": colorama.Fore.MAGENTA,
    "yellow": colorama.Fore.YELLOW,
    "warning": colorama.Fore.YELLOW,
}

#: Statuses rendered in red by the execution result template.
FAILURE_STATUSES = ("FAILED", "ERROR", "ABORTED")


def _yaml_filter(value: dict, indent: int = 0) -> str:
    """Dump result info as block yaml in insertion order."""
    if not value:
        return ""

    return textwrap.indent(yaml.safe_dump(value, sort_keys=False), prefix=indent * " ")


def _single_line_filter(value: str) -> str:
    """Collapse docstrings and messages onto one line."""
    regex = re.compile(r"\s{2,}")
    return regex.sub(" ", (value or "").replace("\n", " ")).strip()


def _colorize_filter(value: str, color: str = None) -> str:
    """Wrap the value in an ansi color; unknown colors leave it plain."""
    if color_value := _COLOR_MAP.get((color or "").lower()):
        return f'{color_value}{value or ""}{colorama.Style.RESET_ALL}'
    return value


def _status_color_filter(status: str) -> str:
    """Red for failure statuses, green for everything else."""
    return "red" if (status or "").upper() in FAILURE_STATUSES else "green"


def _verdict_filter(passed: bool) -> str:
    """Colored PASS or FAIL label of an audit outcome."""
    if passed:
        return _colorize_filter("PASS", "green")
    return _colorize_filter("FAIL", "red")


_environment = Environment()
_environment.filters["yaml"] = _yaml_filter
_environment.filters["single_line"] = _single_line_filter
_environment.filters["colorize"] = _colorize_filter
_environment.filters["status_color"] = _status_color_filter
_environment.filters["verdict"] = _verdict_filter


def render(location: str, **kwargs) -> str:
    """Render the template at a path relative to the surfacer package."""
    contents = (
        pathlib.Path(surfacer.__file__)
        .parent.joinpath(*location.strip("/").split("/"))
        .read_text()
    )
    return _environment.from_string(contents).render(**kwargs)


def printer(location: str, **kwargs):
    """Render a template and write it to stdout."""
    print(render(location, **kwargs))


def print_error(message: str, error: Exception = None):
    """
    Print an [ERROR] line for a failed command.

    The traceback of error follows the message when one is given.
    """
    stack_trace: typing.Optional[str] = None
    if error:
        stack_trace = "".join(
            traceback.format_exception(type(error), error, error.__traceback__)
        )
    printer(
        "templating/error.jinja2",
        message=message,
        stack_trace=stack_trace,
    )
