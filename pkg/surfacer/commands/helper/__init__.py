"""
List the surfacer commands, or the full usage of one of them.

Without an argument every command is listed with the first paragraph of its
documentation, pipeline stages first in the order a reconstruction runs them.
Given a command name or alias, the arguments that command accepts are shown.
"""
import argparse
import io
import re
import typing

from surfacer import commands
from surfacer import interactivity
from surfacer import templating

HEADER_REGEX = re.compile(r"#+\s+")

#: Commands of a reconstruction in the order they consume each other's output.
PIPELINE = ("train", "render", "fuse", "extract-mesh", "eval")


def populate_subparser(parser: argparse.ArgumentParser):
    """Populate parser for this command."""
    parser.add_argument(
        "command",
        nargs="?",
        help="Command or alias to show the full usage of.",
    )


def _summary(name: str, docs: str) -> str:
    """Join the first paragraph of a command docstring, aliases prefixed."""
    lines = [
        line.rstrip()
        for line in (docs or "").split("\n")
        if not HEADER_REGEX.match(line)
    ]
    start_index = next((i for i, line in enumerate(lines) if line), 0)

    try:
        end_index = lines.index("", start_index) + 1
    except ValueError:
        end_index = len(lines) + 1

    aliases = ""
    if items := commands.REVERSED_ALIASES.get(name):
        aliases = "({}) ".format(", ".join(sorted(items)))

    return "{}{}".format(aliases, " ".join(lines[start_index:end_index]))


def _order(name: str) -> typing.Tuple[int, str]:
    """Sort pipeline stages by position and everything else by name after them."""
    if name in PIPELINE:
        return PIPELINE.index(name), name
    return len(PIPELINE), name


def _usage(name: str) -> str:
    """Render the argparse help of a single command."""
    parser = argparse.ArgumentParser(prog=f"surfacer {name}", add_help=False)
    commands.COMMANDS[name].populate_subparser(parser)
    buffer = io.StringIO()
    parser.print_help(file=buffer)
    return buffer.getvalue()


def run(ex: "interactivity.Execution") -> "interactivity.Execution":
    """Print the command listing or the usage of the requested command."""
    if requested := ex.args.get("command"):
        name = commands.ALIASES.get(requested, requested)
        if name not in commands.COMMANDS:
            return ex.finalize(
                status="FAILED",
                message=f'Unknown command "{requested}".',
                echo=True,
            )
        usage = _usage(name)
        print(usage)
        return ex.finalize(
            status="HELPED",
            message=f'Usage of "{name}" displayed.',
            data={"command": name, "usage": usage},
        )

    command_docs = {
        name: _summary(name, command_module.__doc__)
        for name, command_module in sorted(
            commands.COMMANDS.items(), key=lambda item: _order(item[0])
        )
        if command_module.__doc__
    }
    templating.printer(
        "commands/helper/help.jinja2",
        commands=list(command_docs.items()),
    )
    return ex.finalize(
        status="HELPED",
        message="Help displayed.",
        data={"commands": command_docs},
    )
