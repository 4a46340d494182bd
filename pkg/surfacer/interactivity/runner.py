"""Session creation and execution module."""
import pathlib
import typing

from surfacer import definitions
from surfacer import interactivity
from surfacer import parsing
from surfacer.definitions import configurations
from surfacer.definitions import contexts


def load_context(arguments: typing.List[str] = None) -> "definitions.Context":
    """
    Create the execution context from the command line arguments.

    An explicitly given configuration path must exist. Without one, the
    `surfacer.yaml` file of the current directory is used when present and
    the built-in defaults otherwise.
    """
    args = parsing.create_parser().parse_args(arguments)
    if args.config_path:
        return definitions.Context.load_from_file(args, args.config_path)

    default = pathlib.Path(contexts.DEFAULT_FILENAME).absolute()
    if default.exists():
        return definitions.Context.load_from_file(args, default)

    return definitions.Context(
        arguments=args,
        configuration=configurations.Configuration(
            directory=pathlib.Path().absolute(),
            data={},
        ),
    )


def run_session(
    arguments: typing.List[str] = None,
    command_queue: typing.List[typing.Union[str, typing.List[str]]] = None,
) -> "interactivity.Session":
    """
    Execute the command named on the command line, or a queue of commands.

    The queue takes precedence, which lets a single configuration drive
    several commands in a row.
    """
    context = load_context(arguments)
    session = interactivity.Session(context)
    if command_queue:
        session.command_queue += command_queue
    elif command := getattr(context.arguments, "command", None):
        session.command_queue.append([command, *context.arguments.command_arguments])
    else:
        session.command_queue.append(["help"])
    return session.run()
