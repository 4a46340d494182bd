"""Session data structures and command execution module."""
import argparse
import dataclasses
import datetime
import shlex
import typing

from surfacer import commands
from surfacer import definitions
from surfacer import templating


@dataclasses.dataclass(frozen=True)
class ExecutionResult:
    """Data structure for command execution responses."""

    status: str
    message: str
    info: typing.Optional[dict] = None
    data: typing.Optional[dict] = None


@dataclasses.dataclass(frozen=True)
class Execution:
    """Data structure for a command execution."""

    action: str
    args: dict
    session: "Session"
    result: typing.Optional["ExecutionResult"] = None

    executed_at: datetime.datetime = dataclasses.field(
        init=False,
        default_factory=lambda: datetime.datetime.utcnow(),
    )

    @property
    def timestamp(self) -> str:
        """Get a string representation of the created at datetime."""
        return self.executed_at.strftime("%Y-%m-%dT%H:%M:%S.000Z")

    @property
    def context(self) -> "definitions.Context":
        """Get the session context with the run flags of this command applied."""
        return self.session.context.with_overrides(self.args)

    @property
    def succeeded(self) -> bool:
        """Get whether the execution finished with a non-failure status."""
        return (
            self.result is not None
            and self.result.status not in templating.FAILURE_STATUSES
        )

    def finalize(
        self,
        status: str,
        message: str = None,
        info: dict = None,
        data: dict = None,
        echo: bool = False,
    ) -> "Execution":
        """Copy this execution and populate it with the result."""
        return dataclasses.replace(
            self,
            result=ExecutionResult(
                status=(status or "???").upper(),
                message=message or "???",
                info=info,
                data=data,
            ),
        ).echo_if(echo)

    def echo(self) -> "Execution":
        """Echo the result if set for display to the console."""
        if self.result:
            templating.printer(
                "interactivity/execution_result.jinja2",
                result=self.result,
            )
        return self

    def echo_if(self, condition) -> "Execution":
        """Echo the result if set for display to the console."""
        if bool(condition):
            return self.echo()
        return self


class Session:
    """
    Queued command runner around one execution context.

    Commands are executed in order until the queue empties or a command
    fails, in which case the remaining commands are dropped.
    """

    def __init__(self, context: "definitions.Context"):
        """Create a new session for queued execution."""
        self.context = context
        self.command_queue: typing.List[typing.Union[str, typing.List[str]]] = []
        self.execution_history: typing.List["Execution"] = []
        #: Stores uncaught exceptions for reference when a command fails.
        self.error: typing.Optional[Exception] = None
        self.failed = False

    @property
    def succeeded(self) -> bool:
        """Get whether every executed command finished without failure."""
        return not self.failed and self.error is None

    def run(self) -> "Session":
        """Execute the queued commands in order."""
        while self.command_queue and not self.failed:
            line = self.command_queue.pop(0)
            self.failed = not execute(self, line)
        self.command_queue = []
        return self


def execute(session: "Session", line: typing.Union[str, typing.List[str]]) -> bool:
    """
    Execute the specified command within the given session.

    :return:
        Whether the command was parsed, executed without error and finished
        with a non-failure status.
    """
    try:
        raw_args = shlex.split(line) if isinstance(line, str) else list(line)
        action = raw_args[0]
        raw_args = raw_args[1:]
    except Exception as error:
        session.error = error
        templating.print_error(
            error=error,
            message=f'An error occurred parsing "{line}".',
        )
        return False

    action_module = commands.get_module(action)
    if action_module is None:
        templating.print_error(f'Unknown command "{action}".')
        return False

    try:
        try:
            parser = argparse.ArgumentParser(prog=f"surfacer {action}")
            action_module.populate_subparser(parser)
            args = vars(parser.parse_args(raw_args))
        except SystemExit as exit_request:
            # Help requests exit cleanly; usage errors do not.
            if exit_request.code:
                session.error = definitions.CommandUsageError(action, raw_args)
            return not exit_request.code

        execution = action_module.run(Execution(action, args, session))
        session.execution_history.append(execution)
        return execution.succeeded
    except FileNotFoundError as error:
        session.error = error
        templating.print_error(f"Missing file: {error.filename or error}")
        return False
    except Exception as error:
        session.error = error
        templating.print_error(
            error=error,
            message="An unexpected command error occurred.",
        )
        return False
