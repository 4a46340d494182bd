"""Command execution subpackage."""
from surfacer.interactivity.sessions import Execution  # noqa: F401
from surfacer.interactivity.sessions import ExecutionResult  # noqa: F401
from surfacer.interactivity.sessions import Session  # noqa: F401
from surfacer.interactivity.sessions import execute  # noqa: F401
from surfacer.interactivity.runner import load_context  # noqa: F401
from surfacer.interactivity.runner import run_session  # noqa: F401
