"""Commands subpackage for surfacer command invocations."""
from collections import defaultdict as _defaultdict

from ..commands import configer
from ..commands import evaluator
from ..commands import extractor
from ..commands import fuser
from ..commands import helper
from ..commands import painter
from ..commands import selftester
from ..commands import trainer

#: Commands available from the command line.
COMMANDS = {
    "configs": configer,
    "eval": evaluator,
    "extract-mesh": extractor,
    "fuse": fuser,
    "help": helper,
    "render": painter,
    "selftest": selftester,
    "train": trainer,
}

#: Aliases of commands to make available from the command line.
ALIASES = {
    "?": "help",
}


def _invert_aliases():
    """Reverse the alias dictionary to be a lookup from command to aliases."""
    out = _defaultdict(list)
    for alias, name in ALIASES.items():
        out[name].append(alias)
    return out


#: List of aliases assigned to commands for documentation purposes.
REVERSED_ALIASES = _invert_aliases()


def get_module(command: str):
    """Retrieve the command module for the associated command."""
    return COMMANDS.get(ALIASES.get(command, command), None)
