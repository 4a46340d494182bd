"""
Display the configuration merged from its source file and built-in defaults.

Use this to inspect and validate that a configuration file is read as
expected before starting a long training run.
"""
import argparse

import yaml

from surfacer import interactivity


def populate_subparser(parser: argparse.ArgumentParser):
    """Populate parser for this command."""
    parser.add_argument(
        "--section",
        help="Display only this section of the configuration, e.g. prior.",
    )


def run(ex: "interactivity.Execution") -> "interactivity.Execution":
    """Execute a display of the loaded configuration."""
    serialized = ex.context.configuration.serialize()
    if section := ex.args.get("section"):
        if section not in serialized:
            return ex.finalize(
                status="FAILED",
                message=f'Unknown configuration section "{section}".',
                echo=True,
            )
        serialized = {section: serialized[section]}

    print(yaml.safe_dump(serialized, sort_keys=False))
    return ex.finalize(
        status="SUCCESS",
        message="Configuration displayed.",
        data={"configuration": serialized},
    )
