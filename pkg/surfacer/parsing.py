"""Parse command line arguments module."""
import argparse

import surfacer


def populate_run_arguments(parser: argparse.ArgumentParser):
    """
    Add the flags controlling seeding and parallelism to the parser.

    They are accepted globally and by the commands that render or train, in
    which case the command values take precedence over the global ones.
    """
    parser.add_argument(
        "--threads",
        type=int,
        help="""
            Worker threads used to render and fuse views in parallel.
            A single thread is fully deterministic. Defaults to 1.
            """,
    )
    parser.add_argument(
        "--seed",
        type=int,
        help="Random seed, overriding train.seed of the configuration.",
    )
    parser.add_argument(
        "--deterministic",
        action="store_true",
        help="Force single-threaded execution for bit-identical results.",
    )


def create_parser() -> argparse.ArgumentParser:
    """Create the parser of the global surfacer CLI arguments."""
    parser = argparse.ArgumentParser(
        allow_abbrev=False,
        prog="surfacer",
        description="Self-constrained Gaussian surface reconstruction.",
    )
    parser.add_argument(
        "--version",
        action="version",
        version=f"%(prog)s {surfacer.__version__}",
    )
    parser.add_argument(
        "-c",
        "--config",
        dest="config_path",
        help="""
            Path to the YAML configuration file, or a directory containing
            a surfacer.yaml file. Defaults to surfacer.yaml in the current
            directory and to built-in defaults when that does not exist.
            """,
    )
    parser.add_argument(
        "-o",
        "--output-directory",
        dest="output_directory",
        help="""
            Directory receiving every artifact written by the command. The
            SURFACER_OUTPUT_DIRECTORY environment variable takes precedence.
            """,
    )
    populate_run_arguments(parser)
    parser.add_argument(
        "--quiet",
        action="store_true",
        help="Suppress progress lines.",
    )
    parser.add_argument(
        "command",
        nargs="?",
        help="""
            Command to execute: train, fuse, extract-mesh, render, eval,
            selftest, configs or help.
            """,
    )
    parser.add_argument(
        "command_arguments",
        nargs=argparse.REMAINDER,
        help="Arguments of the command; see <command> --help.",
    )
    return parser
