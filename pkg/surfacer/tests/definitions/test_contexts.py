import os
import pathlib
from unittest.mock import patch

import pytest

from surfacer import parsing
from surfacer.definitions import contexts


def _write_config(directory: pathlib.Path) -> pathlib.Path:
    path = directory.joinpath("surfacer.yaml")
    path.write_text("output:\n  directory: results\ntrain:\n  seed: 7\n")
    return path


def test_load_from_directory(tmp_path: pathlib.Path):
    """Should resolve a directory to the configuration file inside it."""
    _write_config(tmp_path)
    args = parsing.create_parser().parse_args([])
    context = contexts.Context.load_from_file(args, tmp_path)
    assert context.configuration.directory == tmp_path.absolute()
    assert context.output_directory == tmp_path.joinpath("results").absolute()
    assert context.seed == 7


def test_load_missing_file(tmp_path: pathlib.Path):
    """Should raise a FileNotFoundError naming the missing configuration."""
    args = parsing.create_parser().parse_args([])
    with pytest.raises(FileNotFoundError, match="surfacer.yaml"):
        contexts.Context.load_from_file(args, tmp_path)


def test_output_directory_precedence(tmp_path: pathlib.Path):
    """Should prefer the environment over the flag over the configuration."""
    path = _write_config(tmp_path)
    args = parsing.create_parser().parse_args(["-o", str(tmp_path / "flag")])
    context = contexts.Context.load_from_file(args, path)
    assert context.output_directory == tmp_path.joinpath("flag").absolute()

    environment = {contexts.OUTPUT_DIRECTORY_VARIABLE: str(tmp_path / "env")}
    with patch.dict(os.environ, environment):
        assert context.output_directory == tmp_path.joinpath("env").absolute()


def test_deterministic_forces_one_thread(tmp_path: pathlib.Path):
    """Should use a single worker in deterministic mode."""
    path = _write_config(tmp_path)
    args = parsing.create_parser().parse_args(["--threads", "4", "--deterministic"])
    context = contexts.Context.load_from_file(args, path)
    assert context.threads == 1
    assert context.deterministic


def test_seed_flag_overrides_configuration(tmp_path: pathlib.Path):
    """Should take the seed from the command line when given."""
    path = _write_config(tmp_path)
    args = parsing.create_parser().parse_args(["--seed", "3", "--quiet"])
    context = contexts.Context.load_from_file(args, path)
    assert context.seed == 3
    assert not context.verbose


def test_command_overrides(tmp_path: pathlib.Path):
    """Should let command run flags replace the global ones when set."""
    path = _write_config(tmp_path)
    args = parsing.create_parser().parse_args(["--seed", "3", "--threads", "4"])
    context = contexts.Context.load_from_file(args, path)

    unchanged = context.with_overrides({"seed": None, "deterministic": False})
    assert unchanged is context

    changed = context.with_overrides({"seed": 0, "deterministic": True})
    assert changed.seed == 0
    assert changed.threads == 1
    assert context.seed == 3
    assert context.threads == 4
