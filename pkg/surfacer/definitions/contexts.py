"""Context definitions module."""
import argparse
import dataclasses
import os
import pathlib
import typing

import yaml

from surfacer.definitions import configurations

#: Environment variable that overrides the configured output directory.
OUTPUT_DIRECTORY_VARIABLE = "SURFACER_OUTPUT_DIRECTORY"

#: Default configuration file name looked up inside directories.
DEFAULT_FILENAME = "surfacer.yaml"


@dataclasses.dataclass(frozen=True)
class Context:
    """Execution context for the current invocation."""

    arguments: argparse.Namespace
    configuration: "configurations.Configuration"

    @property
    def output_directory(self) -> pathlib.Path:
        """
        Get the directory where the invocation writes its artifacts.

        The environment variable takes precedence over the command line flag,
        which takes precedence over the configuration file. Nothing else in the
        configuration can be overridden from the environment.
        """
        if value := os.environ.get(OUTPUT_DIRECTORY_VARIABLE):
            return pathlib.Path(value).expanduser().absolute()
        if value := getattr(self.arguments, "output_directory", None):
            return pathlib.Path(value).expanduser().absolute()
        return self.configuration.output_directory

    @property
    def threads(self) -> int:
        """Get the worker count, forced to one in deterministic mode."""
        if self.deterministic:
            return 1
        return max(1, int(getattr(self.arguments, "threads", None) or 1))

    @property
    def deterministic(self) -> bool:
        """Get whether fully deterministic execution was requested."""
        return bool(getattr(self.arguments, "deterministic", False))

    @property
    def seed(self) -> int:
        """Get the random seed from the arguments or the configuration."""
        value = getattr(self.arguments, "seed", None)
        if value is None:
            value = self.configuration.get("train", "seed", default=0)
        return int(value)

    @property
    def verbose(self) -> bool:
        """Get whether progress lines should be printed."""
        return not bool(getattr(self.arguments, "quiet", False))

    def with_overrides(self, values: typing.Dict[str, typing.Any]) -> "Context":
        """
        Get a copy whose run flags are replaced by those a command received.

        Unset command values leave the global ones in place.
        """
        changes = {
            key: values[key]
            for key in ("threads", "seed", "deterministic")
            if values.get(key) is not None and values.get(key) is not False
        }
        if not changes:
            return self
        arguments = argparse.Namespace(**{**vars(self.arguments), **changes})
        return dataclasses.replace(self, arguments=arguments)

    @classmethod
    def load_from_file(
        cls,
        arguments: argparse.Namespace,
        path: typing.Union[str, pathlib.Path] = None,
    ) -> "Context":
        """
        Load a context from a configuration path target.

        Directories are resolved to the `surfacer.yaml` file they contain. A
        missing file raises a FileNotFoundError naming the resolved path.
        """
        target = pathlib.Path(path or f"./{DEFAULT_FILENAME}").absolute()
        if target.is_dir():
            target = target.joinpath(DEFAULT_FILENAME)

        if not target.exists():
            raise FileNotFoundError(f"Configuration file not found: {target}")

        return cls(
            arguments=arguments,
            configuration=configurations.Configuration(
                directory=target.parent,
                data=yaml.safe_load(target.read_text()) or {},
            ),
        )
