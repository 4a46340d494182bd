"""Abstract classes utilized elsewhere for parent inheritance."""
import dataclasses
import pathlib
import typing


@dataclasses.dataclass(frozen=True)
class DataWrapper:
    """Base class for data loaded and stored in a dynamic dictionary."""

    #: Data that represents the dynamic representation that is being
    #: wrapped by this object.
    data: dict

    def get(self, *args: str, default: typing.Any = None) -> typing.Any:
        """Fetch the value from the data dictionary."""
        value = self.data or {}
        for k in args:
            if not isinstance(value, dict) or k not in value:
                return default
            value = value[k]
        return value

    def get_first(
        self,
        *args: typing.Iterable[str],
        default: typing.Any = None,
    ) -> typing.Any:
        """
        Fetch the value from the data dictionary in the key-grouped order.

        The default value will be returned instead if none of the key-group args exist
        in the data dictionary.
        """
        found_args = next((a for a in args if self.has(*a)), None)
        if found_args is None:
            return default
        return self.get(*found_args, default=default)

    def get_as_list(
        self,
        *args: str,
        default: typing.Any = None,
    ) -> typing.List[typing.Any]:
        """
        Fetch the value from the data dictionary as a list.

        None values will be returned as an empty list. Values that are
        not lists will be wrapped into single-length lists when returned.
        """
        value = self.get(*args, default=default) if self.has(*args) else default
        if value is None:
            return []
        if isinstance(value, (list, tuple)):
            return list(value)
        return [value]

    def get_float(self, *args: str, default: float) -> float:
        """Fetch the value as a float, falling back to the default when unset."""
        value = self.get(*args)
        return float(default if value is None else value)

    def get_int(self, *args: str, default: int) -> int:
        """Fetch the value as an integer, falling back to the default when unset."""
        value = self.get(*args)
        return int(default if value is None else value)

    def get_bool(self, *args: str, default: bool) -> bool:
        """
        Fetch the value as a boolean, falling back to the default when unset.

        String values such as "no" or "off" survive YAML quoting and are
        interpreted the same way YAML would interpret them unquoted.
        """
        value = self.get(*args)
        if value is None:
            return default
        if isinstance(value, str):
            return value.strip().lower() in ("1", "true", "yes", "on")
        return bool(value)

    def get_floats(
        self,
        *args: str,
        default: typing.Sequence[float],
    ) -> typing.Tuple[float, ...]:
        """Fetch the value as a tuple of floats."""
        values = self.get_as_list(*args, default=list(default))
        return tuple(float(v) for v in values)

    def has(self, *args: str) -> bool:
        """Determine whether or not the nested key exists."""
        value = self.data or {}
        for k in args:
            if not isinstance(value, dict) or k not in value:
                return False
            value = value[k]
        return True

    def update(self, *args, value: typing.Any = None, overwrite: bool = False):
        """Update the data object if the key is not found to be set already."""
        container = self.data or {}
        for k in args[:-1]:
            if k not in container:
                container[k] = {}
            container = container[k]

        if overwrite or args[-1] not in container:
            container[args[-1]] = value


@dataclasses.dataclass(frozen=True)
class ConfiguredData(DataWrapper):
    """Base class for data loaded from the configuration."""

    #: Directory in which the configuration file resides. Relative paths
    #: within the configuration are resolved against it.
    directory: pathlib.Path
    #: Raw data loaded from a configuration file that represents
    #: the data for this object.
    data: dict

    def resolve_path(self, value: typing.Union[str, pathlib.Path]) -> pathlib.Path:
        """Resolve a configured path relative to the configuration directory."""
        path = pathlib.Path(value).expanduser()
        if path.is_absolute():
            return path
        return self.directory.joinpath(path).absolute()

    def serialize(self) -> dict:
        """Serialize the object for output representation."""
        return {}
