"""Configuration data structures for YAML experiment definitions."""
import dataclasses
import pathlib
import typing

from surfacer.definitions import abstracts

#: Top-level configuration sections recognized by surfacer.
SECTIONS = (
    "scene",
    "grid",
    "prior",
    "train",
    "learning_rates",
    "losses",
    "densify",
    "output",
)


@dataclasses.dataclass(frozen=True)
class Configuration(abstracts.ConfiguredData):
    """
    Experiment configuration data structure.

    Each section is exposed as its own DataWrapper so that consumers can read
    nested keys with defaults without caring whether the section was written
    in the file at all.
    """

    def section(self, name: str) -> "abstracts.DataWrapper":
        """Get a wrapper around the named top-level section."""
        return abstracts.DataWrapper(self.get(name, default={}) or {})

    @property
    def scene(self) -> "abstracts.DataWrapper":
        """Get the analytic scene section."""
        return self.section("scene")

    @property
    def grid(self) -> "abstracts.DataWrapper":
        """Get the TSDF grid section."""
        return self.section("grid")

    @property
    def prior(self) -> "abstracts.DataWrapper":
        """Get the self-constrained prior schedule section."""
        return self.section("prior")

    @property
    def train(self) -> "abstracts.DataWrapper":
        """Get the training loop section."""
        return self.section("train")

    @property
    def learning_rates(self) -> "abstracts.DataWrapper":
        """Get the per-parameter learning rate section."""
        return self.section("learning_rates")

    @property
    def losses(self) -> "abstracts.DataWrapper":
        """Get the loss weights section."""
        return self.section("losses")

    @property
    def densify(self) -> "abstracts.DataWrapper":
        """Get the densification section."""
        return self.section("densify")

    @property
    def output_directory(self) -> pathlib.Path:
        """Get the configured output directory, relative to the config file."""
        return self.resolve_path(self.get("output", "directory", default="output"))

    @property
    def cache_directory(self) -> typing.Optional[pathlib.Path]:
        """Get the directory where ground-truth rasters are cached, if any."""
        if value := self.get("output", "cache_directory"):
            return self.resolve_path(value)
        return None

    def serialize(self) -> dict:
        """Serialize the object for output representation."""
        return {name: self.get(name, default={}) or {} for name in SECTIONS}
