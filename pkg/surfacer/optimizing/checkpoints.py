"""Checkpoint containers and the per-iteration loss trace."""
import csv
import dataclasses
import pathlib
import typing

import numpy as np

from surfacer.definitions import errors
from surfacer.definitions import gaussians
from surfacer.optimizing import adam

#: Version written into every checkpoint; readers reject anything else.
FORMAT_VERSION = 1

TRACE_HEADER = (
    "iter",
    "l_rgb",
    "l_depth",
    "l_ns",
    "l_nm",
    "l_scp",
    "total",
    "num_gaussians",
)


@dataclasses.dataclass(frozen=True)
class Checkpoint:
    """Gaussian arrays, optimizer state and the iteration they were saved at."""

    cloud: "gaussians.GaussianCloud"
    state: "adam.OptimizerState"
    iteration: int


def save_checkpoint(
    path: typing.Union[str, pathlib.Path],
    cloud: "gaussians.GaussianCloud",
    state: "adam.OptimizerState",
    iteration: int,
) -> pathlib.Path:
    """Write a versioned npz container."""
    target = pathlib.Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    arrays = dict(cloud.parameters)
    arrays.update({f"m_{k}": v for k, v in state.first_moments.items()})
    arrays.update({f"v_{k}": v for k, v in state.second_moments.items()})
    with target.open("wb") as stream:
        np.savez(
            stream,
            format_version=np.int64(FORMAT_VERSION),
            iteration=np.int64(iteration),
            step=np.int64(state.step),
            **arrays,
        )
    return target


def load_checkpoint(path: typing.Union[str, pathlib.Path]) -> "Checkpoint":
    """Read a checkpoint written by save_checkpoint."""
    source = pathlib.Path(path)
    if not source.exists():
        raise FileNotFoundError(f"Checkpoint not found: {source}")

    with np.load(source) as data:
        version = int(data["format_version"]) if "format_version" in data else None
        if version != FORMAT_VERSION:
            raise errors.InvalidInputError(
                f"Checkpoint {source} has format version {version},"
                f" expected {FORMAT_VERSION}."
            )
        cloud = gaussians.GaussianCloud(
            **{k: np.array(data[k]) for k in gaussians.PARAMETER_NAMES}
        )
        state = adam.OptimizerState(
            first_moments={
                k: np.array(data[f"m_{k}"]) for k in gaussians.PARAMETER_NAMES
            },
            second_moments={
                k: np.array(data[f"v_{k}"]) for k in gaussians.PARAMETER_NAMES
            },
            step=int(data["step"]),
        )
        return Checkpoint(cloud=cloud, state=state, iteration=int(data["iteration"]))


@dataclasses.dataclass(frozen=True)
class TraceRow:
    """Loss values recorded for one iteration."""

    iteration: int
    l_rgb: float
    l_depth: float
    l_ns: float
    l_nm: float
    l_scp: float
    total: float
    num_gaussians: int

    def to_record(self) -> typing.List[str]:
        """Format the row with round-trip exact floats."""
        return [str(v) if isinstance(v, int) else repr(float(v)) for v in self.values]

    @property
    def values(self) -> typing.Tuple[typing.Any, ...]:
        """Get the fields in header order."""
        return dataclasses.astuple(self)


def write_trace(
    path: typing.Union[str, pathlib.Path],
    rows: typing.Sequence["TraceRow"],
    metrics: typing.Optional[typing.Dict[str, float]] = None,
) -> pathlib.Path:
    """Write the loss trace CSV, closing with a `# metrics` comment row if given."""
    target = pathlib.Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", newline="") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        writer.writerows(r.to_record() for r in rows)
        if metrics:
            pairs = " ".join(f"{k}={v!r}" for k, v in metrics.items())
            stream.write(f"# metrics {pairs}\n")
    return target


def read_trace(path: typing.Union[str, pathlib.Path]) -> typing.List["TraceRow"]:
    """Read the rows of a loss trace, ignoring comment rows."""
    lines = [
        line
        for line in pathlib.Path(path).read_text().splitlines()
        if line and not line.startswith("#")
    ]
    reader = csv.DictReader(lines)
    return [
        TraceRow(
            iteration=int(r["iter"]),
            l_rgb=float(r["l_rgb"]),
            l_depth=float(r["l_depth"]),
            l_ns=float(r["l_ns"]),
            l_nm=float(r["l_nm"]),
            l_scp=float(r["l_scp"]),
            total=float(r["total"]),
            num_gaussians=int(r["num_gaussians"]),
        )
        for r in reader
    ]
