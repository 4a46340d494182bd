"""Band classification of Gaussians against the prior and outlier removal."""
import dataclasses
import typing

import numpy as np

from surfacer.definitions import enumerations
from surfacer.definitions import gaussians
from surfacer.fusing import grids

#: Slack absorbing interpolation round-off when detecting |s| = 1.
OUTSIDE_TOLERANCE = 1e-6

BandLabel = enumerations.BandLabel


@dataclasses.dataclass(frozen=True, eq=False)
class Classification:
    """Labels and sampled normalized distances of a Gaussian collection."""

    labels: np.ndarray
    values: np.ndarray
    delta: float

    def __len__(self) -> int:
        """Get the number of classified Gaussians."""
        return len(self.labels)

    def count(self, label: "enumerations.BandLabel") -> int:
        """Count Gaussians carrying a label."""
        return int(np.count_nonzero(self.labels == label))

    def select(self, indices: np.ndarray) -> "Classification":
        """Keep the entries of the given Gaussians."""
        return Classification(self.labels[indices], self.values[indices], self.delta)


def _labels(
    values: np.ndarray,
    observed: np.ndarray,
    inside: np.ndarray,
    delta: float,
) -> np.ndarray:
    """Apply the label precedence: outside grid, unobserved, |s| thresholds."""
    magnitude = np.abs(values)
    labels = np.full(values.shape, int(BandLabel.OFF_SURFACE), dtype=np.int64)
    labels[magnitude <= delta] = BandLabel.ON_SURFACE
    labels[magnitude >= 1.0 - OUTSIDE_TOLERANCE] = BandLabel.OUTSIDE
    labels[inside & ~observed] = BandLabel.UNOBSERVED
    labels[~inside] = BandLabel.OUTSIDE
    return labels


def classify_points(
    grid: "grids.TsdfGrid",
    delta: float,
    points: np.ndarray,
) -> "Classification":
    """
    Label points of shape (N, 3) by where they fall relative to the band.

    Points outside the grid are OUTSIDE. Points inside whose 8 support voxels
    were never observed are UNOBSERVED. Otherwise |s| >= 1 (within 1e-6) is
    OUTSIDE, |s| <= delta is ON_SURFACE and anything between is OFF_SURFACE.
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    values, observed = grids.sample_points(grid, points)
    inside = grids.contains_points(grid, points)
    return Classification(_labels(values, observed, inside, delta), values, delta)


def classify(
    grid: "grids.TsdfGrid",
    delta: float,
    gaussian: "gaussians.Gaussian",
) -> "enumerations.BandLabel":
    """Label one Gaussian by the prior value sampled at its center."""
    return BandLabel(int(classify_points(grid, delta, gaussian.center).labels[0]))


def classify_cloud(
    grid: "grids.TsdfGrid",
    delta: float,
    cloud: "gaussians.GaussianCloud",
) -> "Classification":
    """Label every Gaussian of a collection."""
    return classify_points(grid, delta, cloud.centers)


@dataclasses.dataclass(frozen=True)
class RemovalReport:
    """What an outlier removal pass dropped and how the collection was labeled."""

    removed: typing.Tuple[int, ...]
    on_surface: int
    off_surface: int
    outside: int
    unobserved: int

    def to_line(self, iteration: int) -> str:
        """Format the report as one removal log line."""
        return (
            f"iter={iteration} removed={len(self.removed)} on={self.on_surface}"
            f" off={self.off_surface} outside={self.outside}"
            f" unobserved={self.unobserved}"
        )


def remove_outliers(
    cloud: "gaussians.GaussianCloud",
    grid: "grids.TsdfGrid",
    delta: float,
    remove_unobserved: bool = False,
) -> typing.Tuple["gaussians.GaussianCloud", "RemovalReport", np.ndarray]:
    """
    Drop every Gaussian labeled OUTSIDE.

    :param remove_unobserved:
        Also drop Gaussians in never-observed space.
    :return:
        The retained Gaussians, the removal report and the indices of the
        retained Gaussians in the input collection.
    """
    classification = classify_cloud(grid, delta, cloud)
    labels = classification.labels
    dropped = labels == BandLabel.OUTSIDE
    if remove_unobserved:
        dropped |= labels == BandLabel.UNOBSERVED

    kept = np.flatnonzero(~dropped)
    report = RemovalReport(
        removed=tuple(int(i) for i in np.flatnonzero(dropped)),
        on_surface=classification.count(BandLabel.ON_SURFACE),
        off_surface=classification.count(BandLabel.OFF_SURFACE),
        outside=classification.count(BandLabel.OUTSIDE),
        unobserved=classification.count(BandLabel.UNOBSERVED),
    )
    return cloud.select(kept), report, kept
