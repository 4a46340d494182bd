"""Accuracy of band classification under a range of on-surface thresholds."""
import dataclasses
import typing

import numpy as np

from surfacer import constraining
from surfacer.definitions import enumerations
from surfacer.fusing import grids
from surfacer.scenes import shapes

DEFAULT_DELTAS = (0.7, 0.5, 0.3, 0.1)


@dataclasses.dataclass(frozen=True)
class SweepRow:
    """Classification accuracy for one threshold."""

    delta: float
    #: Fraction of samples truly within delta * T labeled on-surface.
    on_accuracy: float
    #: Fraction of samples truly beyond delta * T labeled off-surface or outside.
    off_accuracy: float

    def serialize(self) -> dict:
        """Serialize the row for output representation."""
        return dataclasses.asdict(self)


def delta_sweep(
    grid: "grids.TsdfGrid",
    shape: "shapes.AnalyticShape",
    deltas: typing.Sequence[float] = DEFAULT_DELTAS,
    samples: int = 10_000,
    noise: typing.Optional[float] = None,
    seed: int = 0,
) -> typing.List["SweepRow"]:
    """
    Classify noisy surface samples against a grid for several thresholds.

    Samples are drawn on the analytic surface and displaced by isotropic
    Gaussian noise (half the grid truncation by default). The true distance
    decides which samples should be on-surface for each threshold.
    """
    rng = np.random.default_rng(seed)
    noise = 0.5 * grid.truncation if noise is None else noise
    points = shape.sample_surface(samples, rng) + rng.normal(
        scale=noise, size=(samples, 3)
    )
    truth = np.abs(shape.sdf(points))

    rows = []
    for delta in deltas:
        labels = constraining.classify_points(grid, float(delta), points).labels
        near = truth <= delta * grid.truncation
        observed = labels != enumerations.BandLabel.UNOBSERVED
        on = labels == enumerations.BandLabel.ON_SURFACE
        rows.append(
            SweepRow(
                delta=float(delta),
                on_accuracy=_fraction(on[near & observed]),
                off_accuracy=_fraction(~on[~near & observed]),
            )
        )
    return rows


def _fraction(flags: np.ndarray) -> float:
    """Get the share of true flags, 0 for an empty selection."""
    return float(flags.mean()) if flags.size else 0.0
