"""Periodic prior updates with a shrinking band."""
import dataclasses
import typing

import numpy as np

from surfacer import rendering
from surfacer.definitions import cameras
from surfacer.definitions import errors
from surfacer.definitions import gaussians
from surfacer.fusing import fusion
from surfacer.fusing import grids


@dataclasses.dataclass(frozen=True)
class BandSchedule:
    """
    Schedule of prior re-fusions and the band width used by each one.

    Updates fire every update_interval iterations from start_iter through
    stop_iter, one per entry of sigma_sequence; iterations past the last
    sigma never update even when they fall on the interval.
    """

    update_interval: int = 5000
    start_iter: int = 5000
    stop_iter: int = 20000
    sigma_sequence: typing.Tuple[float, ...] = (1.0, 0.5, 0.25)
    #: Normalized distance splitting in-band Gaussians into on/off surface.
    delta: float = 0.3
    last_update_iter: typing.Optional[int] = None

    def __post_init__(self):
        """Validate schedule consistency."""
        sigmas = np.asarray(self.sigma_sequence, dtype=np.float64)
        if self.update_interval <= 0 or self.start_iter <= 0:
            raise errors.InvalidInputError(
                "Prior update interval and start must be positive."
            )
        if not 0.0 < self.delta < 1.0:
            raise errors.InvalidInputError(
                f"Band threshold delta={self.delta} is not in (0, 1)."
            )
        if np.any(sigmas <= 0):
            raise errors.InvalidInputError("Band scalings must be positive.")

        fixed = sigmas.size > 0 and np.all(sigmas == sigmas[0])
        if sigmas.size > 1 and not fixed and np.any(np.diff(sigmas) >= 0):
            raise errors.InvalidInputError(
                f"Band scalings {self.sigma_sequence} must be strictly decreasing."
            )

    @property
    def update_iterations(self) -> typing.List[int]:
        """List the iterations at which the prior is re-fused."""
        candidates = range(self.start_iter, self.stop_iter + 1, self.update_interval)
        return list(candidates)[: len(self.sigma_sequence)]

    def update_index(self, iteration: int) -> typing.Optional[int]:
        """Get the index of the update firing at this iteration, if any."""
        try:
            return self.update_iterations.index(iteration)
        except ValueError:
            return None

    def sigma_at(self, iteration: int) -> typing.Optional[float]:
        """Get the band scaling used by the update firing at this iteration."""
        index = self.update_index(iteration)
        return None if index is None else float(self.sigma_sequence[index])

    def with_fixed_bandwidth(self, sigma: float) -> "BandSchedule":
        """Create a schedule that keeps the same band scaling for every update."""
        return dataclasses.replace(
            self, sigma_sequence=(float(sigma),) * len(self.sigma_sequence)
        )

    def with_max_updates(self, count: typing.Optional[int]) -> "BandSchedule":
        """Create a schedule that fires at most count updates."""
        if count is None:
            return self
        return dataclasses.replace(
            self, sigma_sequence=self.sigma_sequence[: max(0, count)]
        )

    def advanced(self, iteration: int) -> "BandSchedule":
        """Record that an update fired at the given iteration."""
        return dataclasses.replace(self, last_update_iter=iteration)


def render_depth_maps(
    cloud: "gaussians.GaussianCloud",
    views: typing.Sequence["cameras.CameraView"],
    near: float,
    far: float,
    alpha_threshold: float = 0.5,
    threads: int = 1,
) -> typing.Tuple[typing.List[np.ndarray], typing.List[np.ndarray]]:
    """Render depth rasters and their validity masks for every view."""
    outputs = rendering.render_views(cloud, views, near, far, threads=threads)
    depths = [o.depth for o in outputs]
    masks = [o.alpha > alpha_threshold for o in outputs]
    return depths, masks


def maybe_update_prior(
    schedule: "BandSchedule",
    iteration: int,
    cloud: "gaussians.GaussianCloud",
    views: typing.Sequence["cameras.CameraView"],
    spec: "grids.GridSpec",
    base_truncation: float,
    near: float,
    far: float,
    alpha_threshold: float = 0.5,
    threads: int = 1,
) -> typing.Optional["grids.TsdfGrid"]:
    """
    Re-fuse the prior from the current Gaussians when the schedule says so.

    :return:
        The new grid with truncation base_truncation * sigma for the update
        firing at this iteration, or None when no update is due.
    """
    sigma = schedule.sigma_at(iteration)
    if sigma is None:
        return None

    depths, masks = render_depth_maps(cloud, views, near, far, alpha_threshold, threads)
    return fusion.fuse_depth_maps(
        views=views,
        depths=depths,
        spec=spec,
        truncation=base_truncation * sigma,
        masks=masks,
        threads=threads,
    )
