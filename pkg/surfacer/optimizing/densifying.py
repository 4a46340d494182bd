"""Adaptive density control: clone, split, prune and opacity reset."""
import dataclasses
import typing

import numpy as np

from surfacer.definitions import gaussians
from surfacer.geometry import rotations
from surfacer.optimizing import adam
from surfacer.optimizing import settings
from surfacer.rendering import splatting

#: Opacity ceiling applied by an opacity reset.
RESET_OPACITY = 0.01
#: Children created when a Gaussian is split.
SPLIT_CHILDREN = 2


@dataclasses.dataclass
class DensifyStats:
    """Screen-space positional gradient norms accumulated between densify events."""

    accumulated: np.ndarray
    counts: np.ndarray

    @classmethod
    def zeros(cls, count: int) -> "DensifyStats":
        """Create empty statistics for a cloud of the given size."""
        return cls(np.zeros(count), np.zeros(count, dtype=np.int64))

    def add(self, grad_centers: np.ndarray, output: "splatting.RenderOutput"):
        """
        Accumulate the gradient of one render for every Gaussian it touched.

        World gradients are rotated into the camera frame and rescaled to
        normalized device coordinates, so the threshold is independent of
        the image resolution.
        """
        visible = np.unique(output.records.gaussians)
        if len(visible) == 0:
            return
        view = output.view
        camera = grad_centers[visible] @ view.rotation.T
        depths = output.camera_centers[visible, 2]
        scale_x = depths * view.width / (2.0 * view.fx)
        scale_y = depths * view.height / (2.0 * view.fy)
        norms = np.hypot(camera[:, 0] * scale_x, camera[:, 1] * scale_y)
        finite = np.isfinite(norms)
        self.accumulated[visible[finite]] += norms[finite]
        self.counts[visible[finite]] += 1

    def means(self) -> np.ndarray:
        """Get the mean accumulated gradient, 0 for Gaussians never seen."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(
                self.counts > 0, self.accumulated / np.maximum(self.counts, 1), 0.0
            )


@dataclasses.dataclass(frozen=True)
class DensifyResult:
    """Outcome of one densification event."""

    cloud: "gaussians.GaussianCloud"
    #: Input row each output Gaussian inherits optimizer state from; -1 is fresh.
    sources: np.ndarray
    cloned: int
    split: int
    pruned: int

    def to_line(self, iteration: int) -> str:
        """Format the event for progress output."""
        return (
            f"iter={iteration} cloned={self.cloned} split={self.split}"
            f" pruned={self.pruned} total={len(self.cloud)}"
        )


def _budgeted(
    candidates: np.ndarray,
    growth: np.ndarray,
    scores: np.ndarray,
    available: typing.Optional[int],
) -> np.ndarray:
    """Keep the highest-scoring candidates whose combined growth fits the budget."""
    if available is None:
        return candidates
    chosen = np.zeros_like(candidates)
    order = np.flatnonzero(candidates)
    order = order[np.argsort(-scores[order], kind="stable")]
    used = 0
    for index in order:
        if used + growth[index] > available:
            break
        used += growth[index]
        chosen[index] = True
    return chosen


def densify(
    cloud: "gaussians.GaussianCloud",
    gradients: np.ndarray,
    config: "settings.DensifySettings",
    extent: float,
    rng: np.random.Generator,
) -> "DensifyResult":
    """
    Grow and thin the cloud according to its accumulated positional gradients.

    Gaussians whose mean gradient reaches the threshold are cloned when their
    largest scale is at most percent_dense * extent and split otherwise. A
    split replaces the parent with two children drawn from the parent's own
    distribution with scales divided by the split factor. Gaussians with
    opacity below the prune threshold are then removed, but never below the
    configured floor; the floor keeps the most opaque Gaussians, ties broken
    by index.
    """
    count = len(cloud)
    gradients = np.nan_to_num(np.asarray(gradients, dtype=np.float64), nan=0.0)
    candidates = gradients >= config.gradient_threshold
    large = cloud.scales.max(axis=1) > config.percent_dense * extent

    available = None
    if config.max_gaussians is not None:
        available = max(0, config.max_gaussians - count)
    growth = np.where(large, SPLIT_CHILDREN - 1, 1)
    candidates = _budgeted(candidates, growth, gradients, available)
    clone = candidates & ~large
    split = candidates & large

    parents = np.flatnonzero(split)
    survivors = np.flatnonzero(~split)
    clones = np.flatnonzero(clone)

    pieces = [cloud.select(survivors), cloud.select(clones)]
    sources = [survivors, np.full(len(clones), -1)]
    if len(parents):
        repeated = np.repeat(parents, SPLIT_CHILDREN)
        children = cloud.select(repeated)
        stds = cloud.scales[repeated]
        offsets = rng.normal(size=stds.shape) * stds
        frames = rotations.quaternions_to_rotations(cloud.rotations[repeated])
        children = dataclasses.replace(
            children,
            centers=children.centers + np.einsum("nij,nj->ni", frames, offsets),
            log_scales=children.log_scales - np.log(config.split_factor),
        )
        pieces.append(children)
        sources.append(np.full(len(repeated), -1))

    grown = gaussians.GaussianCloud.concatenate(pieces)
    grown_sources = np.concatenate(sources).astype(np.int64)

    opacities = grown.opacities
    keep = opacities >= config.prune_opacity
    floor = min(config.min_gaussians, len(grown))
    if keep.sum() < floor:
        order = np.argsort(-opacities, kind="stable")
        keep = np.zeros(len(grown), dtype=bool)
        keep[order[:floor]] = True
    kept = np.flatnonzero(keep)

    return DensifyResult(
        cloud=grown.select(kept),
        sources=grown_sources[kept],
        cloned=len(clones),
        split=len(parents),
        pruned=len(grown) - len(kept),
    )


def reset_opacity(
    cloud: "gaussians.GaussianCloud",
    state: typing.Optional["adam.OptimizerState"] = None,
) -> "gaussians.GaussianCloud":
    """Clamp every opacity to at most 0.01 and zero the opacity moments."""
    ceiling = float(gaussians.inverse_sigmoid(RESET_OPACITY))
    np.minimum(cloud.opacity_logits, ceiling, out=cloud.opacity_logits)
    if state is not None:
        state.reset("opacity_logits")
    return cloud
