"""Gaussian initialization and ground-truth point clouds for analytic scenes."""
import typing

import numpy as np

from surfacer.definitions import enumerations
from surfacer.definitions import errors
from surfacer.definitions import gaussians
from surfacer.scenes import building

MIN_GAUSSIANS = 16
MIN_CHAMFER_SAMPLES = 1000
#: Ratio of the flattened scale axis to the in-plane scales at initialization.
FLATTENING = 0.1
INITIAL_OPACITY_LOGIT = 0.1
INITIAL_COLOR = 0.5
BOUNDS_PADDING = 0.05


def _rotations_to_normals(normals: np.ndarray) -> np.ndarray:
    """Get quaternions rotating +z onto each unit normal."""
    z = np.array([0.0, 0.0, 1.0])
    axes = np.cross(z, normals)
    cosines = np.clip(normals @ z, -1.0, 1.0)
    quaternions = np.concatenate([(1.0 + cosines)[:, None], axes], axis=1)
    opposite = cosines < -1.0 + 1e-12
    quaternions[opposite] = np.array([0.0, 1.0, 0.0, 0.0])
    return quaternions / np.linalg.norm(quaternions, axis=1, keepdims=True)


def init_gaussians(
    scene: "building.AnalyticScene",
    count: int,
    mode: typing.Union["enumerations.InitMode", str] = enumerations.InitMode.RANDOM,
    seed: int = 0,
) -> "gaussians.GaussianCloud":
    """
    Create the starting Gaussian collection of a scene.

    Random mode spreads centers uniformly over the padded bounding box with
    rotations close to identity. Surface mode places centers on the analytic
    surface with their plane normals along the surface normals.

    In-plane scales are bbox_diag / (count^(1/3) * 4); the third axis is
    flattened so every Gaussian starts planar with an unambiguous normal.
    """
    if count < MIN_GAUSSIANS:
        raise errors.InvalidInputError(
            f"At least {MIN_GAUSSIANS} Gaussians are required."
        )

    rng = np.random.default_rng(seed)
    mode = enumerations.InitMode.from_value(mode)
    lower, upper = scene.bounds
    padding = BOUNDS_PADDING * (upper - lower)
    size = scene.extent / (count ** (1.0 / 3.0) * 4.0)

    if mode == enumerations.InitMode.SURFACE:
        centers = scene.shape.sample_surface(count, rng)
        rotations = _rotations_to_normals(scene.shape.normals(centers))
    else:
        centers = rng.uniform(lower - padding, upper + padding, size=(count, 3))
        rotations = np.concatenate(
            [np.ones((count, 1)), 0.1 * rng.normal(size=(count, 3))], axis=1
        )
        rotations /= np.linalg.norm(rotations, axis=1, keepdims=True)

    log_scales = np.log(np.tile([size, size, FLATTENING * size], (count, 1)))
    return gaussians.GaussianCloud(
        centers=centers,
        log_scales=log_scales,
        rotations=rotations,
        opacity_logits=np.full(count, INITIAL_OPACITY_LOGIT),
        colors=np.full((count, 3), INITIAL_COLOR),
    )


def chamfer_pointcloud(
    scene: "building.AnalyticScene",
    samples: int = 100_000,
    seed: int = 0,
) -> np.ndarray:
    """Sample exactly the requested number of points uniformly over the surface."""
    if samples < MIN_CHAMFER_SAMPLES:
        raise errors.InvalidInputError(
            f"At least {MIN_CHAMFER_SAMPLES} ground-truth samples are required."
        )
    return scene.shape.sample_surface(samples, np.random.default_rng(seed))
