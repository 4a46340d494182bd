"""Quantitative reconstruction metrics."""
import typing

import numpy as np
from scipy import spatial

from surfacer.definitions import errors
from surfacer.evaluating import meshing

#: Points drawn from a mesh before comparing it with a point set.
MESH_SAMPLES = 100_000
#: Reported PSNR of identical images.
PSNR_CAP = 99.0

PointsOrMesh = typing.Union[np.ndarray, "meshing.Mesh"]


def as_points(
    value: PointsOrMesh,
    samples: int = MESH_SAMPLES,
    seed: int = 0,
) -> np.ndarray:
    """Get a point set, sampling meshes uniformly by area."""
    if isinstance(value, meshing.Mesh):
        if value.is_empty:
            return np.zeros((0, 3))
        return value.sample_points(samples, seed)
    return np.asarray(value, dtype=np.float64).reshape(-1, 3)


def chamfer_l1(
    predicted: PointsOrMesh,
    target: PointsOrMesh,
    samples: int = MESH_SAMPLES,
    seed: int = 0,
) -> float:
    """
    Compute the symmetric mean nearest-neighbour distance of two surfaces.

    The result is 0.5 * (mean_p min_q |p - q| + mean_q min_p |p - q|) with
    Euclidean distances; meshes are sampled to point sets first.
    """
    a = as_points(predicted, samples, seed)
    b = as_points(target, samples, seed)
    if len(a) == 0 or len(b) == 0:
        raise errors.InvalidInputError(
            "Chamfer distance needs two non-empty point sets."
        )

    forward, _ = spatial.cKDTree(b).query(a, k=1)
    backward, _ = spatial.cKDTree(a).query(b, k=1)
    return float(0.5 * (np.mean(forward) + np.mean(backward)))


def psnr(rendered: np.ndarray, target: np.ndarray) -> float:
    """Compute 10 log10(1 / MSE) of images in [0, 1], capped at 99 dB."""
    rendered = np.asarray(rendered, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if rendered.shape != target.shape:
        raise errors.InvalidInputError("PSNR needs images of the same size.")

    mse = float(np.mean((rendered - target) ** 2))
    if mse == 0.0:
        return PSNR_CAP
    return float(min(PSNR_CAP, 10.0 * np.log10(1.0 / mse)))
