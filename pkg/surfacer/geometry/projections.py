"""Pinhole projection of world points."""
import typing

import numpy as np


def transform_points(
    rotation: np.ndarray,
    translation: np.ndarray,
    points: np.ndarray,
) -> np.ndarray:
    """
    Map world points of shape (..., 3) into a camera frame.

    The products are expanded term by term instead of going through a matrix
    multiply so that results are reproducible bit for bit by scalar code that
    evaluates the same expression.
    """
    x, y, z = points[..., 0], points[..., 1], points[..., 2]
    return np.stack(
        [
            rotation[i, 0] * x + rotation[i, 1] * y + rotation[i, 2] * z + translation[
                i
            ]
            for i in range(3)
        ],
        axis=-1,
    )


def project_points(
    intrinsics: np.ndarray,
    rotation: np.ndarray,
    translation: np.ndarray,
    points: np.ndarray,
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """
    Project world points of shape (..., 3) to pixels and camera depths.

    Points at or behind the camera plane are returned as computed; callers
    cull them using the depth.
    """
    local = transform_points(
        rotation, translation, np.asarray(points, dtype=np.float64)
    )
    depth = local[..., 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        u = intrinsics[0, 0] * (local[..., 0] / depth) + intrinsics[0, 2]
        v = intrinsics[1, 1] * (local[..., 1] / depth) + intrinsics[1, 2]
    return np.stack([u, v], axis=-1), depth


def project_point(
    intrinsics: np.ndarray,
    rotation: np.ndarray,
    translation: np.ndarray,
    point: np.ndarray,
) -> typing.Tuple[np.ndarray, float]:
    """Project one world point to its pixel coordinate and camera depth."""
    pixel, depth = project_points(intrinsics, rotation, translation, np.asarray(point))
    return pixel, float(depth)
