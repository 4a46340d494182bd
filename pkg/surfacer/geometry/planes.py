"""Plane extraction for planar Gaussians."""
import typing

import numpy as np

from surfacer.definitions import gaussians
from surfacer.geometry import rotations

#: Relative tolerance under which two scale axes count as tied.
TIE_TOLERANCE = 1e-12


def normal_axes(log_scales: np.ndarray) -> np.ndarray:
    """
    Get the index of the minimum-scale axis for each Gaussian.

    Axes tied at machine precision resolve to the lowest index.
    """
    log_scales = np.atleast_2d(np.asarray(log_scales, dtype=np.float64))
    minimums = log_scales.min(axis=-1, keepdims=True)
    tied = log_scales <= minimums + TIE_TOLERANCE * np.maximum(1.0, np.abs(minimums))
    return np.argmax(tied, axis=-1)


def gaussian_plane(
    gaussian: "gaussians.Gaussian",
    facing: typing.Optional[np.ndarray] = None,
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """
    Get the plane a planar Gaussian represents.

    :param gaussian:
        The Gaussian whose plane should be computed.
    :param facing:
        Optional world position, typically a camera center, that the returned
        normal should face.
    :return:
        Unit normal (the rotation column of the minimum scale axis) and a point
        on the plane (the Gaussian center).
    """
    rotation = rotations.quat_to_rotation(gaussian.rotation)
    axis = int(normal_axes(gaussian.log_scale)[0])
    normal = rotation[:, axis].copy()
    center = np.asarray(gaussian.center, dtype=np.float64)
    if facing is not None and normal @ (np.asarray(facing) - center) < 0:
        normal = -normal
    return normal, center


def plane_normals(cloud: "gaussians.GaussianCloud") -> np.ndarray:
    """Get the world-space plane normals of every Gaussian in a cloud."""
    rotation = rotations.quaternions_to_rotations(cloud.rotations)
    axes = normal_axes(cloud.log_scales)
    return rotation[np.arange(len(cloud)), :, axes]
