"""Pulling Gaussian centers onto the zero level set of the prior."""
import typing

import numpy as np

from surfacer.definitions import gaussians
from surfacer.fusing import grids

#: Gradients shorter than this give no usable direction.
MIN_GRADIENT_NORM = 1e-8


def projection_steps(
    grid: "grids.TsdfGrid",
    points: np.ndarray,
    literal: bool = False,
    epsilon: float = grids.GRADIENT_EPSILON,
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """
    Compute the displacement moving each point toward the surface.

    The metric step is -(s T) grad f / |grad f|, which lands on the zero set
    of a field that is linear within the cell. The literal step -s grad f is
    available for comparison.

    :return:
        Displacements of shape (N, 3) and a flag per point telling whether it
        moves. Points with |s| >= 1, an unsupported stencil or a vanishing
        gradient stay where they are.
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    values, observed = grids.sample_points(grid, points)
    gradients, supported = grids.gradient_points(grid, points, epsilon)
    norms = np.linalg.norm(gradients, axis=1)
    moving = (np.abs(values) < 1.0) & observed & supported & (norms > MIN_GRADIENT_NORM)

    safe_norms = np.where(moving, norms, 1.0)[:, None]
    if literal:
        steps = -values[:, None] * gradients
    else:
        steps = -(values * grid.truncation)[:, None] * gradients / safe_norms
    return np.where(moving[:, None], steps, 0.0), moving


def project_to_surface(
    cloud: "gaussians.GaussianCloud",
    grid: "grids.TsdfGrid",
    literal: bool = False,
) -> typing.Tuple["gaussians.GaussianCloud", int]:
    """
    Overwrite Gaussian centers with their projections onto the prior surface.

    This is a direct position update, not a loss.

    :return:
        The updated collection and the number of Gaussians that moved.
    """
    steps, moving = projection_steps(grid, cloud.centers, literal=literal)
    return cloud.with_centers(cloud.centers + steps), int(moving.sum())
