"""Depth distortion loss concentrating each ray's blend weights at one depth."""
import typing

import numpy as np

from surfacer.rendering import splatting


def depth_distortion_loss(
    records: "splatting.PixelRecords",
) -> typing.Tuple[float, np.ndarray, np.ndarray]:
    """
    Compute the pairwise depth spread of blend weights along each pixel ray.

    Per pixel, L = sum over pairs u' < u of w_u w_u' (rho_u - rho_u')^2,
    evaluated in closed form as W * B - A^2 with W = sum w, A = sum w rho and
    B = sum w rho^2. The loss is averaged over pixels that have at least one
    contribution.

    :return:
        The loss and its gradients with respect to each record's blend
        weight and intersection depth.
    """
    if len(records) == 0:
        return 0.0, np.zeros(0), np.zeros(0)

    pixels = records.pixels
    w, rho = records.weights, records.depths
    size = int(pixels.max()) + 1
    total_weight = np.bincount(pixels, w, minlength=size)
    first_moment = np.bincount(pixels, w * rho, minlength=size)
    second_moment = np.bincount(pixels, w * rho ** 2, minlength=size)
    covered = np.unique(pixels)
    per_pixel = total_weight * second_moment - first_moment ** 2
    count = float(len(covered))
    loss = float(np.sum(per_pixel[covered]) / count)

    W, A, B = total_weight[pixels], first_moment[pixels], second_moment[pixels]
    grad_weights = (B + W * rho ** 2 - 2.0 * A * rho) / count
    grad_depths = w * (2.0 * W * rho - 2.0 * A) / count
    return loss, grad_weights, grad_depths


def pixel_distortion(
    weights: typing.Sequence[float],
    depths: typing.Sequence[float],
) -> float:
    """Evaluate the pairwise sum for a single ray directly."""
    total = 0.0
    for u in range(len(weights)):
        for v in range(u):
            total += weights[u] * weights[v] * (depths[u] - depths[v]) ** 2
    return total
