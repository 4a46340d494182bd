"""Opacity loss driving on-surface Gaussians opaque and off-surface ones transparent."""
import typing

import numpy as np

from surfacer.constraining import banding
from surfacer.definitions import enumerations
from surfacer.definitions import errors
from surfacer.definitions import gaussians


def band_weights(values: np.ndarray) -> np.ndarray:
    """Get the per-Gaussian weight 1 / (1 + |s|)^2."""
    return 1.0 / (1.0 + np.abs(values)) ** 2


def scp_loss(
    cloud: "gaussians.GaussianCloud",
    classification: "banding.Classification",
) -> typing.Tuple[float, np.ndarray]:
    """
    Compute the opacity constraint and its gradient with respect to opacity logits.

    L = (1/M) [sum_on e (o - 1)^2 + sum_off e o^2] with e = 1/(1 + |s|)^2 and M
    the total Gaussian count. OUTSIDE and UNOBSERVED Gaussians contribute
    nothing. The sampled distances s are constants.
    """
    count = len(cloud)
    if count == 0:
        raise errors.InvalidInputError(
            "The opacity constraint needs at least one Gaussian."
        )
    if len(classification) != count:
        raise errors.InvalidInputError(
            "Classification does not match the Gaussian count."
        )

    labels = classification.labels
    on = labels == enumerations.BandLabel.ON_SURFACE
    off = labels == enumerations.BandLabel.OFF_SURFACE
    opacities = cloud.opacities
    weights = band_weights(classification.values)
    targets = np.where(on, 1.0, 0.0)
    active = on | off

    residuals = np.where(active, opacities - targets, 0.0)
    loss = float(np.sum(weights * residuals ** 2) / count)
    gradient = 2.0 * weights * residuals * opacities * (1.0 - opacities) / count
    return loss, gradient
