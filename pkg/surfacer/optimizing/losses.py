"""Weighted combination of the training loss components."""
import dataclasses
import typing

import numpy as np

from surfacer.definitions import errors
from surfacer.definitions import gaussians
from surfacer.optimizing import settings


@dataclasses.dataclass(frozen=True)
class LossComponents:
    """Unweighted loss values of one iteration."""

    rgb: float = 0.0
    depth: float = 0.0
    normal_smooth: float = 0.0
    multiview: float = 0.0
    scp: float = 0.0
    flatten: float = 0.0

    def check_finite(self):
        """Raise a NonFiniteError naming the first non-finite component."""
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if not np.isfinite(value):
                raise errors.NonFiniteError(field.name, value)


def total_loss(
    components: "LossComponents",
    weights: "settings.LossWeights",
    iteration: typing.Optional[int] = None,
) -> float:
    """
    Combine L = L_rgb + l1 L_depth + l2 L_ns + l3 L_nm + l4 L_scp + l_flat L_flat.

    The opacity constraint contributes nothing before its start iteration
    when an iteration is given.
    """
    components.check_finite()
    scp = components.scp
    if iteration is not None and iteration < weights.scp_start:
        scp = 0.0
    return float(
        components.rgb
        + weights.depth * components.depth
        + weights.normal_smooth * components.normal_smooth
        + weights.multiview * components.multiview
        + weights.scp * scp
        + weights.flatten * components.flatten
    )


def flatten_loss(cloud: "gaussians.GaussianCloud") -> typing.Tuple[float, np.ndarray]:
    """
    Penalize the smallest scale of every Gaussian to keep them planar.

    :return:
        The mean smallest scale and its gradient with respect to the log scales.
    """
    count = len(cloud)
    if count == 0:
        return 0.0, np.zeros((0, 3))
    scales = cloud.scales
    axis = np.argmin(scales, axis=1)
    rows = np.arange(count)
    gradient = np.zeros_like(scales)
    gradient[rows, axis] = scales[rows, axis] / count
    return float(scales[rows, axis].mean()), gradient
