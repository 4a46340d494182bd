import numpy as np
import pytest
from pytest import mark

from surfacer.definitions import errors
from surfacer.definitions import gaussians
from surfacer.tests import factories


def test_cloud_shape_validation():
    """Should reject parameter arrays describing different Gaussian counts."""
    cloud = factories.make_cloud(4)
    with pytest.raises(errors.InvalidInputError):
        gaussians.GaussianCloud(
            centers=cloud.centers,
            log_scales=cloud.log_scales[:3],
            rotations=cloud.rotations,
            opacity_logits=cloud.opacity_logits,
            colors=cloud.colors,
        )


def test_cloud_select_and_concatenate():
    """Should keep rows in order when selecting and joining clouds."""
    cloud = factories.make_cloud(6)
    joined = gaussians.GaussianCloud.concatenate(
        [cloud.select([4, 1]), cloud.select([0])]
    )
    assert len(joined) == 3
    assert np.array_equal(joined.centers, cloud.centers[[4, 1, 0]])
    assert np.array_equal(joined.opacity_logits, cloud.opacity_logits[[4, 1, 0]])


def test_cloud_copy_is_independent():
    """Should not share arrays between a cloud and its copy."""
    cloud = factories.make_cloud(3)
    copied = cloud.copy()
    copied.centers[0] = 99.0
    assert not np.any(cloud.centers == 99.0)


def test_cloud_round_trip_gaussians():
    """Should rebuild an identical cloud from its individual Gaussians."""
    cloud = factories.make_cloud(5)
    rebuilt = gaussians.GaussianCloud.from_gaussians(
        [cloud[i] for i in range(len(cloud))]
    )
    for name in gaussians.PARAMETER_NAMES:
        assert np.array_equal(getattr(rebuilt, name), getattr(cloud, name))


def test_cloud_is_finite():
    """Should detect non-finite parameters."""
    cloud = factories.make_cloud(3)
    assert cloud.is_finite()
    cloud.colors[1, 2] = np.nan
    assert not cloud.is_finite()


@mark.parametrize("logit", [-40.0, -1.0, 0.0, 2.5, 40.0])
def test_sigmoid_inverse(logit: float):
    """Should map opacities back to the logits that produced them."""
    opacity = gaussians.sigmoid(np.array([logit]))
    assert 0.0 <= opacity[0] <= 1.0
    if abs(logit) < 30:
        assert gaussians.inverse_sigmoid(opacity)[0] == pytest.approx(logit)
