import numpy as np
import pytest

from surfacer import auditing
from surfacer import constraining
from surfacer.definitions import gaussians
from surfacer.tests import factories

BandLabel = constraining.BandLabel


def _classification(labels: list, values: list) -> "constraining.Classification":
    return constraining.Classification(
        labels=np.array([int(v) for v in labels]),
        values=np.array(values, dtype=float),
        delta=0.3,
    )


def test_scp_loss_targets():
    """Should pull on-surface opacity to one and off-surface opacity to zero."""
    cloud = factories.make_cloud(4)
    cloud.opacity_logits[:] = 0.0
    classification = _classification(
        [
            BandLabel.ON_SURFACE,
            BandLabel.OFF_SURFACE,
            BandLabel.OUTSIDE,
            BandLabel.UNOBSERVED,
        ],
        [0.0, 0.5, 1.0, 0.0],
    )
    loss, gradient = constraining.scp_loss(cloud, classification)
    expected = (0.25 + 0.25 / 1.5 ** 2) / 4
    assert loss == pytest.approx(expected)
    assert gradient[0] < 0 < gradient[1]
    assert gradient[2] == 0.0 and gradient[3] == 0.0


def test_scp_loss_minimum():
    """Should vanish when every labeled Gaussian meets its target."""
    cloud = factories.make_cloud(2)
    cloud.opacity_logits[:] = gaussians.inverse_sigmoid(np.array([1 - 1e-12, 1e-12]))
    classification = _classification(
        [BandLabel.ON_SURFACE, BandLabel.OFF_SURFACE], [0.1, 0.6]
    )
    loss, _ = constraining.scp_loss(cloud, classification)
    assert loss == pytest.approx(0.0, abs=1e-20)


def test_band_weights():
    """Should weigh Gaussians closer to the surface more."""
    weights = constraining.band_weights(np.array([0.0, -0.5, 1.0]))
    assert np.allclose(weights, [1.0, 1 / 2.25, 0.25])


def test_scp_gradient():
    """Should match finite differences of the opacity constraint."""
    result = auditing.audit_scp_gradient()
    assert result.passed, result.detail
