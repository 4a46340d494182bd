import numpy as np
import pytest

from surfacer import auditing
from surfacer import rendering
from surfacer.definitions import errors


def test_identical_images():
    """Should report no error and perfect similarity for identical images."""
    image = np.random.default_rng(0).uniform(size=(12, 12, 3))
    assert rendering.mae(image, image)[0] == 0.0
    assert rendering.ssim(image, image)[0] == pytest.approx(1.0)


def test_mae_gradient():
    """Should spread the sign of the difference over every entry."""
    rendered = np.full((2, 2, 3), 0.5)
    target = np.zeros((2, 2, 3))
    value, gradient = rendering.mae(rendered, target)
    assert value == pytest.approx(0.5)
    assert np.allclose(gradient, 1.0 / 12)


def test_ssim_gradient():
    """Should match finite differences of the structural similarity."""
    result = auditing.audit_ssim_gradient()
    assert result.passed, result.detail


def test_rgb_loss_without_correlation():
    """Should weight absolute and structural terms by beta and skip NCC."""
    rng = np.random.default_rng(1)
    rendered, target = rng.uniform(size=(12, 12, 3)), rng.uniform(size=(12, 12, 3))
    loss = rendering.rgb_loss(rendered, target, beta=0.2)
    expected = 0.8 * loss.mae + 0.2 * (1 - loss.ssim)
    assert loss.ncc == 1.0
    assert loss.total == pytest.approx(expected)


def test_size_mismatch():
    """Should reject images of different sizes."""
    with pytest.raises(errors.InvalidInputError):
        rendering.mae(np.zeros((4, 4, 3)), np.zeros((4, 5, 3)))
