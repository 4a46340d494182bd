import numpy as np
import pytest

from surfacer import geometry
from surfacer.tests import factories


def test_project_on_axis():
    """Should project a point on the optical axis onto the principal point."""
    view = factories.make_view(size=17)
    pixel, depth = geometry.project_point(
        view.intrinsics, view.rotation, view.translation, np.array([0.0, 0.0, 3.0])
    )
    assert np.allclose(pixel, [8.0, 8.0])
    assert depth == pytest.approx(3.0)


def test_project_pixel_directions():
    """Should send points along a pixel direction back to that pixel."""
    view = factories.make_view(size=9)
    points = 2.5 * view.pixel_directions
    pixels, depths = geometry.project_points(
        view.intrinsics, view.rotation, view.translation, points
    )
    rows, columns = np.mgrid[0:9, 0:9]
    assert np.allclose(pixels[..., 0], columns)
    assert np.allclose(pixels[..., 1], rows)
    assert np.allclose(depths, 2.5)


def test_transform_points():
    """Should apply rotation then translation."""
    rotation = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    local = geometry.transform_points(
        rotation, np.array([0.0, 0.0, 1.0]), np.ones((2, 3))
    )
    assert np.allclose(local, [[-1.0, 1.0, 2.0], [-1.0, 1.0, 2.0]])
