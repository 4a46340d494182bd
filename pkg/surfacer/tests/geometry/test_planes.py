import numpy as np
from pytest import mark

from surfacer import geometry
from surfacer.definitions import gaussians
from surfacer.tests import factories


def _gaussian(log_scale: list) -> "gaussians.Gaussian":
    return gaussians.Gaussian(
        center=np.array([0.0, 0.0, 2.0]),
        log_scale=np.array(log_scale),
        rotation=np.array([1.0, 0.0, 0.0, 0.0]),
        opacity_logit=0.0,
        color=np.zeros(3),
    )


@mark.parametrize(
    "log_scale, expected",
    [
        ([0.0, -3.0, 0.0], [0.0, 1.0, 0.0]),
        ([-3.0, 0.0, 0.0], [1.0, 0.0, 0.0]),
        ([0.0, -1.0, -1.0], [0.0, 1.0, 0.0]),
    ],
)
def test_plane_normal_axis(log_scale: list, expected: list):
    """Should take the minimum scale axis, lowest index on ties."""
    normal, point = geometry.gaussian_plane(_gaussian(log_scale))
    assert np.allclose(normal, expected)
    assert np.allclose(point, [0.0, 0.0, 2.0])


def test_plane_faces_viewer():
    """Should flip the normal towards the facing position."""
    gaussian = _gaussian([0.0, 0.0, -3.0])
    normal, _ = geometry.gaussian_plane(gaussian, facing=np.zeros(3))
    assert np.allclose(normal, [0.0, 0.0, -1.0])


def test_cloud_normals_match_single():
    """Should agree with the per-Gaussian plane for every cloud member."""
    cloud = factories.make_cloud(count=6, seed=2)
    normals = geometry.plane_normals(cloud)
    for i in range(len(cloud)):
        normal, _ = geometry.gaussian_plane(cloud[i])
        assert np.allclose(normals[i], normal)
