import numpy as np
import pytest
from pytest import mark

from surfacer import geometry
from surfacer import scenes
from surfacer.definitions import enumerations
from surfacer.definitions import errors
from surfacer.tests import factories


@mark.parametrize("mode", ["random", "surface"])
def test_init_gaussians(mode: str):
    """Should create flattened Gaussians with the requested count."""
    scene = factories.tiny_scene(views=2, size=8)
    cloud = scenes.init_gaussians(scene, 64, mode=mode, seed=3)
    assert len(cloud) == 64
    assert cloud.is_finite()
    scales = cloud.scales
    assert np.allclose(scales[:, 2], 0.1 * scales[:, 0])
    assert np.all(geometry.normal_axes(cloud.log_scales) == 2)


def test_init_on_surface():
    """Should align plane normals with the surface normals."""
    scene = factories.tiny_scene(views=2, size=8)
    cloud = scenes.init_gaussians(scene, 32, mode=enumerations.InitMode.SURFACE)
    assert np.max(np.abs(scene.shape.sdf(cloud.centers))) < 1e-9
    alignment = np.abs(
        np.sum(
            geometry.plane_normals(cloud) * scene.shape.normals(cloud.centers), axis=1
        )
    )
    assert np.all(alignment > 0.999)


def test_init_random_inside_bounds():
    """Should spread random centers over the padded bounding box."""
    scene = factories.tiny_scene(views=2, size=8)
    cloud = scenes.init_gaussians(scene, 500, seed=1)
    lower, upper = scene.bounds
    assert np.all(cloud.centers >= lower - 0.05 * (upper - lower))
    assert np.all(cloud.centers <= upper + 0.05 * (upper - lower))


def test_init_is_seeded():
    """Should reproduce the same cloud for the same seed."""
    scene = factories.tiny_scene(views=2, size=8)
    a = scenes.init_gaussians(scene, 20, seed=5)
    b = scenes.init_gaussians(scene, 20, seed=5)
    assert np.array_equal(a.centers, b.centers)
    assert np.array_equal(a.rotations, b.rotations)


def test_init_too_few():
    """Should reject fewer than 16 Gaussians."""
    scene = factories.tiny_scene(views=2, size=8)
    with pytest.raises(errors.InvalidInputError):
        scenes.init_gaussians(scene, 15)


def test_chamfer_pointcloud():
    """Should sample exactly the requested count on the surface."""
    scene = factories.tiny_scene(views=2, size=8)
    points = scenes.chamfer_pointcloud(scene, samples=1000, seed=2)
    assert points.shape == (1000, 3)
    assert np.allclose(np.linalg.norm(points, axis=1), 0.5)
    with pytest.raises(errors.InvalidInputError):
        scenes.chamfer_pointcloud(scene, samples=999)
