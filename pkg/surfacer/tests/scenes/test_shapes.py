import numpy as np
import pytest
from pytest import mark

from surfacer import scenes
from surfacer.definitions import enumerations
from surfacer.definitions import errors

ShapeKind = enumerations.ShapeKind


@mark.parametrize("kind", list(ShapeKind))
def test_surface_samples_on_zero_set(kind: "enumerations.ShapeKind"):
    """Should sample points lying on the zero level set of the shape."""
    shape = scenes.AnalyticShape(kind=kind)
    points = shape.sample_surface(500, np.random.default_rng(0))
    assert points.shape == (500, 3)
    assert np.max(np.abs(shape.sdf(points))) < 1e-6


@mark.parametrize("kind", list(ShapeKind))
def test_bounds_contain_surface(kind: "enumerations.ShapeKind"):
    """Should bound every surface point."""
    shape = scenes.AnalyticShape(kind=kind, center=np.array([0.2, -0.1, 0.3]))
    lower, upper = shape.bounds
    points = shape.sample_surface(500, np.random.default_rng(1))
    assert np.all(points >= lower - 1e-9) and np.all(points <= upper + 1e-9)


def test_sphere_normals():
    """Should point sphere normals radially outward."""
    shape = scenes.AnalyticShape(kind=ShapeKind.SPHERE, radius=0.5)
    points = np.array([[0.5, 0.0, 0.0], [0.0, 0.0, -0.5]])
    assert np.allclose(shape.normals(points), [[1, 0, 0], [0, 0, -1]], atol=1e-5)


def test_degenerate_shape():
    """Should reject shapes with non-positive dimensions."""
    with pytest.raises(errors.InvalidInputError):
        scenes.AnalyticShape(kind=ShapeKind.TORUS, major_radius=0.3, minor_radius=0.4)
