import numpy as np
import pytest

from surfacer import evaluating
from surfacer import fusing
from surfacer import scenes
from surfacer.definitions import enumerations
from surfacer.definitions import errors


def test_chamfer_identical_sets():
    """Should report zero distance between identical point sets."""
    points = np.random.default_rng(0).uniform(size=(50, 3))
    assert evaluating.chamfer_l1(points, points) == 0.0


def test_chamfer_shifted_sets():
    """Should average both directions of the nearest-neighbour distance."""
    points = np.array([[0.0, 0.0, 0.0], [10.0, 0.0, 0.0]])
    shifted = points + np.array([0.0, 0.0, 0.5])
    assert evaluating.chamfer_l1(points, shifted) == pytest.approx(0.5)


def test_chamfer_empty():
    """Should reject empty point sets."""
    with pytest.raises(errors.InvalidInputError):
        evaluating.chamfer_l1(np.zeros((0, 3)), np.zeros((4, 3)))


def test_psnr():
    """Should cap identical images and follow 10 log10(1 / MSE) otherwise."""
    image = np.full((4, 4, 3), 0.5)
    assert evaluating.psnr(image, image) == 99.0
    assert evaluating.psnr(image, image + 0.1) == pytest.approx(20.0)


def test_delta_sweep_exact_prior():
    """Should classify most samples correctly against an exact prior."""
    shape = scenes.AnalyticShape(kind=enumerations.ShapeKind.SPHERE, radius=0.5)
    spec = fusing.GridSpec.from_bounds(np.full(3, -0.5), np.full(3, 0.5), 48, 0.2)
    grid = fusing.TsdfGrid.from_function(
        spec, shape.sdf, truncation=4 * spec.voxel_size
    )
    rows = evaluating.delta_sweep(grid, shape, (0.5, 0.3), samples=2000)
    assert [r.delta for r in rows] == [0.5, 0.3]
    for row in rows:
        assert row.on_accuracy > 0.95
        assert row.off_accuracy > 0.95
        assert set(row.serialize()) == {"delta", "on_accuracy", "off_accuracy"}
