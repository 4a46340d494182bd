import pathlib

import numpy as np
import pytest

from surfacer import scenes
from surfacer.definitions import configurations
from surfacer.definitions import enumerations
from surfacer.definitions import errors
from surfacer.tests import factories


def _configuration(directory: pathlib.Path, **scene) -> "configurations.Configuration":
    data = {"scene": {"views": 3, "width": 12, "height": 10, **scene}}
    data["output"] = {"cache_directory": "cache"}
    return configurations.Configuration(directory=directory, data=data)


def test_from_configuration():
    """Should build the configured shape and camera rig."""
    configuration = _configuration(
        pathlib.Path(), shape="box", half_extents=[0.3, 0.4, 0.5]
    )
    scene = scenes.from_configuration(configuration)
    assert scene.shape.kind == enumerations.ShapeKind.BOX
    assert len(scene.views) == 3
    assert (scene.views[0].width, scene.views[0].height) == (12, 10)
    assert all(scene.shape.sdf(v.center) > 0 for v in scene.views)


def test_unknown_shape():
    """Should reject unknown shape names."""
    with pytest.raises(errors.InvalidInputError):
        scenes.from_configuration(_configuration(pathlib.Path(), shape="teapot"))


def test_ground_truth_depth():
    """Should trace the sphere at its analytic depth along the optical axis."""
    scene = factories.tiny_scene(views=2, size=25)
    view = scene.views[0]
    center_depth = view.gt_depth[12, 12]
    assert center_depth == pytest.approx(1.5, abs=1e-2)
    assert view.gt_mask[12, 12]
    assert not view.gt_mask[0, 0]
    assert np.all(view.gt_depth[~view.gt_mask] == 0.0)


def test_ground_truth_cache(tmp_path: pathlib.Path):
    """Should reuse cached rasters bit for bit."""
    configuration = _configuration(tmp_path)
    fresh = scenes.load_configured_scene(configuration)
    assert len(list(tmp_path.joinpath("cache").glob("*.pfm"))) == 3
    cached = scenes.load_configured_scene(configuration)
    for a, b in zip(fresh.views, cached.views):
        assert np.array_equal(a.gt_depth, b.gt_depth)
        assert np.array_equal(a.gt_rgb, b.gt_rgb)


def test_scene_needs_two_views():
    """Should reject rigs with fewer than two cameras."""
    scene = factories.tiny_scene(views=2, size=8)
    with pytest.raises(errors.InvalidInputError):
        scene.with_views(scene.views[:1])
