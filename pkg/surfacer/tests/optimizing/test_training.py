import pathlib

import numpy as np
import pytest

from surfacer import constraining
from surfacer import fusing
from surfacer import optimizing
from surfacer import scenes
from surfacer.definitions import enumerations
from surfacer.definitions import errors
from surfacer.tests import factories

SCENE = factories.tiny_scene()


def test_train_runs_every_stage(tmp_path: pathlib.Path):
    """Should update the prior, densify, constrain and write every artifact."""
    result = optimizing.train(SCENE, factories.tiny_config(), tmp_path, seed=1)
    assert len(result.trace) == 6
    assert result.counters["prior_update"] == 2
    assert result.counters["densify"] == 2
    assert result.counters["project"] == 2
    assert result.counters["remove"] == 2
    assert result.counters["scp"] > 0
    assert result.grid is not None
    assert len(result.state) == len(result.cloud)
    assert result.cloud.is_finite()

    for name in ("trace.csv", "final.tsdf", "mesh.ply", "metrics.yaml"):
        assert tmp_path.joinpath(name).exists(), name
    assert tmp_path.joinpath("checkpoints", "iter_000003.npz").exists()
    assert tmp_path.joinpath("checkpoints", "final.npz").exists()
    assert len(tmp_path.joinpath("priors.log").read_text().splitlines()) == 2
    assert len(tmp_path.joinpath("removals.log").read_text().splitlines()) == 2


def test_train_without_prior():
    """Should never touch the prior when it is disabled."""
    result = optimizing.train(SCENE, factories.tiny_config(use_prior=False))
    for name in ("prior_update", "project", "remove", "scp"):
        assert result.counters[name] == 0, name
    assert result.grid is None


def test_train_is_deterministic():
    """Should reproduce the same trace and Gaussians for the same seed."""
    first = optimizing.train(SCENE, factories.tiny_config(), seed=3)
    second = optimizing.train(SCENE, factories.tiny_config(), seed=3)
    assert first.trace == second.trace
    assert np.array_equal(first.cloud.centers, second.cloud.centers)


def test_train_needs_ground_truth():
    """Should refuse scenes whose views carry no rasters."""
    bare = SCENE.with_views([v.with_rasters(None, None, None) for v in SCENE.views])
    with pytest.raises(errors.InvalidInputError):
        optimizing.train(bare, factories.tiny_config())


def test_classification_fixed_between_events():
    """Should label Gaussians only when the prior changes or densification ran."""
    result = optimizing.train(SCENE, factories.tiny_config(iterations=8), seed=1)
    events = result.counters["prior_update"] + result.counters["densify"]
    assert result.counters["classify"] == events == 4
    assert result.counters["scp"] == 6


def test_opacity_loss_uses_given_classification():
    """Should keep the stored labels and distances while centers move."""
    lower, upper = SCENE.bounds
    layout = fusing.GridSpec.from_bounds(lower, upper, 24, 0.1)
    grid = fusing.TsdfGrid.from_function(
        layout,
        lambda p: np.linalg.norm(p, axis=-1) - 0.5,
        truncation=4 * layout.voxel_size,
    )
    cloud = scenes.init_gaussians(SCENE, 50, enumerations.InitMode.SURFACE, 0)
    classification = constraining.classify_cloud(grid, 0.3, cloud)
    assert classification.count(enumerations.BandLabel.ON_SURFACE) > 0

    moved = cloud.copy()
    moved.centers[:, 0] += 0.3
    config = factories.tiny_config()
    step = optimizing.compute_losses(
        moved, SCENE.views[0], None, config, 1, classification
    )
    expected, _ = constraining.scp_loss(moved, classification)
    assert expected > 0
    assert step.components.scp == pytest.approx(expected)

    moved_labels = constraining.classify_cloud(grid, 0.3, moved)
    assert not np.array_equal(moved_labels.labels, classification.labels)
