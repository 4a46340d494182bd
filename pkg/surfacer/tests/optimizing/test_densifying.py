import dataclasses

import numpy as np
from pytest import mark

from surfacer import optimizing
from surfacer import rendering
from surfacer.definitions import gaussians
from surfacer.tests import factories

SETTINGS = optimizing.DensifySettings(
    gradient_threshold=1.0,
    prune_opacity=0.005,
    min_gaussians=1,
    percent_dense=0.1,
)


def _cloud() -> "gaussians.GaussianCloud":
    cloud = factories.make_cloud(3)
    cloud.log_scales[:] = np.log([[0.05] * 3, [0.5] * 3, [0.05] * 3])
    cloud.opacity_logits[:] = 0.0
    return cloud


def test_clone_and_split():
    """Should clone small and split large Gaussians above the gradient threshold."""
    cloud = _cloud()
    result = optimizing.densify(
        cloud, np.array([2.0, 2.0, 0.5]), SETTINGS, 1.0, np.random.default_rng(0)
    )
    assert (result.cloned, result.split, result.pruned) == (1, 1, 0)
    assert len(result.cloud) == 5
    assert list(result.sources) == [0, 2, -1, -1, -1]
    children = result.cloud.log_scales[3:]
    assert np.allclose(children, np.log(0.5 / 1.6))


def test_prune_keeps_floor():
    """Should prune transparent Gaussians but keep the most opaque floor."""
    cloud = _cloud()
    cloud.opacity_logits[:] = [-9.0, -8.0, -10.0]
    settings = dataclasses.replace(SETTINGS, min_gaussians=2)
    result = optimizing.densify(
        cloud, np.zeros(3), settings, 1.0, np.random.default_rng(0)
    )
    assert result.pruned == 1
    assert list(result.sources) == [0, 1]


def test_budget_limits_growth():
    """Should not grow the cloud beyond its configured maximum."""
    cloud = _cloud()
    settings = dataclasses.replace(SETTINGS, max_gaussians=4)
    result = optimizing.densify(
        cloud, np.array([2.0, 0.5, 3.0]), settings, 1.0, np.random.default_rng(0)
    )
    assert len(result.cloud) == 4
    assert result.cloned == 1


def test_reset_opacity():
    """Should clamp opacities and zero their moments."""
    cloud = _cloud()
    cloud.opacity_logits[:] = [3.0, -6.0, 0.0]
    state = optimizing.OptimizerState.zeros(cloud)
    state.first_moments["opacity_logits"][:] = 1.0
    optimizing.reset_opacity(cloud, state)
    assert np.all(cloud.opacities <= 0.01 + 1e-12)
    assert cloud.opacity_logits[1] == -6.0
    assert np.all(state.first_moments["opacity_logits"] == 0.0)


@mark.parametrize(
    "iteration, fires, resets",
    [
        (400, False, False),
        (500, True, False),
        (3000, True, True),
        (15100, False, False),
    ],
)
def test_schedule(iteration: int, fires: bool, resets: bool):
    """Should densify and reset on their configured intervals."""
    settings = optimizing.DensifySettings()
    assert settings.fires_at(iteration) == fires
    assert settings.resets_at(iteration) == resets


def test_stats_accumulate_visible_only():
    """Should accumulate gradients only for Gaussians a render touched."""
    cloud = factories.facing_cloud(2.0)
    hidden = factories.facing_cloud(-3.0)
    both = gaussians.GaussianCloud.concatenate([cloud, hidden])
    output = rendering.render_view(both, factories.make_view())
    stats = optimizing.DensifyStats.zeros(2)
    stats.add(np.ones((2, 3)), output)
    means = stats.means()
    assert means[0] > 0
    assert means[1] == 0.0
