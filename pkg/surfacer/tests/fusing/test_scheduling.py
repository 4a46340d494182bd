import numpy as np
import pytest
from pytest import mark

from surfacer import fusing
from surfacer.definitions import errors
from surfacer.tests import factories

SCHEDULE = fusing.BandSchedule(
    update_interval=500,
    start_iter=1000,
    stop_iter=2000,
    sigma_sequence=(1.0, 0.5, 0.25),
)


@mark.parametrize(
    "iteration, expected",
    [(999, None), (1000, 1.0), (1250, None), (1500, 0.5), (2000, 0.25), (2500, None)],
)
def test_sigma_at(iteration: int, expected: float):
    """Should scale the band once per scheduled update."""
    assert SCHEDULE.sigma_at(iteration) == expected


def test_fixed_bandwidth():
    """Should keep the same band scaling for every update."""
    schedule = SCHEDULE.with_fixed_bandwidth(1.0)
    assert [schedule.sigma_at(i) for i in schedule.update_iterations] == [1.0, 1.0, 1.0]


def test_max_updates():
    """Should drop updates beyond the requested count."""
    assert SCHEDULE.with_max_updates(1).update_iterations == [1000]
    assert SCHEDULE.with_max_updates(None).update_iterations == [1000, 1500, 2000]


@mark.parametrize(
    "kwargs",
    [
        {"update_interval": 0},
        {"delta": 1.0},
        {"sigma_sequence": (0.5, 1.0)},
        {"sigma_sequence": (1.0, -0.5)},
    ],
)
def test_invalid_schedule(kwargs: dict):
    """Should reject inconsistent schedules."""
    with pytest.raises(errors.InvalidInputError):
        fusing.BandSchedule(**kwargs)


def test_maybe_update_prior():
    """Should fuse only at scheduled iterations, scaling the truncation."""
    view = factories.make_view()
    cloud = factories.facing_cloud()
    spec = fusing.GridSpec(
        origin=np.array([-0.2, -0.2, 1.5]), voxel_size=0.05, dims=(9, 9, 21)
    )
    skipped = fusing.maybe_update_prior(
        SCHEDULE, 1100, cloud, [view], spec, 0.2, 0.01, 100.0
    )
    assert skipped is None

    grid = fusing.maybe_update_prior(
        SCHEDULE, 1500, cloud, [view], spec, 0.2, 0.01, 100.0
    )
    assert grid is not None
    assert grid.truncation == pytest.approx(0.1)
    assert grid.observed_count > 0
