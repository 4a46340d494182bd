import pathlib

import numpy as np
import pytest

from surfacer import optimizing
from surfacer.definitions import errors
from surfacer.definitions import gaussians
from surfacer.tests import factories


def test_checkpoint_restores_state(tmp_path: pathlib.Path):
    """Should restore Gaussians, moments and counters exactly."""
    cloud = factories.make_cloud(5)
    state = optimizing.OptimizerState.zeros(cloud)
    optimizing.adam_step(
        cloud,
        {"centers": np.ones((5, 3))},
        state,
        {name: 0.01 for name in gaussians.PARAMETER_NAMES},
    )
    path = optimizing.save_checkpoint(tmp_path / "ckpt" / "a.npz", cloud, state, 42)

    loaded = optimizing.load_checkpoint(path)
    assert loaded.iteration == 42
    assert loaded.state.step == 1
    for name in gaussians.PARAMETER_NAMES:
        assert np.array_equal(getattr(loaded.cloud, name), getattr(cloud, name))
        assert np.array_equal(
            loaded.state.first_moments[name], state.first_moments[name]
        )
        assert np.array_equal(
            loaded.state.second_moments[name], state.second_moments[name]
        )


def test_checkpoint_version_mismatch(tmp_path: pathlib.Path):
    """Should refuse containers written with another format version."""
    path = tmp_path / "old.npz"
    np.savez(path, format_version=np.int64(0))
    with pytest.raises(errors.InvalidInputError):
        optimizing.load_checkpoint(path)


def test_checkpoint_missing(tmp_path: pathlib.Path):
    """Should raise a FileNotFoundError for missing checkpoints."""
    with pytest.raises(FileNotFoundError):
        optimizing.load_checkpoint(tmp_path / "missing.npz")


def test_trace_round_trip(tmp_path: pathlib.Path):
    """Should write exact floats and skip the metrics comment when reading."""
    rows = [
        optimizing.TraceRow(1, 0.1, 0.2, 0.3, 0.4, 0.0, 1.0 / 3.0, 100),
        optimizing.TraceRow(2, 0.05, 0.1, 0.2, 0.3, 0.01, 0.7, 120),
    ]
    path = optimizing.write_trace(tmp_path / "trace.csv", rows, {"chamfer_l1": 0.25})
    lines = path.read_text().splitlines()
    assert lines[0] == "iter,l_rgb,l_depth,l_ns,l_nm,l_scp,total,num_gaussians"
    assert lines[-1] == "# metrics chamfer_l1=0.25"
    assert optimizing.read_trace(path) == rows
