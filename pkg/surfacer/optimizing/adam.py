"""Bias-corrected Adam over the Gaussian parameter arrays."""
import collections
import dataclasses
import typing

import numpy as np

from surfacer.definitions import errors
from surfacer.definitions import gaussians
from surfacer.geometry import rotations

#: Colors are kept in the displayable range after every step.
COLOR_RANGE = (0.0, 1.0)


@dataclasses.dataclass
class OptimizerState:
    """
    First and second moment accumulators aligned row by row with a Gaussian cloud.

    The state is mutable: moments are updated in place by every step and
    rebuilt by remap whenever the cloud changes structure.
    """

    first_moments: typing.Dict[str, np.ndarray]
    second_moments: typing.Dict[str, np.ndarray]
    step: int = 0
    #: Number of parameter rows whose update was skipped, keyed by parameter.
    skipped: typing.Counter[str] = dataclasses.field(
        default_factory=collections.Counter
    )

    def __len__(self) -> int:
        """Get the number of Gaussians the accumulators describe."""
        return len(self.first_moments["centers"])

    @classmethod
    def zeros(cls, cloud: "gaussians.GaussianCloud") -> "OptimizerState":
        """Create an empty state for a cloud."""
        return cls(
            first_moments={k: np.zeros_like(v) for k, v in cloud.parameters.items()},
            second_moments={k: np.zeros_like(v) for k, v in cloud.parameters.items()},
        )

    def remap(self, sources: np.ndarray) -> "OptimizerState":
        """
        Rebuild the accumulators after a structural change of the cloud.

        :param sources:
            For every Gaussian of the new cloud, the row of the old cloud it
            inherits moments from, or -1 for a fresh Gaussian with zero moments.
        """
        sources = np.asarray(sources, dtype=np.int64)
        fresh = sources < 0
        safe = np.where(fresh, 0, sources)

        def rebuild(values: np.ndarray) -> np.ndarray:
            if len(values) == 0:
                return np.zeros((len(sources),) + values.shape[1:])
            out = values[safe].copy()
            out[fresh] = 0.0
            return out

        return OptimizerState(
            first_moments={k: rebuild(v) for k, v in self.first_moments.items()},
            second_moments={k: rebuild(v) for k, v in self.second_moments.items()},
            step=self.step,
            skipped=collections.Counter(self.skipped),
        )

    def reset(self, name: str, rows: typing.Optional[np.ndarray] = None):
        """Zero the moments of one parameter, optionally for some rows only."""
        selection = slice(None) if rows is None else rows
        self.first_moments[name][selection] = 0.0
        self.second_moments[name][selection] = 0.0


def adam_step(
    cloud: "gaussians.GaussianCloud",
    grads: typing.Dict[str, np.ndarray],
    state: "OptimizerState",
    learning_rates: typing.Dict[str, float],
    betas: typing.Tuple[float, float] = (0.9, 0.999),
    eps: float = 1e-15,
) -> "OptimizerState":
    """
    Apply one bias-corrected Adam update to the cloud in place.

    Rows whose gradient is not finite keep their parameters and moments
    untouched and are counted in state.skipped. Quaternions are renormalized
    and colors clipped to [0, 1] after the update.
    """
    if len(state) != len(cloud):
        raise errors.InvalidInputError(
            f"Optimizer state has {len(state)} rows but the cloud has {len(cloud)}."
        )

    beta1, beta2 = betas
    state.step += 1
    bias1 = 1.0 - beta1 ** state.step
    bias2 = 1.0 - beta2 ** state.step

    for name, values in cloud.parameters.items():
        gradient = grads.get(name)
        if gradient is None:
            continue
        gradient = np.asarray(gradient, dtype=np.float64)
        if gradient.shape != values.shape:
            raise errors.InvalidInputError(
                f'Gradient of "{name}" has shape {gradient.shape},'
                f" expected {values.shape}."
            )

        rows_ok = np.isfinite(gradient.reshape(len(values), -1)).all(axis=1)
        if not rows_ok.all():
            state.skipped[name] += int(np.count_nonzero(~rows_ok))
        ok = rows_ok.reshape((-1,) + (1,) * (values.ndim - 1))
        gradient = np.where(ok, gradient, 0.0)

        m = state.first_moments[name]
        v = state.second_moments[name]
        m[:] = np.where(ok, beta1 * m + (1.0 - beta1) * gradient, m)
        v[:] = np.where(ok, beta2 * v + (1.0 - beta2) * gradient * gradient, v)

        update = learning_rates[name] * (m / bias1) / (np.sqrt(v / bias2) + eps)
        values -= np.where(ok, update, 0.0)

    cloud.rotations[:] = rotations.normalize_quaternions(cloud.rotations)
    np.clip(cloud.colors, *COLOR_RANGE, out=cloud.colors)
    return state
