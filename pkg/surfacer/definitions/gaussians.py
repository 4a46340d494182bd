"""Gaussian primitive data structures module."""
import dataclasses
import typing

import numpy as np

from surfacer.definitions import errors

#: Names of the optimized parameter arrays in the order they are stored.
PARAMETER_NAMES = ("centers", "log_scales", "rotations", "opacity_logits", "colors")


def sigmoid(values: np.ndarray) -> np.ndarray:
    """Compute the logistic function in a numerically stable way."""
    values = np.asarray(values, dtype=np.float64)
    out = np.empty_like(values)
    positive = values >= 0
    out[positive] = 1.0 / (1.0 + np.exp(-values[positive]))
    exp_values = np.exp(values[~positive])
    out[~positive] = exp_values / (1.0 + exp_values)
    return out


def _stack(rows: typing.Sequence[typing.Any], width: int) -> np.ndarray:
    return np.array(rows, dtype=np.float64).reshape(-1, width)


def inverse_sigmoid(values: typing.Union[float, np.ndarray]) -> np.ndarray:
    """Map opacities in (0, 1) back to logits."""
    values = np.asarray(values, dtype=np.float64)
    return np.log(values / (1.0 - values))


@dataclasses.dataclass(frozen=True)
class Gaussian:
    """
    Single planar anisotropic 3D Gaussian.

    Scales are stored as logarithms and opacity as a logit so that
    unconstrained optimizer steps keep the activated values in their domains.
    """

    #: World position of the Gaussian center.
    center: np.ndarray
    #: Per-axis logarithm of the standard deviations in world units.
    log_scale: np.ndarray
    #: Unit quaternion (w, x, y, z) orienting the scale axes.
    rotation: np.ndarray
    #: Opacity before the sigmoid activation.
    opacity_logit: float
    #: Degree-0 RGB radiance in [0, 1].
    color: np.ndarray

    @property
    def scale(self) -> np.ndarray:
        """Get the activated, strictly positive standard deviations."""
        return np.exp(np.asarray(self.log_scale, dtype=np.float64))

    @property
    def opacity(self) -> float:
        """Get the activated opacity in the open interval (0, 1)."""
        return float(sigmoid(np.array([self.opacity_logit]))[0])


@dataclasses.dataclass(frozen=True)
class GaussianCloud:
    """
    Collection of Gaussians stored as aligned parameter arrays.

    The arrays are owned by the cloud and the optimizer updates them in place.
    Structural changes (densification, removal) always produce a new cloud.
    """

    centers: np.ndarray
    log_scales: np.ndarray
    rotations: np.ndarray
    opacity_logits: np.ndarray
    colors: np.ndarray

    def __post_init__(self):
        """Validate that every parameter array describes the same Gaussians."""
        count = len(self.centers)
        shapes = {
            "centers": (count, 3),
            "log_scales": (count, 3),
            "rotations": (count, 4),
            "opacity_logits": (count,),
            "colors": (count, 3),
        }
        for name, shape in shapes.items():
            if getattr(self, name).shape != shape:
                raise errors.InvalidInputError(
                    f'Parameter "{name}" has shape {getattr(self, name).shape}'
                    f" but {shape} was expected."
                )

    def __len__(self) -> int:
        """Get the number of Gaussians in the collection."""
        return len(self.centers)

    def __getitem__(self, index: int) -> "Gaussian":
        """Get a single Gaussian value from the collection."""
        return Gaussian(
            center=self.centers[index].copy(),
            log_scale=self.log_scales[index].copy(),
            rotation=self.rotations[index].copy(),
            opacity_logit=float(self.opacity_logits[index]),
            color=self.colors[index].copy(),
        )

    @property
    def scales(self) -> np.ndarray:
        """Get the activated standard deviations of every Gaussian."""
        return np.exp(self.log_scales)

    @property
    def opacities(self) -> np.ndarray:
        """Get the activated opacities of every Gaussian."""
        return sigmoid(self.opacity_logits)

    @property
    def parameters(self) -> typing.Dict[str, np.ndarray]:
        """Get the optimized arrays keyed by parameter name."""
        return {name: getattr(self, name) for name in PARAMETER_NAMES}

    def copy(self) -> "GaussianCloud":
        """Create a deep copy whose arrays are independent of this cloud."""
        return GaussianCloud(**{k: v.copy() for k, v in self.parameters.items()})

    def select(
        self,
        indices: typing.Union[np.ndarray, typing.Sequence[int]],
    ) -> "GaussianCloud":
        """Create a new cloud holding only the rows given by indices or a mask."""
        return GaussianCloud(
            **{k: np.ascontiguousarray(v[indices]) for k, v in self.parameters.items()}
        )

    def with_centers(self, centers: np.ndarray) -> "GaussianCloud":
        """Create a copy of this cloud with replaced center positions."""
        return dataclasses.replace(self.copy(), centers=np.asarray(centers, float))

    def is_finite(self) -> bool:
        """Determine whether every parameter value is finite."""
        return all(np.isfinite(v).all() for v in self.parameters.values())

    @classmethod
    def concatenate(cls, clouds: typing.Sequence["GaussianCloud"]) -> "GaussianCloud":
        """Join several clouds into one, preserving their order."""
        return cls(
            **{
                name: np.concatenate([getattr(c, name) for c in clouds], axis=0)
                for name in PARAMETER_NAMES
            }
        )

    @classmethod
    def from_gaussians(cls, gaussians: typing.Sequence["Gaussian"]) -> "GaussianCloud":
        """Assemble a cloud from individual Gaussian values."""
        return cls(
            centers=_stack([g.center for g in gaussians], 3),
            log_scales=_stack([g.log_scale for g in gaussians], 3),
            rotations=_stack([g.rotation for g in gaussians], 4),
            opacity_logits=np.array(
                [g.opacity_logit for g in gaussians], dtype=np.float64
            ),
            colors=_stack([g.color for g in gaussians], 3),
        )
