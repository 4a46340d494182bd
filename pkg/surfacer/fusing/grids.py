"""TSDF grid data structure, sampling and serialization."""
import dataclasses
import pathlib
import typing

import numpy as np

from surfacer.definitions import errors

#: File signature of serialized grids.
MAGIC = b"TSDF"

#: Default finite difference displacement in world units.
GRADIENT_EPSILON = 1e-4

_HEADER = np.dtype(
    [
        ("magic", "S4"),
        ("dims", "<u4", (3,)),
        ("origin", "<f8", (3,)),
        ("voxel_size", "<f8"),
        ("truncation", "<f8"),
    ]
)


@dataclasses.dataclass(frozen=True)
class GridSpec:
    """Placement and resolution of a voxel grid. The origin is voxel (0, 0, 0)."""

    origin: np.ndarray
    voxel_size: float
    dims: typing.Tuple[int, int, int]

    def __post_init__(self):
        """Validate the grid extent."""
        if self.voxel_size <= 0 or any(d < 2 for d in self.dims):
            raise errors.InvalidInputError(
                f"Grid of dims {self.dims} and voxel size {self.voxel_size}"
                " has no trilinear cells."
            )

    @property
    def axes(self) -> typing.Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Get the voxel center coordinates along each axis."""
        return typing.cast(
            typing.Tuple[np.ndarray, np.ndarray, np.ndarray],
            tuple(
                self.origin[a]
                + np.arange(self.dims[a], dtype=np.float64) * self.voxel_size
                for a in range(3)
            ),
        )

    @property
    def upper(self) -> np.ndarray:
        """Get the position of the last voxel center."""
        return self.origin + (np.asarray(self.dims) - 1) * self.voxel_size

    def voxel_center(self, i: int, j: int, k: int) -> typing.Tuple[float, float, float]:
        """Get one voxel center, evaluated exactly as the vectorized axes are."""
        return (
            float(self.origin[0] + i * self.voxel_size),
            float(self.origin[1] + j * self.voxel_size),
            float(self.origin[2] + k * self.voxel_size),
        )

    @classmethod
    def from_bounds(
        cls,
        lower: np.ndarray,
        upper: np.ndarray,
        resolution: int = 128,
        padding: float = 0.05,
    ) -> "GridSpec":
        """
        Create a cubic-voxel grid covering a padded bounding box.

        The longest padded axis receives the given resolution; shorter axes
        get as many voxels as needed to cover their extent.
        """
        lower = np.asarray(lower, dtype=np.float64)
        upper = np.asarray(upper, dtype=np.float64)
        extent = upper - lower
        if np.any(extent <= 0):
            raise errors.InvalidInputError("Grid bounds have zero extent.")

        pad = padding * extent
        lower = lower - pad
        extent = extent + 2 * pad
        voxel_size = float(extent.max() / (resolution - 1))
        dims = tuple(int(max(2, np.ceil(e / voxel_size - 1e-9) + 1)) for e in extent)
        center = lower + 0.5 * extent
        origin = center - 0.5 * (np.asarray(dims) - 1) * voxel_size
        return cls(
            origin=origin,
            voxel_size=voxel_size,
            dims=typing.cast(typing.Any, dims),
        )


@dataclasses.dataclass(frozen=True, eq=False)
class TsdfGrid:
    """
    Dense grid of normalized truncated signed distances.

    Values lie in [-1, 1]; voxels that were never observed carry weight 0 and
    value +1. Arrays are indexed [x, y, z].
    """

    spec: GridSpec
    values: np.ndarray
    weights: np.ndarray
    #: Metric truncation distance in world units.
    truncation: float

    def __post_init__(self):
        """Validate array shapes and value ranges."""
        if self.values.shape != tuple(self.spec.dims) or self.weights.shape != tuple(
            self.spec.dims
        ):
            raise errors.InvalidInputError("Grid arrays do not match the grid dims.")
        if self.truncation <= 0:
            raise errors.InvalidInputError("Grid truncation must be positive.")

    @property
    def origin(self) -> np.ndarray:
        """Get the world position of voxel (0, 0, 0)."""
        return self.spec.origin

    @property
    def voxel_size(self) -> float:
        """Get the voxel edge length in world units."""
        return self.spec.voxel_size

    @property
    def dims(self) -> typing.Tuple[int, int, int]:
        """Get the voxel counts per axis."""
        return self.spec.dims

    @property
    def observed_count(self) -> int:
        """Get the number of voxels with a non-zero fusion weight."""
        return int(np.count_nonzero(self.weights))

    @classmethod
    def from_values(
        cls,
        spec: GridSpec,
        values: np.ndarray,
        truncation: float,
        weights: typing.Optional[np.ndarray] = None,
    ) -> "TsdfGrid":
        """Create a grid from a value array, treating every voxel as observed."""
        values = np.clip(np.asarray(values, dtype=np.float64), -1.0, 1.0)
        if weights is None:
            weights = np.ones_like(values)
        return cls(
            spec=spec,
            values=values,
            weights=np.asarray(weights, float),
            truncation=truncation,
        )

    @classmethod
    def from_function(
        cls,
        spec: GridSpec,
        function: typing.Callable[[np.ndarray], np.ndarray],
        truncation: float,
    ) -> "TsdfGrid":
        """Create a fully observed grid by normalizing a metric signed distance."""
        x, y, z = np.meshgrid(*spec.axes, indexing="ij")
        distances = function(np.stack([x, y, z], axis=-1))
        return cls.from_values(spec, distances / truncation, truncation)


def _cell_coordinates(
    grid: "TsdfGrid",
    points: np.ndarray,
) -> typing.Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Get lower cell corners, in-cell fractions and inside flags of points."""
    continuous = (np.asarray(points, dtype=np.float64) - grid.origin) / grid.voxel_size
    dims = np.asarray(grid.dims)
    with np.errstate(invalid="ignore"):
        inside = np.all((continuous >= 0) & (continuous <= dims - 1), axis=-1)
    safe = np.where(np.isfinite(continuous), continuous, 0.0)
    corners = np.clip(np.floor(safe), 0, dims - 2).astype(np.int64)
    return corners, safe - corners, inside


def _corner_values(array: np.ndarray, corners: np.ndarray) -> np.ndarray:
    """Gather the 8 corner entries of each cell, shape (..., 2, 2, 2)."""
    i, j, k = corners[..., 0], corners[..., 1], corners[..., 2]
    return np.stack(
        [
            np.stack(
                [
                    np.stack([array[i + a, j + b, k + c] for c in (0, 1)], -1)
                    for b in (0, 1)
                ],
                -2,
            )
            for a in (0, 1)
        ],
        -3,
    )


def _blend(corners: np.ndarray, fractions: np.ndarray) -> np.ndarray:
    """Trilinearly blend gathered corner values with per-axis fractions."""
    fx, fy, fz = fractions[..., 0], fractions[..., 1], fractions[..., 2]
    c00 = corners[..., 0, 0, 0] * (1 - fz) + corners[..., 0, 0, 1] * fz
    c01 = corners[..., 0, 1, 0] * (1 - fz) + corners[..., 0, 1, 1] * fz
    c10 = corners[..., 1, 0, 0] * (1 - fz) + corners[..., 1, 0, 1] * fz
    c11 = corners[..., 1, 1, 0] * (1 - fz) + corners[..., 1, 1, 1] * fz
    c0 = c00 * (1 - fy) + c01 * fy
    c1 = c10 * (1 - fy) + c11 * fy
    return c0 * (1 - fx) + c1 * fx


def sample_points(
    grid: "TsdfGrid",
    points: np.ndarray,
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """
    Trilinearly sample normalized distances at points of shape (..., 3).

    :return:
        The sampled values, +1 outside the grid, and a flag per point telling
        whether any of its 8 support voxels was observed.
    """
    corners, fractions, inside = _cell_coordinates(grid, points)
    values = _blend(_corner_values(grid.values, corners), fractions)
    observed = np.any(_corner_values(grid.weights, corners) > 0, axis=(-1, -2, -3))
    return np.where(inside, values, 1.0), observed & inside


def contains_points(grid: "TsdfGrid", points: np.ndarray) -> np.ndarray:
    """Flag points of shape (..., 3) lying within the grid's voxel-center box."""
    return _cell_coordinates(grid, points)[2]


def sample_trilinear(grid: "TsdfGrid", point: np.ndarray) -> float:
    """Sample the normalized distance at one world point (+1 outside the grid)."""
    values, _ = sample_points(grid, np.asarray(point, dtype=np.float64)[None])
    return float(values[0])


def gradient_points(
    grid: "TsdfGrid",
    points: np.ndarray,
    epsilon: float = GRADIENT_EPSILON,
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """
    Compute central finite difference gradients at points of shape (N, 3).

    :return:
        Gradients of shape (N, 3) and a flag per point telling whether it lies
        far enough inside the grid for the stencil to be supported. Gradients of
        unsupported points are zero.
    """
    points = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    margin = epsilon + grid.voxel_size
    supported = np.all(
        (points - margin >= grid.origin) & (points + margin <= grid.spec.upper),
        axis=-1,
    )
    gradients = np.zeros_like(points)
    for axis in range(3):
        offset = np.zeros(3)
        offset[axis] = epsilon
        forward, _ = sample_points(grid, points + offset)
        backward, _ = sample_points(grid, points - offset)
        gradients[:, axis] = (forward - backward) / (2 * epsilon)
    gradients[~supported] = 0.0
    return gradients, supported


def gradient_fd(
    grid: "TsdfGrid",
    point: np.ndarray,
    epsilon: float = GRADIENT_EPSILON,
) -> np.ndarray:
    """Compute the finite difference gradient of the field at one point."""
    gradients, supported = gradient_points(grid, np.asarray(point)[None], epsilon)
    if not supported[0]:
        raise errors.GridBoundaryError(
            f"Point {point} is within {epsilon} + one voxel of the grid boundary."
        )
    return gradients[0]


def write_grid(grid: "TsdfGrid", path: typing.Union[str, pathlib.Path]) -> pathlib.Path:
    """
    Serialize the grid as little-endian binary.

    The layout is a header (magic, dims, origin, voxel size, truncation)
    followed by float64 values and float64 weights, x varying fastest, so a
    round trip is lossless.
    """
    header = np.zeros((), dtype=_HEADER)
    header["magic"] = MAGIC
    header["dims"] = grid.dims
    header["origin"] = grid.origin
    header["voxel_size"] = grid.voxel_size
    header["truncation"] = grid.truncation
    target = pathlib.Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_bytes(
        header.tobytes()
        + grid.values.astype("<f8").ravel(order="F").tobytes()
        + grid.weights.astype("<f8").ravel(order="F").tobytes()
    )
    return target


def read_grid(path: typing.Union[str, pathlib.Path]) -> "TsdfGrid":
    """Load a grid written by write_grid."""
    contents = pathlib.Path(path).read_bytes()
    header = np.frombuffer(contents[: _HEADER.itemsize], dtype=_HEADER)[0]
    if bytes(header["magic"]) != MAGIC:
        raise errors.InvalidInputError(f'File "{path}" is not a serialized TSDF grid.')

    dims = tuple(int(d) for d in header["dims"])
    count = int(np.prod(dims))
    body = np.frombuffer(contents[_HEADER.itemsize :], dtype="<f8")
    if body.size != 2 * count:
        raise errors.InvalidInputError(f'File "{path}" has a truncated grid body.')

    spec = GridSpec(
        origin=header["origin"].astype(np.float64),
        voxel_size=float(header["voxel_size"]),
        dims=typing.cast(typing.Any, dims),
    )
    return TsdfGrid(
        spec=spec,
        values=body[:count].astype(np.float64).reshape(dims, order="F"),
        weights=body[count:].astype(np.float64).reshape(dims, order="F"),
        truncation=float(header["truncation"]),
    )
