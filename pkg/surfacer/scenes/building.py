"""Analytic scene definitions, camera rigs and configuration loading."""
import dataclasses
import typing

import numpy as np

from surfacer.definitions import abstracts
from surfacer.definitions import cameras
from surfacer.definitions import configurations
from surfacer.definitions import enumerations
from surfacer.definitions import errors
from surfacer.scenes import shapes

DEFAULT_COLORS = ((0.9, 0.85, 0.8), (0.25, 0.35, 0.6))


@dataclasses.dataclass(frozen=True)
class Checker:
    """Procedural 3D checkerboard albedo."""

    period: float = 0.25
    colors: typing.Tuple[typing.Tuple[float, float, float], ...] = DEFAULT_COLORS

    def albedo(self, points: np.ndarray) -> np.ndarray:
        """Get the albedo at world points of shape (..., 3)."""
        cells = np.floor(np.asarray(points, float) / self.period).astype(np.int64)
        parity = np.sum(cells, axis=-1) % 2
        palette = np.asarray(self.colors, dtype=np.float64)
        return palette[parity]


@dataclasses.dataclass(frozen=True, eq=False)
class AnalyticScene:
    """Analytic shape with its texture and the cameras observing it."""

    shape: "shapes.AnalyticShape"
    views: typing.Tuple["cameras.CameraView", ...]
    checker: "Checker" = dataclasses.field(default_factory=Checker)
    background: np.ndarray = dataclasses.field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        """Validate the camera rig."""
        if len(self.views) < 2:
            raise errors.InvalidInputError("A scene needs at least 2 views.")
        centers = np.stack([v.center for v in self.views])
        if np.any(self.shape.sdf(centers) <= 0):
            raise errors.InvalidInputError("Every camera must lie outside the shape.")

    @property
    def bounds(self) -> typing.Tuple[np.ndarray, np.ndarray]:
        """Get the bounding box of the shape."""
        return self.shape.bounds

    @property
    def extent(self) -> float:
        """Get the length of the bounding box diagonal."""
        lower, upper = self.bounds
        return float(np.linalg.norm(upper - lower))

    def with_views(
        self,
        views: typing.Sequence["cameras.CameraView"],
    ) -> "AnalyticScene":
        """Create a copy of the scene observed by other views."""
        return dataclasses.replace(self, views=tuple(views))


def fibonacci_directions(count: int) -> np.ndarray:
    """Spread unit directions evenly over the sphere."""
    index = np.arange(count, dtype=np.float64) + 0.5
    y = 1.0 - 2.0 * index / count
    radius = np.sqrt(1.0 - y ** 2)
    angle = np.pi * (3.0 - np.sqrt(5.0)) * index
    return np.stack([radius * np.cos(angle), y, radius * np.sin(angle)], axis=1)


def camera_rig(
    count: int,
    target: np.ndarray,
    distance: float,
    width: int,
    height: int,
    fov_degrees: float,
) -> typing.List["cameras.CameraView"]:
    """Place cameras on a sphere around a target, all looking at it."""
    intrinsics = cameras.make_intrinsics(width, height, fov_degrees)
    views = []
    for i, direction in enumerate(fibonacci_directions(count)):
        rotation, translation = cameras.look_at(target + distance * direction, target)
        views.append(
            cameras.CameraView(
                intrinsics=intrinsics,
                rotation=rotation,
                translation=translation,
                width=width,
                height=height,
                name=f"view_{i:03d}",
            )
        )
    return views


def _vector(
    section: "abstracts.DataWrapper",
    key: str,
    default: typing.Sequence[float],
) -> np.ndarray:
    """Read a float vector from a scene section."""
    return np.asarray(section.get_floats(key, default=default), dtype=np.float64)


def shape_from_section(section: "abstracts.DataWrapper") -> "shapes.AnalyticShape":
    """Create the analytic shape described by a scene section."""
    kind = section.get("shape", default="sphere")
    try:
        shape_kind = enumerations.ShapeKind(str(kind).lower())
    except ValueError:
        raise errors.InvalidInputError(f'Unknown scene shape "{kind}".') from None

    return shapes.AnalyticShape(
        kind=shape_kind,
        center=_vector(section, "center", (0.0, 0.0, 0.0)),
        radius=section.get_float("radius", default=1.0),
        half_extents=_vector(section, "half_extents", (0.7, 0.7, 0.7)),
        major_radius=section.get_float("major_radius", default=1.0),
        minor_radius=section.get_float("minor_radius", default=0.35),
    )


def from_configuration(
    configuration: "configurations.Configuration",
) -> "AnalyticScene":
    """Create the scene described by the configuration's scene section."""
    section = configuration.scene
    shape = shape_from_section(section)
    colors = section.get("colors", default=None) or DEFAULT_COLORS
    views = camera_rig(
        count=section.get_int("views", default=20),
        target=shape.center,
        distance=section.get_float(
            "camera_distance", default=3.0 * shape.scale / np.sqrt(3)
        ),
        width=section.get_int("width", default=96),
        height=section.get_int("height", default=96),
        fov_degrees=section.get_float("fov", default=60.0),
    )
    return AnalyticScene(
        shape=shape,
        views=tuple(views),
        checker=Checker(
            period=section.get_float("checker_period", default=0.25),
            colors=tuple(tuple(float(v) for v in c) for c in colors),
        ),
        background=_vector(section, "background", (0.0, 0.0, 0.0)),
    )
