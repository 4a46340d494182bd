"""Shared enumerations module."""
import enum
import typing


class BandLabel(enum.IntEnum):
    """Position of a Gaussian center relative to the band of the prior."""

    ON_SURFACE = 0
    OFF_SURFACE = 1
    OUTSIDE = 2
    UNOBSERVED = 3


class ShapeKind(enum.Enum):
    """Enumeration of analytic scene shapes."""

    SPHERE = "sphere"
    BOX = "box"
    TORUS = "torus"


class InitMode(enum.Enum):
    """Enumeration of Gaussian initialization modes."""

    RANDOM = "random"
    SURFACE = "surface"

    @classmethod
    def from_value(cls, value: typing.Union["InitMode", str, None]) -> "InitMode":
        """Lookup the mode from its string value, defaulting to random."""
        key = typing.cast(str, getattr(value, "value", value) or "random")
        return {
            InitMode.RANDOM.value: InitMode.RANDOM,
            InitMode.SURFACE.value: InitMode.SURFACE,
        }.get(key.lower(), InitMode.RANDOM)
