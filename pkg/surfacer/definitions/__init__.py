"""Definitions subpackage containing shared data structures used throughout surfacer."""
from .abstracts import DataWrapper  # noqa: F401
from .abstracts import ConfiguredData  # noqa: F401
from .cameras import CameraView  # noqa: F401
from .cameras import Ray  # noqa: F401
from .cameras import look_at  # noqa: F401
from .cameras import make_intrinsics  # noqa: F401
from .configurations import Configuration  # noqa: F401
from .contexts import Context  # noqa: F401
from .enumerations import BandLabel  # noqa: F401
from .enumerations import InitMode  # noqa: F401
from .enumerations import ShapeKind  # noqa: F401
from .errors import CommandUsageError  # noqa: F401
from .errors import EmptyGaussianSetError  # noqa: F401
from .errors import GridBoundaryError  # noqa: F401
from .errors import InvalidInputError  # noqa: F401
from .errors import NonFiniteError  # noqa: F401
from .errors import SurfacerError  # noqa: F401
from .gaussians import Gaussian  # noqa: F401
from .gaussians import GaussianCloud  # noqa: F401
from .gaussians import PARAMETER_NAMES  # noqa: F401
from .gaussians import inverse_sigmoid  # noqa: F401
from .gaussians import sigmoid  # noqa: F401
