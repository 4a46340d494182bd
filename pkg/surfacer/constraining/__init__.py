"""Geometry-aware constraints driven by the self-constrained prior."""
from .banding import BandLabel  # noqa: F401
from .banding import Classification  # noqa: F401
from .banding import RemovalReport  # noqa: F401
from .banding import classify  # noqa: F401
from .banding import classify_cloud  # noqa: F401
from .banding import classify_points  # noqa: F401
from .banding import remove_outliers  # noqa: F401
from .opacity import band_weights  # noqa: F401
from .opacity import scp_loss  # noqa: F401
from .projecting import project_to_surface  # noqa: F401
from .projecting import projection_steps  # noqa: F401
