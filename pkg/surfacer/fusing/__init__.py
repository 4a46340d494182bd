"""Subpackage maintaining the self-constrained prior as a fused TSDF grid."""
from .fusion import fuse_depth_maps  # noqa: F401
from .fusion import fuse_ground_truth  # noqa: F401
from .grids import GRADIENT_EPSILON  # noqa: F401
from .grids import GridSpec  # noqa: F401
from .grids import TsdfGrid  # noqa: F401
from .grids import gradient_fd  # noqa: F401
from .grids import gradient_points  # noqa: F401
from .grids import read_grid  # noqa: F401
from .grids import contains_points  # noqa: F401
from .grids import sample_points  # noqa: F401
from .grids import sample_trilinear  # noqa: F401
from .grids import write_grid  # noqa: F401
from .scheduling import BandSchedule  # noqa: F401
from .scheduling import maybe_update_prior  # noqa: F401
from .scheduling import render_depth_maps  # noqa: F401
