"""Geometry primitives shared by every other subpackage."""
from .planes import gaussian_plane  # noqa: F401
from .planes import normal_axes  # noqa: F401
from .planes import plane_normals  # noqa: F401
from .projections import project_point  # noqa: F401
from .projections import project_points  # noqa: F401
from .projections import transform_points  # noqa: F401
from .rotations import normalize_quaternions  # noqa: F401
from .rotations import quat_to_rotation  # noqa: F401
from .rotations import quaternions_backward  # noqa: F401
from .rotations import quaternions_to_rotations  # noqa: F401
