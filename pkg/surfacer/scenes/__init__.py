"""Analytic synthetic scenes with exact ground truth."""
from .building import AnalyticScene  # noqa: F401
from .building import Checker  # noqa: F401
from .building import camera_rig  # noqa: F401
from .building import from_configuration  # noqa: F401
from .caching import load_configured_scene  # noqa: F401
from .caching import load_ground_truth  # noqa: F401
from .sampling import chamfer_pointcloud  # noqa: F401
from .sampling import init_gaussians  # noqa: F401
from .shapes import AnalyticShape  # noqa: F401
from .tracing import attach_ground_truth  # noqa: F401
from .tracing import render_ground_truth  # noqa: F401
from .tracing import sphere_trace  # noqa: F401
