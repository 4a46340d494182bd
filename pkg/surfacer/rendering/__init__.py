"""Differentiable splatting renderer and the image-space losses built on it."""
from .distortion import depth_distortion_loss  # noqa: F401
from .homography import GeometryLoss  # noqa: F401
from .homography import Homography  # noqa: F401
from .homography import PlaneMaps  # noqa: F401
from .homography import compute_homography  # noqa: F401
from .homography import multiview_geom_loss  # noqa: F401
from .homography import nearest_neighbors  # noqa: F401
from .normals import depth_to_normal  # noqa: F401
from .normals import edge_weights  # noqa: F401
from .normals import normal_smooth_loss  # noqa: F401
from .photometric import PhotometricLoss  # noqa: F401
from .photometric import mae  # noqa: F401
from .photometric import rgb_loss  # noqa: F401
from .photometric import ssim  # noqa: F401
from .photometric import warped_ncc  # noqa: F401
from .rasters import read_pfm  # noqa: F401
from .rasters import read_png  # noqa: F401
from .rasters import write_pfm  # noqa: F401
from .rasters import write_png  # noqa: F401
from .splatting import PixelRecords  # noqa: F401
from .splatting import RenderGradients  # noqa: F401
from .splatting import RenderOutput  # noqa: F401
from .splatting import backward  # noqa: F401
from .splatting import render_view  # noqa: F401
from .splatting import render_views  # noqa: F401
