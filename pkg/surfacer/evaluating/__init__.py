"""Mesh extraction and quantitative reconstruction metrics."""
from .meshing import Mesh  # noqa: F401
from .meshing import extract_mesh  # noqa: F401
from .meshing import read_ply  # noqa: F401
from .meshing import write_ply  # noqa: F401
from .metrics import chamfer_l1  # noqa: F401
from .metrics import psnr  # noqa: F401
from .sweeping import SweepRow  # noqa: F401
from .sweeping import delta_sweep  # noqa: F401
