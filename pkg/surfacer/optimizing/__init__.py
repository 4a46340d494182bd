"""Training loop, optimizer and density control."""
from .adam import OptimizerState  # noqa: F401
from .adam import adam_step  # noqa: F401
from .checkpoints import Checkpoint  # noqa: F401
from .checkpoints import TraceRow  # noqa: F401
from .checkpoints import load_checkpoint  # noqa: F401
from .checkpoints import read_trace  # noqa: F401
from .checkpoints import save_checkpoint  # noqa: F401
from .checkpoints import write_trace  # noqa: F401
from .densifying import DensifyResult  # noqa: F401
from .densifying import DensifyStats  # noqa: F401
from .densifying import densify  # noqa: F401
from .densifying import reset_opacity  # noqa: F401
from .losses import LossComponents  # noqa: F401
from .losses import flatten_loss  # noqa: F401
from .losses import total_loss  # noqa: F401
from .settings import DensifySettings  # noqa: F401
from .settings import GridSettings  # noqa: F401
from .settings import LearningRates  # noqa: F401
from .settings import LossWeights  # noqa: F401
from .settings import TrainConfig  # noqa: F401
from .training import TrainResult  # noqa: F401
from .training import compute_losses  # noqa: F401
from .training import evaluate_cloud  # noqa: F401
from .training import prior_spec  # noqa: F401
from .training import train  # noqa: F401
