"""Training configuration assembled from the experiment configuration file."""
import argparse
import dataclasses
import typing

import numpy as np

from surfacer.definitions import configurations
from surfacer.definitions import enumerations
from surfacer.definitions import errors
from surfacer.fusing import scheduling


@dataclasses.dataclass(frozen=True)
class LearningRates:
    """Per-parameter Adam step sizes."""

    center: float = 1.6e-4
    #: Center rate reached at the last iteration; decays exponentially.
    center_final: float = 1.6e-6
    opacity: float = 0.05
    scale: float = 5e-3
    rotation: float = 1e-3
    color: float = 2.5e-3

    def at(
        self,
        iteration: int,
        iterations: int,
        spatial_scale: float = 1.0,
    ) -> typing.Dict[str, float]:
        """Get the step size of every parameter at an iteration."""
        t = float(np.clip(iteration / max(1, iterations), 0.0, 1.0))
        center = np.exp(np.log(self.center) * (1 - t) + np.log(self.center_final) * t)
        return {
            "centers": float(center * spatial_scale),
            "log_scales": self.scale,
            "rotations": self.rotation,
            "opacity_logits": self.opacity,
            "colors": self.color,
        }


@dataclasses.dataclass(frozen=True)
class LossWeights:
    """Weights of the loss components."""

    depth: float = 0.01
    normal_smooth: float = 0.1
    multiview: float = 0.1
    scp: float = 0.01
    #: Weight of the structural term inside the image reconstruction loss.
    beta: float = 0.2
    flatten: float = 1.0
    #: Iteration from which the normal, multi-view and NCC terms apply.
    geometry_from_iter: int = 0
    #: Iteration from which the opacity constraint applies.
    scp_start: int = 10000


@dataclasses.dataclass(frozen=True)
class DensifySettings:
    """Clone, split, prune and opacity reset parameters."""

    interval: int = 100
    start_iter: int = 500
    stop_iter: int = 15000
    gradient_threshold: float = 2e-4
    prune_opacity: float = 0.005
    min_gaussians: int = 16
    #: Fraction of the scene extent separating clone from split candidates.
    percent_dense: float = 0.01
    split_factor: float = 1.6
    #: Iterations between opacity resets; 0 disables them.
    opacity_reset_interval: int = 3000
    max_gaussians: typing.Optional[int] = None

    def fires_at(self, iteration: int) -> bool:
        """Whether a densification event happens at the iteration."""
        return (
            self.start_iter <= iteration <= self.stop_iter
            and iteration % self.interval == 0
        )

    def resets_at(self, iteration: int) -> bool:
        """Whether opacities are reset at the iteration."""
        return (
            self.opacity_reset_interval > 0
            and iteration < self.stop_iter
            and iteration % self.opacity_reset_interval == 0
        )


@dataclasses.dataclass(frozen=True)
class GridSettings:
    """Resolution and truncation of the fused prior grid."""

    resolution: int = 128
    padding: float = 0.05
    #: Base truncation expressed in voxel sizes.
    truncation_voxels: float = 4.0


@dataclasses.dataclass(frozen=True)
class TrainConfig:
    """Every knob of the training loop, with the published defaults."""

    iterations: int = 30000
    betas: typing.Tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-15
    learning_rates: LearningRates = dataclasses.field(default_factory=LearningRates)
    losses: LossWeights = dataclasses.field(default_factory=LossWeights)
    densify: DensifySettings = dataclasses.field(default_factory=DensifySettings)
    schedule: "scheduling.BandSchedule" = dataclasses.field(
        default_factory=scheduling.BandSchedule
    )
    grid: GridSettings = dataclasses.field(default_factory=GridSettings)
    use_prior: bool = True
    use_scp: bool = True
    use_remove: bool = True
    use_project: bool = True
    remove_unobserved: bool = False
    literal_projection: bool = False
    near: float = 0.01
    far: float = 100.0
    alpha_threshold: float = 0.5
    neighbors: int = 2
    init_count: int = 1000
    init_mode: "enumerations.InitMode" = enumerations.InitMode.RANDOM
    #: Iterations between checkpoints; 0 disables them.
    checkpoint_interval: int = 5000
    chamfer_samples: int = 100_000

    def __post_init__(self):
        """Validate weights, rates and schedule consistency."""
        rates = dataclasses.asdict(self.learning_rates).values()
        weights = [
            self.losses.depth,
            self.losses.normal_smooth,
            self.losses.multiview,
            self.losses.scp,
        ]
        if any(v <= 0 for v in rates) or any(w <= 0 for w in weights):
            raise errors.InvalidInputError(
                "Loss weights and learning rates must be positive."
            )
        if self.iterations <= 0 or self.schedule.stop_iter < self.schedule.start_iter:
            raise errors.InvalidInputError(
                "Training iterations or prior schedule are inconsistent."
            )
        if not 0.0 <= self.losses.beta <= 1.0:
            raise errors.InvalidInputError("Structural weight beta must lie in [0, 1].")

    @classmethod
    def from_configuration(
        cls,
        configuration: "configurations.Configuration",
    ) -> "TrainConfig":
        """Read the training configuration, with defaults for missing keys."""
        train = configuration.train
        rates = configuration.learning_rates
        losses = configuration.losses
        densify = configuration.densify
        prior = configuration.prior
        grid = configuration.grid
        defaults = cls()

        max_gaussians = densify.get("max_gaussians")
        schedule = scheduling.BandSchedule(
            update_interval=prior.get_int("interval", default=5000),
            start_iter=prior.get_int("start", default=5000),
            stop_iter=prior.get_int("stop", default=20000),
            sigma_sequence=prior.get_floats("sigmas", default=(1.0, 0.5, 0.25)),
            delta=prior.get_float("delta", default=0.3),
        ).with_max_updates(prior.get("max_updates"))

        return cls(
            iterations=train.get_int("iterations", default=defaults.iterations),
            betas=typing.cast(
                typing.Tuple[float, float],
                train.get_floats("betas", default=defaults.betas),
            ),
            eps=train.get_float("eps", default=defaults.eps),
            learning_rates=LearningRates(
                center=rates.get_float("center", default=1.6e-4),
                center_final=rates.get_float("center_final", default=1.6e-6),
                opacity=rates.get_float("opacity", default=0.05),
                scale=rates.get_float("scale", default=5e-3),
                rotation=rates.get_float("rotation", default=1e-3),
                color=rates.get_float("color", default=2.5e-3),
            ),
            losses=LossWeights(
                depth=losses.get_float("depth", default=0.01),
                normal_smooth=losses.get_float("normal_smooth", default=0.1),
                multiview=losses.get_float("multiview", default=0.1),
                scp=losses.get_float("scp", default=0.01),
                beta=losses.get_float("beta", default=0.2),
                flatten=losses.get_float("flatten", default=1.0),
                geometry_from_iter=losses.get_int("geometry_from_iter", default=0),
                scp_start=losses.get_int("scp_start", default=10000),
            ),
            densify=DensifySettings(
                interval=densify.get_int("interval", default=100),
                start_iter=densify.get_int("start", default=500),
                stop_iter=densify.get_int("stop", default=15000),
                gradient_threshold=densify.get_float(
                    "gradient_threshold", default=2e-4
                ),
                prune_opacity=densify.get_float("prune_opacity", default=0.005),
                min_gaussians=densify.get_int("min_gaussians", default=16),
                percent_dense=densify.get_float("percent_dense", default=0.01),
                split_factor=densify.get_float("split_factor", default=1.6),
                opacity_reset_interval=densify.get_int(
                    "opacity_reset_interval", default=3000
                ),
                max_gaussians=None if max_gaussians is None else int(max_gaussians),
            ),
            schedule=schedule,
            grid=GridSettings(
                resolution=grid.get_int("resolution", default=128),
                padding=grid.get_float("padding", default=0.05),
                truncation_voxels=grid.get_float("truncation_voxels", default=4.0),
            ),
            use_prior=prior.get_bool("enabled", default=True),
            use_scp=prior.get_bool("scp", default=True),
            use_remove=prior.get_bool("remove", default=True),
            use_project=prior.get_bool("project", default=True),
            remove_unobserved=prior.get_bool("remove_unobserved", default=False),
            literal_projection=prior.get_bool("literal_projection", default=False),
            near=train.get_float("near", default=defaults.near),
            far=train.get_float("far", default=defaults.far),
            alpha_threshold=train.get_float("alpha_threshold", default=0.5),
            neighbors=train.get_int("neighbors", default=2),
            init_count=train.get_int("init_count", default=1000),
            init_mode=enumerations.InitMode.from_value(train.get("init_mode")),
            checkpoint_interval=train.get_int("checkpoint_interval", default=5000),
            chamfer_samples=train.get_int("chamfer_samples", default=100_000),
        )

    def with_flags(self, arguments: argparse.Namespace) -> "TrainConfig":
        """Apply the ablation flags of a command line invocation."""
        config = self
        if getattr(arguments, "no_prior", False):
            config = dataclasses.replace(config, use_prior=False)
        if getattr(arguments, "no_scp", False):
            config = dataclasses.replace(config, use_scp=False)
        if getattr(arguments, "no_remove", False):
            config = dataclasses.replace(config, use_remove=False)
        if getattr(arguments, "no_project", False):
            config = dataclasses.replace(config, use_project=False)
        if getattr(arguments, "remove_unobserved", False):
            config = dataclasses.replace(config, remove_unobserved=True)
        if getattr(arguments, "literal_projection", False):
            config = dataclasses.replace(config, literal_projection=True)
        if (sigma := getattr(arguments, "bandwidth_fixed", None)) is not None:
            config = dataclasses.replace(
                config, schedule=config.schedule.with_fixed_bandwidth(float(sigma))
            )
        if (iterations := getattr(arguments, "iterations", None)) is not None:
            config = dataclasses.replace(config, iterations=int(iterations))
        return config
