"""Small builders shared by the unit tests."""
import dataclasses

import numpy as np

from surfacer import fusing
from surfacer import optimizing
from surfacer import scenes
from surfacer.definitions import cameras
from surfacer.definitions import enumerations
from surfacer.definitions import gaussians


def make_cloud(
    count: int = 8,
    seed: int = 0,
    spread: float = 0.5,
) -> "gaussians.GaussianCloud":
    """Create a random cloud of unit-quaternion Gaussians around the origin."""
    rng = np.random.default_rng(seed)
    rotations = rng.normal(size=(count, 4))
    return gaussians.GaussianCloud(
        centers=rng.uniform(-spread, spread, size=(count, 3)),
        log_scales=np.log(rng.uniform(0.02, 0.1, size=(count, 3))),
        rotations=rotations / np.linalg.norm(rotations, axis=1, keepdims=True),
        opacity_logits=rng.normal(size=count),
        colors=rng.uniform(size=(count, 3)),
    )


def make_view(size: int = 16, name: str = "view") -> "cameras.CameraView":
    """Create a camera at the origin looking down the +z axis."""
    return cameras.CameraView(
        intrinsics=cameras.make_intrinsics(size, size, 60.0),
        rotation=np.eye(3),
        translation=np.zeros(3),
        width=size,
        height=size,
        name=name,
    )


def facing_cloud(depth: float = 2.0) -> "gaussians.GaussianCloud":
    """Create a single flat Gaussian facing a camera at the origin."""
    return gaussians.GaussianCloud(
        centers=np.array([[0.0, 0.0, depth]]),
        log_scales=np.log(np.array([[0.4, 0.4, 0.001]])),
        rotations=np.array([[1.0, 0.0, 0.0, 0.0]]),
        opacity_logits=np.array([2.0]),
        colors=np.array([[0.8, 0.4, 0.2]]),
    )


def tiny_scene(views: int = 4, size: int = 24) -> "scenes.AnalyticScene":
    """Create a traced sphere scene small enough for a few training iterations."""
    shape = scenes.AnalyticShape(kind=enumerations.ShapeKind.SPHERE, radius=0.5)
    rig = scenes.camera_rig(views, shape.center, 2.0, size, size, 50.0)
    return scenes.attach_ground_truth(
        scenes.AnalyticScene(shape=shape, views=tuple(rig))
    )


def tiny_config(**overrides) -> "optimizing.TrainConfig":
    """Create a training configuration exercising every stage within 6 iterations."""
    config = optimizing.TrainConfig(
        iterations=6,
        losses=optimizing.LossWeights(scp_start=1),
        densify=optimizing.DensifySettings(start_iter=3, interval=3),
        schedule=fusing.BandSchedule(
            update_interval=2, start_iter=2, stop_iter=4, sigma_sequence=(1.0, 0.5)
        ),
        grid=optimizing.GridSettings(resolution=24),
        init_count=200,
        init_mode=enumerations.InitMode.SURFACE,
        checkpoint_interval=3,
        chamfer_samples=1000,
    )
    return dataclasses.replace(config, **overrides)
