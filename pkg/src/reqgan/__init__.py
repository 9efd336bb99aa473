"""Real-amplitude quantum GAN: simulator, ansätze, SI encoding, CMA-ES and the adversarial game."""

__version__ = "0.1.0"

from .adversarial import GameConfig, GameState, loss_discriminator, loss_generator, sigma, train
from .circuits import (
    CircuitTemplate,
    Gate,
    build_discriminator,
    build_generator,
    build_ucr,
    generator_state,
    state_to_params,
)
from .dataio import ImageSet, export_image, load_idx, select_subset
from .encoding import StereographicEncoder, si_decode, si_encode
from .estimator import ReQGAN
from .optimizer import CMAES, minimize, population_size
from .pca import PCA
from .simulator import apply_cx, apply_ry, expect_z, run_circuit

__all__ = [
    "CMAES", "PCA", "CircuitTemplate", "GameConfig", "GameState", "Gate", "ImageSet", "ReQGAN",
    "StereographicEncoder", "apply_cx", "apply_ry", "build_discriminator", "build_generator",
    "build_ucr", "expect_z", "export_image", "generator_state", "load_idx", "loss_discriminator",
    "loss_generator", "minimize", "population_size", "run_circuit", "select_subset", "si_decode",
    "si_encode", "sigma", "state_to_params", "train",
]
