"""scikit-learn style front end for the whole pipeline."""
from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from . import adversarial, circuits
from .encoding import StereographicEncoder
from .pca import PCA


def pca_components_for(n_qubits: int, n_samples: int, n_features: int) -> int:
    """Largest usable component count: ``2**n - 1`` capped by the data."""
    return min(circuits.generator_param_count(n_qubits), n_samples - 1, n_features)


class ReQGAN(BaseEstimator):
    """Adversarial generator over real-amplitude ``n_qubits`` states.

    ``fit`` compresses the images with PCA, scales and SI-encodes them, then
    plays the discriminator/generator game. ``generate`` decodes one image
    per training sample from the trained generator angles.

    Parameters
    ----------
    n_qubits : int
        Generator register size; the plane dimension is ``2**n_qubits - 1``.
    epochs, iters_per_epoch : int
        Game length and CMA-ES generations per agent per epoch.
    sigma0 : float
        Initial CMA-ES step size.
    scale_statistic : {"mean", "median", "max"}
    generator_mode : {"per_sample", "joint"}
    random_state : int
        Seed for initialization and every optimizer run.
    """

    def __init__(
        self,
        n_qubits=2,
        epochs=25,
        iters_per_epoch=500,
        sigma0=0.3 * math.pi,
        log_base=math.e,
        scale_statistic="mean",
        generator_mode="per_sample",
        warm_start=True,
        stagnation_tol=1e-12,
        stagnation_window=100,
        random_state=0,
    ):
        self.n_qubits = n_qubits
        self.epochs = epochs
        self.iters_per_epoch = iters_per_epoch
        self.sigma0 = sigma0
        self.log_base = log_base
        self.scale_statistic = scale_statistic
        self.generator_mode = generator_mode
        self.warm_start = warm_start
        self.stagnation_tol = stagnation_tol
        self.stagnation_window = stagnation_window
        self.random_state = random_state

    def _plane(self, X):
        Z = self.pca_.transform(X)
        pad = circuits.generator_param_count(self.n_qubits) - Z.shape[1]
        return np.pad(Z, ((0, 0), (0, pad)))

    def encode(self, X) -> np.ndarray:
        """Images to unit-sphere amplitude vectors of length ``2**n_qubits``."""
        check_is_fitted(self, "encoder_")
        return self.encoder_.transform(self._plane(check_array(X)))

    def fit(self, X, y=None, callback=None):
        X = check_array(X, dtype=float)
        if not 1 <= self.n_qubits <= 8:
            raise ValueError("n_qubits must be in 1..8")
        n, d = X.shape
        self.n_components_ = pca_components_for(self.n_qubits, n, d)
        self.pca_ = PCA(self.n_components_).fit(X)
        self.encoder_ = StereographicEncoder(self.scale_statistic).fit(self._plane(X))
        self.training_states_ = self.encoder_.transform(self._plane(X))
        self.config_ = adversarial.GameConfig(
            n=self.n_qubits,
            n_samples=n,
            epochs=self.epochs,
            iters_per_epoch=self.iters_per_epoch,
            seed=self.random_state,
            sigma0=self.sigma0,
            log_base=self.log_base,
            stagnation_tol=self.stagnation_tol,
            stagnation_window=self.stagnation_window,
            generator_mode=self.generator_mode,
            warm_start=self.warm_start,
        )
        state = adversarial.train(self.config_, self.training_states_, callback=callback)
        self.theta_D_ = state.theta_D
        self.theta_G_ = state.theta_G
        self.epochs_ = state.epochs
        self.log_ = state.log
        self.n_features_in_ = d
        return self

    def generate(self) -> np.ndarray:
        """Decoded images in ``[0, 1]``; north-pole samples are dropped."""
        check_is_fitted(self, "theta_G_")
        images, kept = adversarial.generate(
            self.theta_G_, self.pca_, self.encoder_.scale_, self.n_components_
        )
        self.generated_indices_ = kept
        return images

    def decision_function(self, X) -> np.ndarray:
        """Discriminator score of each image, in ``[-1, 1]``."""
        check_is_fitted(self, "theta_D_")
        M = adversarial.discriminator_observable(self.theta_D_)
        return adversarial.score_states(M, self.encode(X))

    def predict(self, X) -> np.ndarray:
        """``+1`` where the discriminator calls an image real, ``-1`` otherwise."""
        return np.where(self.decision_function(X) > 0, 1, -1)
