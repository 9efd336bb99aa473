"""Principal component analysis on top of the in-repo Jacobi eigensolver."""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .linalg import jacobi_eigh

_MAGIC = b"RQPCA001"


class PCA(TransformerMixin, BaseEstimator):
    """Centered PCA keeping the top ``n_components`` directions.

    When there are fewer samples than features the eigenproblem is solved on
    the ``N x N`` Gram matrix instead of the covariance. Each component is
    sign-normalized so its largest-magnitude entry is positive.

    Attributes
    ----------
    mean_ : ndarray of shape (n_features,)
    components_ : ndarray of shape (n_components, n_features)
        Orthonormal rows.
    explained_variance_ : ndarray of shape (n_components,)
        Sample variances along each component, descending.
    total_variance_ : float
    cev_ : float
        Cumulative explained variance, ``explained_variance_.sum() / total_variance_``.
    """

    def __init__(self, n_components=2):
        self.n_components = n_components

    def fit(self, X, y=None):
        X = check_array(X, dtype=float)
        n, d = X.shape
        k = self.n_components
        if n < 2:
            raise ValueError("PCA needs at least two samples")
        if not (isinstance(k, (int, np.integer)) and 1 <= k <= min(n - 1, d)):
            raise ValueError(f"n_components must be in 1..{min(n - 1, d)}, got {k!r}")
        mean = X.mean(axis=0)
        xc = X - mean
        total = float(np.sum(xc * xc)) / (n - 1)
        if total <= 0:
            raise ValueError("data has zero variance")
        if n < d:
            w, u = jacobi_eigh(xc @ xc.T)
            w, u = w[::-1][:k], u[:, ::-1][:, :k]
            if np.any(w <= 1e-12 * w[0]):
                raise ValueError("data rank is below n_components")
            comps = (xc.T @ u / np.sqrt(w)).T
        else:
            w, u = jacobi_eigh(xc.T @ xc)
            w, comps = w[::-1][:k], u[:, ::-1][:, :k].T
        w = np.clip(w, 0.0, None)
        pivot = np.abs(comps).argmax(axis=1)
        comps *= np.sign(comps[np.arange(k), pivot])[:, None]

        self.mean_ = mean
        self.components_ = np.ascontiguousarray(comps)
        self.explained_variance_ = w / (n - 1)
        self.total_variance_ = total
        self.cev_ = float(min(self.explained_variance_.sum() / total, 1.0))
        self.n_features_in_ = d
        return self

    def transform(self, X):
        check_is_fitted(self, "components_")
        X = check_array(X, dtype=float)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return (X - self.mean_) @ self.components_.T

    def inverse_transform(self, Z):
        check_is_fitted(self, "components_")
        Z = check_array(Z, dtype=float)
        if Z.shape[1] != len(self.components_):
            raise ValueError(f"expected {len(self.components_)} coefficients, got {Z.shape[1]}")
        return self.mean_ + Z @ self.components_


def save_pca(model: PCA, path) -> None:
    """Write a fitted model as little-endian binary.

    Layout: 8-byte magic ``RQPCA001``; uint32 ``k``; uint32 ``d``; float64
    total variance; then float64 arrays ``mean`` (d), ``components``
    (k x d, row-major) and ``explained_variance`` (k).
    """
    check_is_fitted(model, "components_")
    k, d = model.components_.shape
    with open(path, "wb") as fh:
        fh.write(_MAGIC + struct.pack("<IId", k, d, model.total_variance_))
        for arr in (model.mean_, model.components_, model.explained_variance_):
            fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_pca(path) -> PCA:
    raw = Path(path).read_bytes()
    if raw[:8] != _MAGIC:
        raise ValueError(f"{path}: not a PCA model file")
    k, d, total = struct.unpack_from("<IId", raw, 8)
    body = np.frombuffer(raw, dtype="<f8", offset=24)
    if body.size != d + k * d + k:
        raise ValueError(f"{path}: truncated PCA model")
    model = PCA(n_components=k)
    model.mean_ = body[:d].copy()
    model.components_ = body[d:d + k * d].reshape(k, d).copy()
    model.explained_variance_ = body[d + k * d:].copy()
    model.total_variance_ = total
    model.cev_ = float(min(model.explained_variance_.sum() / total, 1.0))
    model.n_features_in_ = d
    return model
