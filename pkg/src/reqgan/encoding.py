"""Inverse stereographic (SI) encoding between R^d and the unit sphere in R^(d+1).

The plane point ``u`` maps to ``v`` with ``v_i = 2 u_i / (|u|^2 + 1)`` and
``v_last = (|u|^2 - 1) / (|u|^2 + 1)``; decoding is ``u_i = v_i / (1 - v_last)``.
The north pole ``v_last = 1`` has no preimage.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

POLE_EPS = 1e-9


class NorthPoleError(ValueError):
    """Raised when decoding a point within ``POLE_EPS`` of the north pole."""


def si_encode(u) -> np.ndarray:
    """Map plane vectors (last axis) onto the unit sphere one dimension up."""
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise ValueError("si_encode needs finite input")
    sq = np.sum(u * u, axis=-1, keepdims=True)
    v = np.concatenate((2 * u, sq - 1), axis=-1) / (sq + 1)
    # absorb rounding so downstream unit-norm checks hold tightly
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def si_decode(v, *, eps: float = POLE_EPS) -> np.ndarray:
    """Inverse of :func:`si_encode`. Raises :class:`NorthPoleError` near the pole."""
    v = np.asarray(v, dtype=float)
    if v.shape[-1] < 2:
        raise ValueError("sphere vectors need at least two components")
    if not np.allclose(np.linalg.norm(v, axis=-1), 1.0, rtol=0, atol=1e-10):
        raise ValueError("si_decode needs unit-norm input")
    gap = 1 - v[..., -1:]
    if np.any(gap <= eps):
        raise NorthPoleError("point lies at the north pole; it has no finite preimage")
    return v[..., :-1] / gap


def fit_scale(dataset, statistic: str = "mean") -> float:
    """Global factor ``s`` such that ``s * u`` has unit typical norm.

    ``statistic`` picks the typical norm: ``"mean"`` (default), ``"median"``
    or ``"max"``.
    """
    data = np.atleast_2d(np.asarray(dataset, dtype=float))
    if data.size == 0:
        raise ValueError("fit_scale needs a non-empty dataset")
    norms = np.linalg.norm(data, axis=-1)
    reducers = {"mean": np.mean, "median": np.median, "max": np.max}
    try:
        typical = reducers[statistic](norms)
    except KeyError:
        raise ValueError(f"unknown scale statistic {statistic!r}") from None
    if not typical > 0:
        raise ValueError("cannot scale an all-zero dataset")
    return float(1.0 / typical)


class StereographicEncoder(TransformerMixin, BaseEstimator):
    """Scale plane vectors to unit typical norm, then SI-encode them.

    Parameters
    ----------
    statistic : {"mean", "median", "max"}
        Norm statistic used by :func:`fit_scale`.
    scale : float or None
        Fixed scale factor; if given, ``fit`` does not estimate one.
    """

    def __init__(self, statistic="mean", scale=None):
        self.statistic = statistic
        self.scale = scale

    def fit(self, X, y=None):
        X = check_array(X)
        self.scale_ = float(self.scale) if self.scale is not None else fit_scale(X, self.statistic)
        if not self.scale_ > 0:
            raise ValueError("scale must be positive")
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "scale_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return si_encode(self.scale_ * X)

    def inverse_transform(self, V):
        check_is_fitted(self, "scale_")
        return si_decode(check_array(V)) / self.scale_
