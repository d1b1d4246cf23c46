"""Flattening and standardized PCA reduction of range-azimuth maps."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionError

PCA_FORMAT_VERSION = 1
SCALE_FLOOR = 1e-12


def flatten(ra_map) -> np.ndarray:
    """Row-major (range-major) flattening of a map or 2-D array."""
    values = getattr(ra_map, "values", ra_map)
    return np.asarray(values, dtype=np.float64).reshape(-1)


@dataclass(frozen=True)
class PcaModel:
    mean: np.ndarray
    scale: np.ndarray
    components: np.ndarray               # (d, D), orthonormal rows
    explained_variance_ratio: np.ndarray

    @property
    def n_features(self) -> int:
        return self.mean.size

    @property
    def n_components(self) -> int:
        return self.components.shape[0]

    def transform(self, v) -> np.ndarray:
        return transform(self, v)

    def inverse_transform(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64)
        return (z @ self.components) * self.scale + self.mean

    def to_dict(self) -> dict:
        return {
            "version": PCA_FORMAT_VERSION,
            "n_features": self.n_features,
            "n_components": self.n_components,
            "mean": self.mean.tolist(),
            "scale": self.scale.tolist(),
            "components": self.components.reshape(-1).tolist(),
            "explained_variance_ratio": self.explained_variance_ratio.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PcaModel":
        if data.get("version") != PCA_FORMAT_VERSION:
            raise ValueError(f"unsupported PCA model version {data.get('version')!r}")
        D, d = int(data["n_features"]), int(data["n_components"])
        return cls(np.asarray(data["mean"], dtype=float),
                   np.asarray(data["scale"], dtype=float),
                   np.asarray(data["components"], dtype=float).reshape(d, D),
                   np.asarray(data["explained_variance_ratio"], dtype=float))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "PcaModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def fit_pca(training, variance_target: float = 0.99) -> PcaModel:
    """Fit standardization + PCA on training vectors only.

    Keeps the smallest number of components whose cumulative explained
    variance reaches ``variance_target``; never more than the numerical
    rank of the standardized data, so ``variance_target=1.0`` is lossless
    on the training set.
    """
    X = np.asarray(training, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionError("training data must be a 2-D array or list of equal-length vectors")
    n, D = X.shape
    if n < 2:
        raise ValueError("fit_pca needs at least 2 training vectors")
    if D == 0:
        raise DimensionError("feature vectors are empty")
    if not 0 < variance_target <= 1:
        raise ValueError("variance_target must lie in (0, 1]")

    mean = X.mean(axis=0)
    scale = np.maximum(X.std(axis=0), SCALE_FLOOR)
    Z = (X - mean) / scale
    _, s, Vt = np.linalg.svd(Z, full_matrices=False)
    tol = s.max() * max(n, D) * np.finfo(float).eps if s.size else 0.0
    rank = int(np.sum(s > tol))
    if rank == 0:
        raise ValueError("training data has zero variance after standardization")
    power = s[:rank] ** 2
    ratio = power / np.sum(s ** 2)
    cumulative = np.cumsum(ratio)
    d = int(np.searchsorted(cumulative, variance_target - 1e-12) + 1)
    d = min(d, rank)
    return PcaModel(mean, scale, Vt[:d].copy(), ratio[:d].copy())


def transform(model: PcaModel, v) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape[-1] != model.n_features:
        raise DimensionError(
            f"feature vector has length {v.shape[-1]}, model expects {model.n_features}")
    return ((v - model.mean) / model.scale) @ model.components.T
