"""Train / evaluate the classifier on a persisted dataset."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dataset import DatasetManifest, split
from .features import PcaModel, fit_pca
from .svm import (ConfusionMatrix, GridSearchResult, Kernel, SvmModel, default_grid, evaluate,
                  fit_ovo, grid_search_cv)

BUNDLE_VERSION = 1
DEFAULT_TRAIN_FRACTION = 0.8
DEFAULT_VARIANCE_TARGET = 0.99
DEFAULT_FOLDS = 5


@dataclass
class ClassifierBundle:
    pca: PcaModel
    svm: SvmModel
    split_seed: int
    train_fraction: float
    dataset_config_hash: str
    cv_score: float = None
    cv_scores: list = field(default_factory=list)

    def to_dict(self) -> dict:
        svm = self.svm.to_dict()
        svm["pca_hash"] = self.pca.hash()
        return {
            "version": BUNDLE_VERSION,
            "split_seed": self.split_seed,
            "train_fraction": self.train_fraction,
            "dataset_config_hash": self.dataset_config_hash,
            "cv_score": self.cv_score,
            "cv_scores": self.cv_scores,
            "pca": self.pca.to_dict(),
            "svm": svm,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "ClassifierBundle":
        data = json.loads(Path(path).read_text())
        if data.get("version") != BUNDLE_VERSION:
            raise ValueError(f"unsupported model bundle version {data.get('version')!r}")
        pca = PcaModel.from_dict(data["pca"])
        if data["svm"].get("pca_hash") != pca.hash():
            raise ValueError("model bundle PCA hash mismatch")
        return cls(pca, SvmModel.from_dict(data["svm"]), data["split_seed"],
                   data["train_fraction"], data["dataset_config_hash"],
                   data["cv_score"], data["cv_scores"])

    def predict(self, flat_maps) -> np.ndarray:
        return self.svm.predict(self.pca.transform(flat_maps))


def train(manifest: DatasetManifest, variance_target: float = DEFAULT_VARIANCE_TARGET,
          folds: int = DEFAULT_FOLDS, seed: int = 0, grid: dict = None,
          train_fraction: float = DEFAULT_TRAIN_FRACTION, log=None):
    """Split, fit PCA on the training part, grid-search the SVM, refit on all training data."""
    log = log or (lambda stage, **kw: None)
    train_m, _ = split(manifest, train_fraction, seed)
    X, y = train_m.load_features()
    pca = fit_pca(X, variance_target)
    Z = pca.transform(X)
    log("pca", n_train=len(y), n_features=X.shape[1], n_components=pca.n_components)
    # default gamma grid uses 1/D with D the flattened map length: standardized
    # data has total variance D, so 1/D keeps rbf distances O(1)
    gs: GridSearchResult = grid_search_cv(Z, y, grid or default_grid(X.shape[1]), folds, seed)
    log("grid_search", best_C=gs.best_C, best_gamma=gs.best_gamma, cv_accuracy=gs.best_score)
    svm = fit_ovo(Z, y, gs.best_C, Kernel("rbf", gs.best_gamma))
    svm.train_index = None
    return ClassifierBundle(pca, svm, seed, train_fraction, manifest.config_hash,
                            gs.best_score, gs.scores)


def evaluate_bundle(bundle: ClassifierBundle, manifest: DatasetManifest) -> ConfusionMatrix:
    """Confusion matrix on the held-out part of the split recorded in the bundle."""
    _, test_m = split(manifest, bundle.train_fraction, bundle.split_seed)
    X, y = test_m.load_features()
    return evaluate(bundle.svm, bundle.pca.transform(X), y)
