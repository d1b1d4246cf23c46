"""Kernel SVM: SMO dual solver, one-vs-one multiclass, grid search, evaluation.

The binary solver follows the decomposition scheme of LIBSVM: maximal
violating pair for the first index, second-order gain for the second, and
the analytic two-variable update with box clipping.  Pair ``(a, b)`` with
``a < b`` labels class ``a`` as +1.
"""
from __future__ import annotations

import csv
import hashlib
import itertools
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classes import CLASS_NAMES, N_CLASSES, OccupancyClass
from .errors import DegenerateLabelsError, DimensionError, StratificationError

log = logging.getLogger(__name__)

TAU = 1e-12
DEFAULT_TOL = 1e-3
DEFAULT_MAX_PASSES = 10_000
DEFAULT_C_GRID = (0.1, 1.0, 10.0, 100.0)
SVM_FORMAT_VERSION = 1


# -- kernels -------------------------------------------------------------------

@dataclass(frozen=True)
class Kernel:
    kind: str = "rbf"
    gamma: float = 1.0

    def __post_init__(self):
        if self.kind not in ("linear", "rbf"):
            raise ValueError(f"unknown kernel {self.kind!r}")
        if self.kind == "rbf" and not self.gamma > 0:
            raise ValueError("rbf kernel needs gamma > 0")

    def __call__(self, A, B) -> np.ndarray:
        A = np.atleast_2d(np.asarray(A, dtype=np.float64))
        B = np.atleast_2d(np.asarray(B, dtype=np.float64))
        G = A @ B.T
        if self.kind == "linear":
            return G
        sq = np.sum(A * A, axis=1)[:, None] + np.sum(B * B, axis=1)[None, :] - 2.0 * G
        return np.exp(-self.gamma * np.maximum(sq, 0.0))


def linear_kernel() -> Kernel:
    return Kernel("linear", 1.0)


def rbf_kernel(gamma: float) -> Kernel:
    return Kernel("rbf", float(gamma))


# -- binary SMO ---------------------------------------------------------------

def dual_objective(alpha, y, K) -> float:
    """``sum(alpha) - 0.5 * sum_ij alpha_i alpha_j y_i y_j K_ij`` (to be maximized)."""
    ay = alpha * y
    return float(np.sum(alpha) - 0.5 * ay @ K @ ay)


@dataclass
class SmoResult:
    alpha: np.ndarray
    bias: float
    n_iter: int
    converged: bool
    objective: float


def smo(K, y, C: float, tol: float = DEFAULT_TOL, max_passes: int = DEFAULT_MAX_PASSES,
        check_monotone: bool = False) -> SmoResult:
    """Solve the soft-margin dual for a precomputed kernel matrix ``K``."""
    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = y.size
    alpha = np.zeros(n)
    G = -np.ones(n)           # gradient of 0.5 a'Qa - e'a
    QD = np.diag(K).copy()
    pos = y > 0
    max_iter = max_passes * max(n, 1)
    last_obj = 0.0
    converged = False
    it = 0
    while it < max_iter:
        v = -y * G
        up = np.where(pos, alpha < C, alpha > 0)
        low = np.where(pos, alpha > 0, alpha < C)
        if not up.any() or not low.any():
            converged = True
            break
        v_up = np.where(up, v, -np.inf)
        i = int(np.argmax(v_up))
        gmax = v_up[i]
        gmin = np.min(np.where(low, v, np.inf))
        if gmax - gmin < tol:
            converged = True
            break
        grad_diff = gmax - v
        cand = low & (grad_diff > 0)
        quad = QD[i] + QD - 2.0 * K[i]
        quad = np.where(quad > 0, quad, TAU)
        gain = np.where(cand, -(grad_diff ** 2) / quad, np.inf)
        j = int(np.argmin(gain))

        ai, aj = alpha[i], alpha[j]
        Qij = y[i] * y[j] * K[i, j]
        if y[i] != y[j]:
            q = QD[i] + QD[j] + 2.0 * Qij
            q = q if q > 0 else TAU
            delta = (-G[i] - G[j]) / q
            diff = ai - aj
            new_i, new_j = ai + delta, aj + delta
            if diff > 0:
                if new_j < 0:
                    new_j, new_i = 0.0, diff
            elif new_i < 0:
                new_i, new_j = 0.0, -diff
            if diff > 0:
                if new_i > C:
                    new_i, new_j = C, C - diff
            elif new_j > C:
                new_j, new_i = C, C + diff
        else:
            q = QD[i] + QD[j] - 2.0 * Qij
            q = q if q > 0 else TAU
            delta = (G[i] - G[j]) / q
            total = ai + aj
            new_i, new_j = ai - delta, aj + delta
            if total > C:
                if new_i > C:
                    new_i, new_j = C, total - C
            elif new_j < 0:
                new_j, new_i = 0.0, total
            if total > C:
                if new_j > C:
                    new_j, new_i = C, total - C
            elif new_i < 0:
                new_i, new_j = 0.0, total
        dai, daj = new_i - ai, new_j - aj
        alpha[i], alpha[j] = new_i, new_j
        G += y * (y[i] * K[:, i] * dai + y[j] * K[:, j] * daj)
        it += 1
        if check_monotone:
            obj = dual_objective(alpha, y, K)
            if obj < last_obj - 1e-10 * max(1.0, abs(last_obj)):
                raise AssertionError(f"SMO objective decreased at iteration {it}")
            last_obj = obj
    if not converged:
        log.warning("SMO stopped after %d iterations without reaching tol=%g", it, tol)

    alpha = np.clip(alpha, 0.0, C)
    bias = _bias(alpha, y, G, C)
    return SmoResult(alpha, bias, it, converged, dual_objective(alpha, y, K))


def _bias(alpha, y, G, C) -> float:
    yG = y * G
    at_upper = alpha >= C
    at_lower = alpha <= 0
    free = ~(at_upper | at_lower)
    if free.any():
        rho = float(np.mean(yG[free]))
    else:
        ub_mask = (at_upper & (y < 0)) | (at_lower & (y > 0))
        lb_mask = (at_upper & (y > 0)) | (at_lower & (y < 0))
        ub = np.min(yG[ub_mask]) if ub_mask.any() else np.inf
        lb = np.max(yG[lb_mask]) if lb_mask.any() else -np.inf
        rho = 0.5 * (ub + lb) if np.isfinite(ub) and np.isfinite(lb) else (
            ub if np.isfinite(ub) else lb)
    return -rho


@dataclass
class BinarySvm:
    support_vectors: np.ndarray
    dual_coef: np.ndarray     # alpha_i * y_i
    bias: float
    kernel: Kernel
    C: float
    alpha: np.ndarray = None  # full alpha over the training set
    objective: float = None

    def decision_function(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if self.support_vectors.shape[0] == 0:
            return np.full(X.shape[0], self.bias)
        return self.kernel(X, self.support_vectors) @ self.dual_coef + self.bias

    def predict(self, X) -> np.ndarray:
        return np.where(self.decision_function(X) > 0, 1, -1)


def train_binary(X, y, C: float = 1.0, kernel: Kernel = None, tol: float = DEFAULT_TOL,
                 max_passes: int = DEFAULT_MAX_PASSES) -> BinarySvm:
    """Soft-margin SVM on labels in {-1, +1}."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64)
    kernel = kernel or rbf_kernel(1.0 / X.shape[1])
    if not C > 0:
        raise ValueError("C must be positive")
    if not set(np.unique(y)) <= {-1.0, 1.0}:
        raise ValueError("binary labels must be -1 or +1")
    if not ((y > 0).any() and (y < 0).any()):
        raise DegenerateLabelsError("binary SVM needs at least one sample of each label")
    res = smo(kernel(X, X), y, C, tol, max_passes)
    sv = res.alpha > 0
    return BinarySvm(X[sv].copy(), (res.alpha * y)[sv], res.bias, kernel, C,
                     res.alpha, res.objective)


# -- one-vs-one multiclass ------------------------------------------------------

@dataclass
class PairModel:
    positive: int          # class code labelled +1
    negative: int
    sv_index: np.ndarray   # rows of SvmModel.support_vectors
    dual_coef: np.ndarray
    bias: float


@dataclass
class SvmModel:
    kernel: Kernel
    C: float
    classes: np.ndarray
    support_vectors: np.ndarray
    pairs: list
    train_index: np.ndarray = None   # rows of the training set kept as support vectors

    @property
    def n_features(self) -> int:
        return self.support_vectors.shape[1]

    def _check(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=np.float64))
        if X.shape[1] != self.n_features:
            raise DimensionError(
                f"feature vector has length {X.shape[1]}, model expects {self.n_features}")
        return X

    def pair_decisions(self, X=None, K=None) -> np.ndarray:
        """Decision values, shape (n_samples, n_pairs).  ``K`` is kernel(X, support_vectors)."""
        if K is None:
            K = self.kernel(self._check(X), self.support_vectors)
        out = np.empty((K.shape[0], len(self.pairs)))
        for p, pair in enumerate(self.pairs):
            out[:, p] = K[:, pair.sv_index] @ pair.dual_coef + pair.bias
        return out

    def vote(self, decisions) -> np.ndarray:
        n = decisions.shape[0]
        n_cls = len(self.classes)
        code_pos = {c: k for k, c in enumerate(self.classes)}
        votes = np.zeros((n, n_cls), dtype=int)
        strength = np.zeros((n, n_cls))
        for p, pair in enumerate(self.pairs):
            f = decisions[:, p]
            win_pos = f > 0
            a, b = code_pos[pair.positive], code_pos[pair.negative]
            votes[win_pos, a] += 1
            votes[~win_pos, b] += 1
            strength[win_pos, a] += np.abs(f[win_pos])
            strength[~win_pos, b] += np.abs(f[~win_pos])
        # most votes, then largest summed |decision| over won contests, then lowest code
        result = np.empty(n, dtype=int)
        for s in range(n):
            best = np.flatnonzero(votes[s] == votes[s].max())
            if best.size > 1:
                top = strength[s, best].max()
                best = best[strength[s, best] == top]
            result[s] = self.classes[best[0]]
        return result

    def predict(self, X) -> np.ndarray:
        return self.vote(self.pair_decisions(X))

    def to_dict(self) -> dict:
        return {
            "version": SVM_FORMAT_VERSION,
            "kernel": self.kernel.kind,
            "gamma": self.kernel.gamma,
            "C": self.C,
            "classes": [int(c) for c in self.classes],
            "support_vectors": self.support_vectors.tolist(),
            "pairs": [{"positive": int(p.positive), "negative": int(p.negative),
                       "sv_index": p.sv_index.tolist(), "dual_coef": p.dual_coef.tolist(),
                       "bias": p.bias} for p in self.pairs],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SvmModel":
        if data.get("version") != SVM_FORMAT_VERSION:
            raise ValueError(f"unsupported SVM model version {data.get('version')!r}")
        sv = np.asarray(data["support_vectors"], dtype=np.float64)
        pairs = [PairModel(p["positive"], p["negative"],
                           np.asarray(p["sv_index"], dtype=int),
                           np.asarray(p["dual_coef"], dtype=np.float64), float(p["bias"]))
                 for p in data["pairs"]]
        return cls(Kernel(data["kernel"], float(data["gamma"])), float(data["C"]),
                   np.asarray(data["classes"], dtype=int), sv, pairs)

    def hash(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()


def fit_ovo(X, y, C: float = 1.0, kernel: Kernel = None, K=None,
            tol: float = DEFAULT_TOL, max_passes: int = DEFAULT_MAX_PASSES) -> SvmModel:
    """Train one binary SVM per class pair.  ``K`` optionally supplies kernel(X, X)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=int)
    if X.shape[0] != y.size:
        raise DimensionError("X and y disagree on the number of samples")
    kernel = kernel or rbf_kernel(1.0 / X.shape[1])
    classes = np.unique(y)
    if classes.size < 2:
        raise DegenerateLabelsError("multiclass SVM needs at least two classes")
    if K is None:
        K = kernel(X, X)
    raw = []
    used = np.zeros(X.shape[0], dtype=bool)
    for a, b in itertools.combinations(classes, 2):
        idx = np.flatnonzero((y == a) | (y == b))
        yy = np.where(y[idx] == a, 1.0, -1.0)
        res = smo(K[np.ix_(idx, idx)], yy, C, tol, max_passes)
        nz = res.alpha > 0
        raw.append((int(a), int(b), idx[nz], (res.alpha * yy)[nz], res.bias))
        used[idx[nz]] = True
    train_index = np.flatnonzero(used)
    remap = np.full(X.shape[0], -1)
    remap[train_index] = np.arange(train_index.size)
    pairs = [PairModel(a, b, remap[rows], coef, bias) for a, b, rows, coef, bias in raw]
    return SvmModel(kernel, float(C), classes, X[train_index].copy(), pairs, train_index)


def predict(model: SvmModel, x):
    """Class of one feature vector (as OccupancyClass when codes are 0..7) or array for 2-D input."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        code = int(model.predict(x[None, :])[0])
        return OccupancyClass(code) if 0 <= code < N_CLASSES else code
    return model.predict(x)


# -- cross-validation -----------------------------------------------------------

def stratified_folds(y, k: int, seed: int = 0) -> np.ndarray:
    """Fold id per sample; each class is spread as evenly as possible across folds."""
    y = np.asarray(y)
    if k < 2:
        raise StratificationError("k must be at least 2")
    rng = np.random.default_rng(seed)
    folds = np.empty(y.size, dtype=int)
    offset = 0
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        if idx.size < k:
            name = CLASS_NAMES[c] if isinstance(c, (int, np.integer)) and 0 <= c < N_CLASSES else c
            raise StratificationError(
                f"class {name} has {idx.size} samples, fewer than k={k} folds")
        rng.shuffle(idx)
        folds[idx] = (np.arange(idx.size) + offset) % k
        offset += idx.size
    return folds


def default_grid(n_features: int) -> dict:
    """C and gamma candidates; ``n_features`` is the flattened map length D."""
    return {"C": list(DEFAULT_C_GRID), "gamma": [1.0 / n_features, 0.01, 0.1, 1.0]}


@dataclass
class GridSearchResult:
    best_C: float
    best_gamma: float
    best_score: float
    scores: list = field(default_factory=list)  # (C, gamma, mean accuracy, per-fold accuracies)


def grid_search_cv(X, y, grid: dict = None, k: int = 5, seed: int = 0,
                   kernel: str = "rbf") -> GridSearchResult:
    """Stratified k-fold grid search; ties go to smaller C, then smaller gamma."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=int)
    grid = grid or default_grid(X.shape[1])
    Cs = sorted(float(c) for c in grid["C"])
    gammas = sorted(float(g) for g in grid.get("gamma", [1.0]))
    if kernel == "linear":
        gammas = gammas[:1]
    folds = stratified_folds(y, k, seed)
    correct = {(c, g): np.zeros(k) for c in Cs for g in gammas}
    for f in range(k):
        tr, va = np.flatnonzero(folds != f), np.flatnonzero(folds == f)
        for g in gammas:
            kern = Kernel(kernel, g)
            K_tr = kern(X[tr], X[tr])
            K_va = kern(X[va], X[tr])
            for c in Cs:
                m = fit_ovo(X[tr], y[tr], c, kern, K=K_tr)
                pred = m.vote(m.pair_decisions(K=K_va[:, m.train_index]))
                correct[(c, g)][f] = np.mean(pred == y[va])
    scores = []
    best = None
    for c in Cs:
        for g in gammas:
            acc = correct[(c, g)]
            mean = float(np.mean(acc))
            scores.append((c, g, mean, acc.tolist()))
            if best is None or mean > best[2]:
                best = (c, g, mean)
    return GridSearchResult(best[0], best[1], best[2], scores)


# -- evaluation ---------------------------------------------------------------

@dataclass
class ConfusionMatrix:
    counts: np.ndarray   # rows true, columns predicted

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.counts) / self.total)

    def occupied_vs_empty(self) -> np.ndarray:
        """2x2 collapse: index 0 = NoOne, 1 = any occupant."""
        c = self.counts
        return np.array([[c[0, 0], c[0, 1:].sum()],
                         [c[1:, 0].sum(), c[1:, 1:].sum()]])

    @property
    def binary_accuracy(self) -> float:
        b = self.occupied_vs_empty()
        return float(np.trace(b) / b.sum())

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["true\\pred"] + CLASS_NAMES)
            for name, row in zip(CLASS_NAMES, self.counts):
                w.writerow([name] + [int(v) for v in row])

    def to_text(self) -> str:
        width = max(len(n) for n in CLASS_NAMES) + 1
        lines = [" " * width + "".join(f"{n:>{width}}" for n in CLASS_NAMES)]
        for name, row in zip(CLASS_NAMES, self.counts):
            lines.append(f"{name:<{width}}" + "".join(f"{int(v):>{width}}" for v in row))
        lines.append(f"accuracy: {self.accuracy:.4f}")
        lines.append(f"occupied-vs-empty accuracy: {self.binary_accuracy:.4f}")
        return "\n".join(lines)


def confusion_matrix(y_true, y_pred, n_classes: int = N_CLASSES) -> ConfusionMatrix:
    counts = np.zeros((n_classes, n_classes), dtype=int)
    np.add.at(counts, (np.asarray(y_true, dtype=int), np.asarray(y_pred, dtype=int)), 1)
    return ConfusionMatrix(counts)


def evaluate(model: SvmModel, X_test, y_test) -> ConfusionMatrix:
    y_test = np.asarray(y_test, dtype=int)
    if y_test.size == 0:
        raise ValueError("empty test set")
    return confusion_matrix(y_test, model.predict(X_test))
