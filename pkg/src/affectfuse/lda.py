"""Linear discriminant weak learner with shared (pooled) covariance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .core import EMOTION_IDS

DEFAULT_SHRINKAGE = 0.01
DEFAULT_RIDGE = 1e-8


class TrainingError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LdaModel:
    """Fitted discriminant.

    ``weights[i]`` and ``biases[i]`` give ``g_i(x) = biases[i] + weights[i] @ x``
    for class ``classes[i]``.
    """

    classes: np.ndarray
    means: np.ndarray
    covariance: np.ndarray
    priors: np.ndarray
    weights: np.ndarray
    biases: np.ndarray
    shrinkage: float
    ridge: float

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def to_json(self) -> dict:
        return {
            "classes": [int(c) for c in self.classes],
            "means": self.means.tolist(),
            "covariance": self.covariance.tolist(),
            "priors": self.priors.tolist(),
            "weights": self.weights.tolist(),
            "biases": self.biases.tolist(),
            "shrinkage": self.shrinkage,
            "ridge": self.ridge,
        }

    def same_as(self, other: LdaModel) -> bool:
        """Bitwise equality of every fitted array."""
        return all(
            np.array_equal(getattr(self, f), getattr(other, f))
            for f in ("classes", "means", "covariance", "priors", "weights", "biases")
        ) and (self.shrinkage, self.ridge) == (other.shrinkage, other.ridge)


def linear_terms(means, covariance, priors) -> tuple[np.ndarray, np.ndarray]:
    """``W_i = S^-1 mu_i`` and ``W_i0 = -mu_i' S^-1 mu_i / 2 + ln P_i``."""
    factor = linalg.cho_factor(covariance, lower=True)
    weights = linalg.cho_solve(factor, means.T).T
    biases = -0.5 * np.einsum("ij,ij->i", means, weights) + np.log(priors)
    return weights, biases


def fit_lda(X, y, shrinkage: float = DEFAULT_SHRINKAGE, ridge: float = DEFAULT_RIDGE, classes=EMOTION_IDS) -> LdaModel:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    y = np.asarray(y)
    if X.ndim != 2 or X.shape[1] < 1:
        raise TrainingError(f"training matrix must be rows x d with d >= 1, got {X.shape}")
    if len(y) != len(X):
        raise TrainingError(f"{len(X)} rows but {len(y)} labels")
    if not 0.0 <= shrinkage < 1.0:
        raise TrainingError(f"shrinkage must lie in [0, 1), got {shrinkage}")
    if not ridge > 0.0:
        raise TrainingError(f"ridge must be positive, got {ridge}")

    classes = np.asarray(classes)
    counts = np.array([np.sum(y == c) for c in classes])
    short = [int(c) for c, n in zip(classes, counts) if n < 2]
    if short:
        raise TrainingError(f"classes {short} have fewer than 2 training rows")
    extra = sorted(set(np.unique(y).tolist()) - set(classes.tolist()))
    if extra:
        raise TrainingError(f"labels {extra} are not among the model classes")

    n, d = X.shape
    k = len(classes)
    if n <= k:
        raise TrainingError(f"need more rows than classes for pooled covariance ({n} <= {k})")
    means = np.vstack([X[y == c].mean(axis=0) for c in classes])
    position = {int(c): i for i, c in enumerate(classes)}
    centered = X - means[[position[int(c)] for c in y]]
    scatter = centered.T @ centered
    pooled = scatter / (n - k)
    reg = (1.0 - shrinkage) * pooled + shrinkage * np.diag(np.diag(pooled)) + ridge * np.eye(d)
    reg = 0.5 * (reg + reg.T)
    priors = counts / counts.sum()

    try:
        weights, biases = linear_terms(means, reg, priors)
    except linalg.LinAlgError as exc:  # pragma: no cover - ridge > 0 keeps reg positive definite
        raise TrainingError(f"regularized covariance is not positive definite: {exc}") from None
    return LdaModel(classes, means, reg, priors, weights, biases, float(shrinkage), float(ridge))


def discriminants(model: LdaModel, x) -> np.ndarray:
    """``g_i(x)`` for every class; ``x`` may be one vector or a rows x d block."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != model.dim:
        raise ValueError(f"feature dimension {x.shape[-1]} does not match model dimension {model.dim}")
    return x @ model.weights.T + model.biases


def weight_vector(g) -> np.ndarray:
    """Softmax of the discriminants: posterior weights summing to one."""
    g = np.asarray(g, dtype=np.float64)
    if not np.all(np.isfinite(g)):
        raise ValueError("discriminants must be finite")
    # spreads beyond the float range just underflow to a zero weight
    with np.errstate(over="ignore"):
        e = np.exp(g - g.max(axis=-1, keepdims=True))
    return e / e.sum(axis=-1, keepdims=True)


def predict(model: LdaModel, x) -> np.ndarray:
    return model.classes[np.argmax(discriminants(model, x), axis=-1)]
