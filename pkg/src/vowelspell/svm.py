"""Soft-margin SVM with a Gaussian kernel (C=1000, sigma^2=30).

Small, exact fits: the calibration problems have eight points, so the
solver runs to a 1e-6 KKT gap rather than trading accuracy for speed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _smo
from .errors import TrainingError

DEFAULT_C = 1000.0
DEFAULT_SIGMA2 = 30.0
KKT_TOL = 1e-6
YES = "yes"
NO = "no"


def gaussian_kernel(u: np.ndarray, v: np.ndarray, sigma2: float = DEFAULT_SIGMA2) -> np.ndarray:
    """K(u, v) = exp(-|u-v|^2 / (2 sigma^2)) for row-stacked points."""
    u = np.atleast_2d(np.asarray(u, dtype=float))
    v = np.atleast_2d(np.asarray(v, dtype=float))
    d2 = np.sum(u * u, axis=1)[:, None] + np.sum(v * v, axis=1)[None, :] - 2.0 * u @ v.T
    np.maximum(d2, 0.0, out=d2)
    return np.exp(-d2 / (2.0 * sigma2))


@dataclass(frozen=True)
class SvmModel:
    support_vectors: np.ndarray  # (m, 2)
    dual_coef: np.ndarray  # alpha_i * y_i per support vector
    bias: float
    C: float
    sigma2: float
    geometric_margin: float

    def to_dict(self) -> dict:
        return {
            "support_vectors": self.support_vectors.tolist(),
            "dual_coef": self.dual_coef.tolist(),
            "bias": self.bias,
            "C": self.C,
            "sigma2": self.sigma2,
            "geometric_margin": self.geometric_margin,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SvmModel":
        return cls(
            np.asarray(d["support_vectors"], dtype=float),
            np.asarray(d["dual_coef"], dtype=float),
            float(d["bias"]),
            float(d["C"]),
            float(d["sigma2"]),
            float(d["geometric_margin"]),
        )


def train_svm(
    points,
    labels,
    C: float = DEFAULT_C,
    sigma2: float = DEFAULT_SIGMA2,
    tol: float = KKT_TOL,
    backend: str | None = None,
) -> SvmModel:
    """Fit the dual on +-1-labeled 2-D points; deterministic in input order."""
    X = np.asarray(points, dtype=float)
    if X.ndim != 2:
        raise TrainingError("points must be a 2-D array of feature vectors")
    y = np.asarray(labels, dtype=float)
    if len(y) != len(X):
        raise TrainingError("labels and points disagree in length")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise TrainingError("labels must be +-1")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise TrainingError("need at least one point per class")
    if not np.all(np.isfinite(X)):
        raise TrainingError("non-finite feature component")

    K = gaussian_kernel(X, X, sigma2)
    Q = K * np.outer(y, y)
    alpha, bias, _ = _smo.solve(Q, y, C, tol=tol, backend=backend)

    w_norm2 = float(alpha @ Q @ alpha)
    margin = 1.0 / np.sqrt(w_norm2) if w_norm2 > 0 else float("inf")

    keep = alpha > 1e-12
    return SvmModel(
        support_vectors=X[keep].copy(),
        dual_coef=(alpha * y)[keep].copy(),
        bias=float(bias),
        C=float(C),
        sigma2=float(sigma2),
        geometric_margin=float(margin),
    )


def decision_values(model: SvmModel, points) -> np.ndarray:
    X = np.atleast_2d(np.asarray(points, dtype=float))
    if len(model.dual_coef) == 0:
        return np.full(len(X), model.bias)
    K = gaussian_kernel(X, model.support_vectors, model.sigma2)
    return K @ model.dual_coef + model.bias


def classify(model: SvmModel, point) -> tuple[str, float]:
    """Yes for a strictly positive decision value; exact zero is no."""
    value = float(decision_values(model, np.asarray(point, dtype=float))[0])
    return (YES if value > 0 else NO, value)
