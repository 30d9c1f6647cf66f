"""L2-regularized logistic regression with gradients in parameters and inputs.

The joint embedding optimization needs the loss to be differentiable in the
embedding columns of the design matrix as well as in the parameters, so both
gradients are exposed.  Loss is the mean negative log-likelihood (dataset-size
independent) plus (l2/2) * ||w||^2; the bias is unpenalized.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import NonFiniteValue

ARMIJO_C = 1e-4


@dataclass(frozen=True)
class LearnerParams:
    weights: np.ndarray
    bias: float
    l2: float = 0.0

    def __post_init__(self) -> None:
        if self.l2 < 0:
            raise ValueError("l2 must be non-negative")

    @classmethod
    def zeros(cls, n_features: int, l2: float = 0.0) -> "LearnerParams":
        return cls(weights=np.zeros(n_features), bias=0.0, l2=l2)

    @classmethod
    def random_init(cls, n_features: int, l2: float, rng: np.random.Generator,
                    scale: float = 0.01) -> "LearnerParams":
        return cls(weights=scale * rng.standard_normal(n_features), bias=0.0, l2=l2)


@dataclass
class LabeledFeatures:
    """Design matrix with the text-embedding columns marked by a slice."""

    X: np.ndarray
    y: np.ndarray
    embedding_cols: slice

    def __post_init__(self) -> None:
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if self.X.ndim != 2 or self.y.shape != (self.X.shape[0],):
            raise ValueError("X must be m x d with an m-vector of labels")
        if not np.all((self.y == 0) | (self.y == 1)):
            raise ValueError("labels must be binary")

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def embedding(self) -> np.ndarray:
        return self.X[:, self.embedding_cols]

    def with_embedding(self, xe: np.ndarray) -> "LabeledFeatures":
        x = self.X.copy()
        x[:, self.embedding_cols] = xe
        return LabeledFeatures(x, self.y, self.embedding_cols)


def sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _logits(params: LearnerParams, x: np.ndarray) -> np.ndarray:
    return x @ params.weights + params.bias


def loss(params: LearnerParams, data: LabeledFeatures) -> float:
    z = _logits(params, data.X)
    # log(1 + e^z) - y z, evaluated stably
    nll = np.logaddexp(0.0, z) - data.y * z
    val = float(nll.mean() + 0.5 * params.l2 * params.weights @ params.weights)
    if not np.isfinite(val):
        raise NonFiniteValue("loss is not finite")
    return val


def grad_theta(params: LearnerParams, data: LabeledFeatures) -> tuple[np.ndarray, float]:
    z = _logits(params, data.X)
    residual = sigmoid(z) - data.y
    gw = data.X.T @ residual / data.m + params.l2 * params.weights
    gb = float(residual.mean())
    if not (np.all(np.isfinite(gw)) and np.isfinite(gb)):
        raise NonFiniteValue("parameter gradient is not finite")
    return gw, gb


def grad_embedding(params: LearnerParams, data: LabeledFeatures) -> np.ndarray:
    """d loss / d Xe: per-row residual times the embedding weight slice."""
    z = _logits(params, data.X)
    residual = (sigmoid(z) - data.y) / data.m
    ge = np.outer(residual, params.weights[data.embedding_cols])
    if not np.all(np.isfinite(ge)):
        raise NonFiniteValue("embedding gradient is not finite")
    return ge


def predict_proba(params: LearnerParams, x: np.ndarray) -> np.ndarray:
    return sigmoid(_logits(params, np.asarray(x, dtype=float)))


def descend_theta(params: LearnerParams, data: LabeledFeatures, steps: int,
                  init_step: float = 1.0, grad_tol: float = 0.0) -> LearnerParams:
    """Plain gradient descent with Armijo backtracking on the training loss."""
    cur = loss(params, data)
    eta = init_step
    for _ in range(steps):
        gw, gb = grad_theta(params, data)
        gnorm2 = float(gw @ gw + gb * gb)
        if gnorm2 <= grad_tol ** 2:
            break
        eta = min(eta * 2.0, 1e4)
        accepted = False
        for _ in range(60):
            cand = LearnerParams(params.weights - eta * gw, params.bias - eta * gb, params.l2)
            new = loss(cand, data)
            if new <= cur - ARMIJO_C * eta * gnorm2:
                accepted = True
                break
            eta *= 0.5
        if not accepted:
            break
        params, cur = cand, new
    return params


def train(data: LabeledFeatures, l2: float, init: LearnerParams | None = None,
          max_iters: int = 500, grad_tol: float = 1e-8) -> LearnerParams:
    """Train to (near) convergence: descent until the gradient norm is tiny."""
    params = init if init is not None else LearnerParams.zeros(data.X.shape[1], l2)
    if params.l2 != l2:
        params = replace(params, l2=l2)
    return descend_theta(params, data, steps=max_iters, grad_tol=grad_tol)
