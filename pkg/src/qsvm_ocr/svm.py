"""Exact least-squares SVM with a linear kernel.

This is the classical reference the simulated quantum classifier is checked
against. Training solves the bordered system

    [ 0   1^T           ] [b]   [0]
    [ 1   K + I/gamma   ] [a] = [y]

or, with the offset pinned to zero, (K + I/gamma) a = y.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

AMBIGUOUS_THRESHOLD = 1e-9

LABELS = {1: "6", -1: "9", 0: "ambiguous"}


class SingularSystemError(np.linalg.LinAlgError):
    def __init__(self, message, condition):
        super().__init__(f"{message} (condition estimate {condition:.3g})")
        self.condition = condition


@dataclass(frozen=True)
class TrainingSet:
    vectors: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        x = np.array(self.vectors, dtype=float)
        y = np.array(self.labels, dtype=float).reshape(-1)
        if x.ndim != 2 or x.shape[0] < 1:
            raise ValueError("vectors must be an M x N array with M >= 1")
        if y.size != x.shape[0]:
            raise ValueError(f"{x.shape[0]} vectors but {y.size} labels")
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise ValueError("labels must be +1 or -1")
        if np.any(np.linalg.norm(x, axis=1) == 0):
            raise ValueError("training vectors must be nonzero")
        x.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "vectors", x)
        object.__setattr__(self, "labels", y)

    @property
    def M(self) -> int:
        return self.vectors.shape[0]

    @property
    def N(self) -> int:
        return self.vectors.shape[1]


@dataclass(frozen=True)
class SvmModel:
    b: float
    alphas: np.ndarray
    gamma: float
    training_set: TrainingSet


def _check_gamma(gamma):
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")


def kernel_matrix(ts: TrainingSet) -> np.ndarray:
    x = ts.vectors
    k = x @ x.T
    return (k + k.T) / 2


def _solve(a, rhs):
    cond = np.linalg.cond(a)
    if not np.isfinite(cond) or cond > 1e14:
        raise SingularSystemError("LS-SVM system is singular", cond)
    return np.linalg.solve(a, rhs)


def solve_ls_svm(ts: TrainingSet, gamma: float) -> SvmModel:
    """Train with offset: solve the full (M+1) x (M+1) bordered system."""
    _check_gamma(gamma)
    m = ts.M
    f = np.zeros((m + 1, m + 1))
    f[0, 1:] = 1.0
    f[1:, 0] = 1.0
    f[1:, 1:] = kernel_matrix(ts) + np.eye(m) / gamma
    rhs = np.concatenate([[0.0], ts.labels])
    sol = _solve(f, rhs)
    residual = np.max(np.abs(f @ sol - rhs))
    if residual > 1e-8:
        raise SingularSystemError(f"LS-SVM residual {residual:.3g} too large", np.linalg.cond(f))
    return SvmModel(b=float(sol[0]), alphas=sol[1:], gamma=gamma, training_set=ts)


def solve_no_offset(K, y, gamma: float) -> np.ndarray:
    """Solve (K + I/gamma) alpha = y, the b = 0 reduction."""
    _check_gamma(gamma)
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"kernel must be square, got shape {K.shape}")
    if y.size != K.shape[0]:
        raise ValueError(f"label vector length {y.size} does not match kernel size {K.shape[0]}")
    return _solve(K + np.eye(K.shape[0]) / gamma, y)


def train_no_offset(ts: TrainingSet, gamma: float) -> SvmModel:
    return SvmModel(b=0.0, alphas=solve_no_offset(kernel_matrix(ts), ts.labels, gamma), gamma=gamma, training_set=ts)


def decision_value(model: SvmModel, x0) -> float:
    """b + sum_i alpha_i (x_i . x0)."""
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.size != model.training_set.N:
        raise ValueError(f"query has dimension {x0.size}, model expects {model.training_set.N}")
    return float(model.b + model.alphas @ (model.training_set.vectors @ x0))


def sign_label(value: float, threshold: float = AMBIGUOUS_THRESHOLD) -> int:
    if abs(value) < threshold:
        return 0
    return 1 if value > 0 else -1


def classify(model: SvmModel, x0) -> str:
    """'6' for the positive class, '9' for the negative class, else 'ambiguous'."""
    return LABELS[sign_label(decision_value(model, x0))]
