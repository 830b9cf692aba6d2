"""Classical optimizers and losses for training circuit parameters.

Everything here is a pure function over plain numpy vectors; the thin
``Sgd``/``Adam`` wrapper classes exist only so a training loop can carry
optimizer state without threading it by hand.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np


@dataclass(frozen=True)
class Loss:
    """MSE, MAE, or Huber with quadratic/linear crossover at ``delta``."""

    kind: str  # "mse" | "mae" | "huber"
    delta: float = 1.0

    def __post_init__(self):
        if self.kind not in ("mse", "mae", "huber"):
            raise ValueError(f"unknown loss kind {self.kind!r}")
        if self.kind == "huber" and self.delta <= 0:
            raise ValueError("huber delta must be > 0")


MSE = Loss("mse")
MAE = Loss("mae")


def _check_pair(params: np.ndarray, grads: np.ndarray) -> None:
    if params.shape != grads.shape:
        raise ValueError(
            f"params shape {params.shape} != grads shape {grads.shape}")


def sgd_step(params: np.ndarray, grads: np.ndarray, lr: float) -> np.ndarray:
    """One plain gradient-descent step: params - lr * grads."""
    params = np.asarray(params, dtype=np.float64)
    grads = np.asarray(grads, dtype=np.float64)
    _check_pair(params, grads)
    if lr <= 0:
        raise ValueError("lr must be > 0")
    return params - lr * grads


@dataclass
class AdamState:
    """First/second moment estimates plus the step counter."""

    m: np.ndarray
    v: np.ndarray
    t: int = 0

    @classmethod
    def zeros(cls, n: int) -> "AdamState":
        return cls(np.zeros(n), np.zeros(n), 0)


def adam_step(params: np.ndarray, grads: np.ndarray, state: AdamState,
              lr: float, beta1: float = 0.9, beta2: float = 0.999,
              eps: float = 1e-8) -> Tuple[np.ndarray, AdamState]:
    """Standard bias-corrected Adam update; returns new params and state."""
    params = np.asarray(params, dtype=np.float64)
    grads = np.asarray(grads, dtype=np.float64)
    _check_pair(params, grads)
    if state.m.shape != params.shape:
        raise ValueError("optimizer state does not match parameter length")
    t = state.t + 1
    m = beta1 * state.m + (1 - beta1) * grads
    v = beta2 * state.v + (1 - beta2) * grads ** 2
    m_hat = m / (1 - beta1 ** t)
    v_hat = v / (1 - beta2 ** t)
    new_params = params - lr * m_hat / (np.sqrt(v_hat) + eps)
    return new_params, AdamState(m, v, t)


def loss_and_grad(loss: Loss, pred: np.ndarray,
                  target: np.ndarray) -> Tuple[float, np.ndarray]:
    """Mean loss over the batch and its gradient w.r.t. ``pred``.

    MAE subgradient at a tie is 0.
    """
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(
            f"pred shape {pred.shape} != target shape {target.shape}")
    if pred.size == 0:
        raise ValueError("loss over an empty batch is undefined")
    r = pred - target
    n = r.size
    if loss.kind == "mse":
        return float(np.mean(r ** 2)), 2.0 * r / n
    if loss.kind == "mae":
        return float(np.mean(np.abs(r))), np.sign(r) / n
    d = loss.delta
    quad = np.abs(r) <= d
    values = np.where(quad, 0.5 * r ** 2, d * (np.abs(r) - 0.5 * d))
    grad = np.where(quad, r, d * np.sign(r)) / n
    return float(np.mean(values)), grad


class Sgd:
    """Stateless SGD behind the common step(params, grads) interface."""

    def __init__(self, lr: float):
        self.lr = lr

    def step(self, params: np.ndarray, grads: np.ndarray) -> np.ndarray:
        return sgd_step(params, grads, self.lr)


class Adam:
    """Adam with internally carried moment state."""

    def __init__(self, lr: float = 0.01, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self._state: AdamState | None = None

    def step(self, params: np.ndarray, grads: np.ndarray) -> np.ndarray:
        if self._state is None:
            self._state = AdamState.zeros(np.asarray(params).size)
        new_params, self._state = adam_step(params, grads, self._state,
                                            self.lr, self.beta1, self.beta2,
                                            self.eps)
        return new_params


def make_optimizer(kind: str, lr: float):
    if kind == "adam":
        return Adam(lr)
    if kind == "sgd":
        return Sgd(lr)
    raise ValueError(f"unknown optimizer {kind!r}")
