"""Minimal MLP with manual backpropagation (tanh hidden, identity output)."""

from __future__ import annotations

import numpy as np

from covrl.errors import ShapeMismatch


class Mlp:
    """Dense network; weights drawn uniform +-1/sqrt(fan_in) from the seed."""

    def __init__(self, sizes: list[int], rng: np.random.Generator):
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ShapeMismatch(f"bad layer sizes {sizes}")
        self.sizes = list(sizes)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(sizes, sizes[1:]):
            bound = 1.0 / np.sqrt(fan_in)
            self.weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
            self.biases.append(rng.uniform(-bound, bound, size=fan_out))
        self._cache: list[np.ndarray] | None = None

    @property
    def in_dim(self) -> int:
        return self.sizes[0]

    @property
    def out_dim(self) -> int:
        return self.sizes[-1]

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.in_dim:
            raise ShapeMismatch(f"expected input dim {self.in_dim}, got {x.shape[1]}")
        activations = [x]
        h = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = h @ w + b
            h = z if i == last else np.tanh(z)
            activations.append(h)
        self._cache = activations
        return h

    def backward(self, upstream: np.ndarray) -> tuple[list[tuple[np.ndarray, np.ndarray]], np.ndarray]:
        """Gradients of a scalar loss given dL/dy; returns ([(dW, db)...], dL/dx)."""
        if self._cache is None:
            raise ShapeMismatch("backward before forward")
        activations = self._cache
        upstream = np.atleast_2d(np.asarray(upstream, dtype=np.float64))
        if upstream.shape != activations[-1].shape:
            raise ShapeMismatch(
                f"upstream shape {upstream.shape} != output shape {activations[-1].shape}")
        grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(self.weights)
        delta = upstream
        for i in range(len(self.weights) - 1, -1, -1):
            if i != len(self.weights) - 1:
                delta = delta * (1.0 - activations[i + 1] ** 2)  # tanh'
            grads[i] = (activations[i].T @ delta, delta.sum(axis=0))
            delta = delta @ self.weights[i].T
        return grads, delta

    def copy_from(self, other: "Mlp") -> None:
        if self.sizes != other.sizes:
            raise ShapeMismatch("network shapes differ")
        self.weights = [w.copy() for w in other.weights]
        self.biases = [b.copy() for b in other.biases]

    def flat_params(self) -> np.ndarray:
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.ravel())
            parts.append(b.ravel())
        return np.concatenate(parts)

    def load_flat(self, flat: np.ndarray) -> None:
        offset = 0
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            self.weights[i] = flat[offset:offset + w.size].reshape(w.shape).copy()
            offset += w.size
            self.biases[i] = flat[offset:offset + b.size].reshape(b.shape).copy()
            offset += b.size
        if offset != flat.size:
            raise ShapeMismatch("flat parameter size mismatch")


def mlp_forward(net: Mlp, x: np.ndarray) -> np.ndarray:
    return net.forward(x)


def mlp_backward(net: Mlp, upstream: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    grads, _ = net.backward(upstream)
    return grads


class Adam:
    def __init__(self, net: Mlp, lr: float, beta1: float = 0.9,
                 beta2: float = 0.999, eps: float = 1e-8):
        self.net = net
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [(np.zeros_like(w), np.zeros_like(b))
                  for w, b in zip(net.weights, net.biases)]
        self.v = [(np.zeros_like(w), np.zeros_like(b))
                  for w, b in zip(net.weights, net.biases)]

    def step(self, grads: list[tuple[np.ndarray, np.ndarray]]) -> None:
        self.t += 1
        b1t = 1.0 - self.beta1 ** self.t
        b2t = 1.0 - self.beta2 ** self.t
        for i, (dw, db) in enumerate(grads):
            mw, mb = self.m[i]
            vw, vb = self.v[i]
            mw[:] = self.beta1 * mw + (1 - self.beta1) * dw
            mb[:] = self.beta1 * mb + (1 - self.beta1) * db
            vw[:] = self.beta2 * vw + (1 - self.beta2) * dw ** 2
            vb[:] = self.beta2 * vb + (1 - self.beta2) * db ** 2
            self.net.weights[i] -= self.lr * (mw / b1t) / (np.sqrt(vw / b2t) + self.eps)
            self.net.biases[i] -= self.lr * (mb / b1t) / (np.sqrt(vb / b2t) + self.eps)


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)
