"""A small reverse-mode autodiff over numpy arrays, dense layers, losses and SGD.

Every model in the package is built from these pieces. Tensors carry a value and,
when they depend on a trainable parameter, a backward closure; calling
:func:`backward` on a scalar loss fills ``.grad`` on every parameter reached.
"""
from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import GraphNotRecorded, NonFiniteUpdate, ShapeMismatch

RNG_ALGORITHM = "PCG64"
BCE_EPS = 1e-7
ACTIVATIONS = ("identity", "relu", "sigmoid", "tanh")

# While a list, non-smooth ops append the branch they took (see grad_check).
_kink_log: list | None = None


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


class Tensor:
    __slots__ = ("value", "grad", "requires_grad", "parents", "backward_fn", "name")

    def __init__(self, value, requires_grad=False, parents=(), backward_fn=None, name=None):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = None
        self.requires_grad = requires_grad
        self.parents = parents
        self.backward_fn = backward_fn
        self.name = name

    @property
    def shape(self):
        return self.value.shape

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"Tensor{label}(shape={self.shape}, requires_grad={self.requires_grad})"


def parameter(value, name=None) -> Tensor:
    return Tensor(np.array(value, dtype=np.float64), requires_grad=True, name=name)


def as_tensor(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _node(value, parents, backward_fn) -> Tensor:
    parents = tuple(parents)
    if not any(p.requires_grad for p in parents):
        return Tensor(value)
    return Tensor(value, True, parents, backward_fn)


def _log_kink(mask) -> None:
    if _kink_log is not None:
        _kink_log.append(np.asarray(mask).copy())


# ---------------------------------------------------------------------------
# ops


def linear(x, w: Tensor, b: Tensor) -> Tensor:
    """``x @ w.T + b`` over the last axis of ``x``."""
    x = as_tensor(x)
    if x.shape[-1] != w.shape[1] or b.shape != (w.shape[0],):
        raise ShapeMismatch(f"input {x.shape} vs weights {w.shape} / bias {b.shape}")
    out = x.value @ w.value.T + b.value

    def back(g):
        g2 = g.reshape(-1, g.shape[-1])
        x2 = x.value.reshape(-1, x.shape[-1])
        return g @ w.value, g2.T @ x2, g2.sum(axis=0)

    return _node(out, (x, w, b), back)


def relu(x: Tensor) -> Tensor:
    mask = x.value > 0
    _log_kink(mask)
    return _node(np.where(mask, x.value, 0.0), (x,), lambda g: (g * mask,))


def sigmoid(x: Tensor) -> Tensor:
    s = 0.5 * (1.0 + np.tanh(0.5 * x.value))
    return _node(s, (x,), lambda g: (g * s * (1.0 - s),))


def tanh(x: Tensor) -> Tensor:
    t = np.tanh(x.value)
    return _node(t, (x,), lambda g: (g * (1.0 - t * t),))


def activate(x: Tensor, name: str) -> Tensor:
    if name == "identity":
        return x
    if name == "relu":
        return relu(x)
    if name == "sigmoid":
        return sigmoid(x)
    if name == "tanh":
        return tanh(x)
    raise ValueError(f"unknown activation {name!r}")


def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"{a.shape} vs {b.shape}")
    return _node(a.value + b.value, (a, b), lambda g: (g, g))


def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"{a.shape} vs {b.shape}")
    return _node(a.value - b.value, (a, b), lambda g: (g, -g))


def concat(xs: Sequence, axis: int = -1) -> Tensor:
    xs = [as_tensor(x) for x in xs]
    try:
        out = np.concatenate([x.value for x in xs], axis=axis)
    except ValueError as exc:
        raise ShapeMismatch(str(exc)) from None
    bounds = np.cumsum([x.shape[axis] for x in xs])[:-1]
    return _node(out, xs, lambda g: tuple(np.split(g, bounds, axis=axis)))


def reshape(x: Tensor, shape) -> Tensor:
    old = x.shape
    return _node(x.value.reshape(shape), (x,), lambda g: (g.reshape(old),))


def embed(table: Tensor, idx) -> Tensor:
    """Row lookup ``table[idx]``; negative indices yield a constant zero row."""
    idx = np.asarray(idx)
    valid = idx >= 0
    safe = np.where(valid, idx, 0)
    out = table.value[safe] * valid[..., None]

    def back(g):
        gt = np.zeros_like(table.value)
        np.add.at(gt, idx[valid], g[valid])
        return (gt,)

    return _node(out, (table,), back)


def masked_mean(x: Tensor, mask) -> Tensor:
    """Mean over axis -2 of ``x`` restricted to rows where ``mask`` is 1."""
    mask = np.asarray(mask, dtype=np.float64)
    count = np.maximum(mask.sum(axis=-1, keepdims=True), 1.0)
    w = (mask / count)[..., None]
    return _node((x.value * w).sum(axis=-2), (x,), lambda g: (g[..., None, :] * w,))


def mean(x: Tensor) -> Tensor:
    n = x.value.size
    return _node(x.value.mean(), (x,), lambda g: (np.full(x.shape, g / n),))


def total(x: Tensor) -> Tensor:
    return _node(x.value.sum(), (x,), lambda g: (np.full(x.shape, g),))


def squared_error(pred, target) -> Tensor:
    """Sum of squared differences."""
    pred = as_tensor(pred)
    diff = pred.value - np.asarray(target, dtype=np.float64)
    return _node(np.sum(diff * diff), (pred,), lambda g: (2.0 * g * diff,))


def cosine_distance(a, b) -> Tensor:
    """Row-wise ``1 - cos(a, b)``; defined as 1 (with zero gradient) if either row is zero."""
    a, b = as_tensor(a), as_tensor(b)
    if a.shape != b.shape:
        raise ShapeMismatch(f"{a.shape} vs {b.shape}")
    na = np.linalg.norm(a.value, axis=-1, keepdims=True)
    nb = np.linalg.norm(b.value, axis=-1, keepdims=True)
    ok = (na > 0) & (nb > 0)
    _log_kink(ok)
    sa = np.where(ok, na, 1.0)
    sb = np.where(ok, nb, 1.0)
    cos = np.where(ok, (a.value * b.value).sum(axis=-1, keepdims=True) / (sa * sb), 0.0)

    def back(g):
        g = g[..., None] * ok
        ga = -g * (b.value / (sa * sb) - cos * a.value / (sa * sa))
        gb = -g * (a.value / (sa * sb) - cos * b.value / (sb * sb))
        return ga, gb

    return _node(1.0 - cos[..., 0], (a, b), back)


def hinge(x: Tensor) -> Tensor:
    return relu(x)


def triplet_loss(a, p, n, margin: float) -> Tensor:
    """``max(0, d(a,p) - d(a,n) + margin)`` per row, ``d`` = cosine distance."""
    if margin <= 0:
        raise ValueError("margin must be positive")
    gap = sub(cosine_distance(a, p), cosine_distance(a, n))
    return hinge(_node(gap.value + margin, (gap,), lambda g: (g,)))


def bce(p: Tensor, y) -> Tensor:
    """Element-wise binary cross-entropy with ``p`` clamped to ``[eps, 1 - eps]``."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != p.shape:
        raise ShapeMismatch(f"{p.shape} vs {y.shape}")
    inside = (p.value > BCE_EPS) & (p.value < 1.0 - BCE_EPS)
    _log_kink(inside)
    q = np.clip(p.value, BCE_EPS, 1.0 - BCE_EPS)
    loss = -(y * np.log(q) + (1.0 - y) * np.log(1.0 - q))
    return _node(loss, (p,), lambda g: (g * inside * ((1.0 - y) / (1.0 - q) - y / q),))


def bce_loss(p: float, y: int) -> float:
    """Scalar binary cross-entropy."""
    return float(bce(Tensor(np.array([p])), np.array([y])).value[0])


def triplet_loss_value(a, p, n, margin: float) -> float:
    a, p, n = (np.atleast_2d(np.asarray(v, dtype=np.float64)) for v in (a, p, n))
    return float(triplet_loss(a, p, n, margin).value[0])


# ---------------------------------------------------------------------------
# backward pass


def backward(loss: Tensor) -> list[Tensor]:
    """Accumulate d(loss)/d(leaf) into ``.grad`` of every trainable leaf.

    Returns the leaves reached, in discovery order. Gradients from a previous
    call on the same graph are overwritten, not summed.
    """
    if not isinstance(loss, Tensor) or not loss.requires_grad:
        raise GraphNotRecorded("loss does not depend on any trainable parameter")
    if loss.value.size != 1:
        raise ShapeMismatch(f"loss must be scalar, got shape {loss.shape}")

    order: list[Tensor] = []
    seen: set[int] = set()
    stack = [(loss, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for p in node.parents:
            if p.requires_grad and id(p) not in seen:
                stack.append((p, False))

    for node in order:
        node.grad = None
    loss.grad = np.ones_like(loss.value)
    leaves = []
    for node in reversed(order):
        if node.backward_fn is None:
            leaves.append(node)
            continue
        grads = node.backward_fn(node.grad)
        for parent, g in zip(node.parents, grads):
            if not parent.requires_grad or g is None:
                continue
            parent.grad = g.copy() if parent.grad is None else parent.grad + g
    for leaf in leaves:
        if leaf.grad is None:
            leaf.grad = np.zeros_like(leaf.value)
    return leaves


# ---------------------------------------------------------------------------
# layers and optimizer


def glorot_uniform(rng: np.random.Generator, fan_out: int, fan_in: int) -> np.ndarray:
    r = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-r, r, size=(fan_out, fan_in))


class DenseLayer:
    """``activation(W @ x + b)`` with ``W`` of shape (out, in)."""

    def __init__(self, weights, bias, activation: str = "identity"):
        weights = np.asarray(weights, dtype=np.float64)
        bias = np.asarray(bias, dtype=np.float64)
        if weights.ndim != 2 or bias.shape != (weights.shape[0],):
            raise ShapeMismatch(f"weights {weights.shape} vs bias {bias.shape}")
        if activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {activation!r}")
        self.weights = parameter(weights, "weights")
        self.bias = parameter(bias, "bias")
        self.activation = activation

    @classmethod
    def init(cls, rng, n_in: int, n_out: int, activation: str = "identity") -> "DenseLayer":
        return cls(glorot_uniform(rng, n_out, n_in), np.zeros(n_out), activation)

    @classmethod
    def zeros(cls, n_in: int, n_out: int, activation: str = "identity") -> "DenseLayer":
        return cls(np.zeros((n_out, n_in)), np.zeros(n_out), activation)

    @property
    def n_in(self) -> int:
        return self.weights.shape[1]

    @property
    def n_out(self) -> int:
        return self.weights.shape[0]

    def __call__(self, x) -> Tensor:
        return activate(linear(x, self.weights, self.bias), self.activation)

    def parameters(self) -> list[Tensor]:
        return [self.weights, self.bias]

    def to_dict(self) -> dict:
        return {
            "shape": [self.n_out, self.n_in],
            "activation": self.activation,
            "weights": self.weights.value.ravel().tolist(),
            "bias": self.bias.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DenseLayer":
        n_out, n_in = d["shape"]
        w = np.asarray(d["weights"], dtype=np.float64).reshape(n_out, n_in)
        return cls(w, np.asarray(d["bias"], dtype=np.float64), d["activation"])


def dense_forward(layer: DenseLayer, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1:] != (layer.n_in,):
        raise ShapeMismatch(f"expected input of length {layer.n_in}, got {x.shape}")
    return layer(x).value


def sgd_step(params: Sequence[Tensor], lr: float, grads: Sequence[np.ndarray] | None = None) -> None:
    """In-place ``p -= lr * g``. Nothing is updated if any new value would be non-finite."""
    if lr < 0:
        raise ValueError("learning rate must be non-negative")
    if grads is None:
        grads = [p.grad if p.grad is not None else np.zeros_like(p.value) for p in params]
    new = []
    for p, g in zip(params, grads, strict=True):
        if np.shape(g) != p.shape:
            raise ShapeMismatch(f"gradient {np.shape(g)} vs parameter {p.shape}")
        v = p.value - lr * g
        if not np.all(np.isfinite(v)):
            raise NonFiniteUpdate(f"non-finite update for parameter {p.name or '?'}")
        new.append(v)
    for p, v in zip(params, new):
        p.value = v


# ---------------------------------------------------------------------------
# gradient checking


def _traced(loss_fn):
    global _kink_log
    _kink_log = []
    try:
        value = float(loss_fn().value)
        return value, _kink_log
    finally:
        _kink_log = None


def _same_branches(a, b) -> bool:
    return len(a) == len(b) and all(np.array_equal(x, y) for x, y in zip(a, b))


def grad_check(
    loss_fn: Callable[[], Tensor],
    params: Iterable[Tensor],
    epsilon: float = 1e-5,
    max_coords: int | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """Max relative error between backprop and central finite differences.

    ``loss_fn`` rebuilds the graph from the current parameter values. Coordinates
    whose perturbation flips a relu / clamp / zero-norm branch are skipped since
    the loss is not differentiable across them. ``max_coords`` samples that many
    coordinates per parameter instead of checking all of them.
    """
    if not 1e-6 <= epsilon <= 1e-4:
        raise ValueError("epsilon must lie in [1e-6, 1e-4]")
    params = list(params)
    loss = loss_fn()
    backward(loss)
    analytic = [p.grad.copy() if p.grad is not None else np.zeros_like(p.value) for p in params]
    _, base_branches = _traced(loss_fn)
    rng = rng or make_rng(0)

    worst = 0.0
    for p, ga in zip(params, analytic):
        p.value = np.ascontiguousarray(p.value)
        flat = p.value.reshape(-1)
        coords = np.arange(flat.size)
        if max_coords is not None and flat.size > max_coords:
            coords = rng.choice(flat.size, size=max_coords, replace=False)
        for i in coords:
            orig = flat[i]
            flat[i] = orig + epsilon
            f_plus, br_plus = _traced(loss_fn)
            flat[i] = orig - epsilon
            f_minus, br_minus = _traced(loss_fn)
            flat[i] = orig
            if not (_same_branches(br_plus, base_branches) and _same_branches(br_minus, base_branches)):
                continue
            numeric = (f_plus - f_minus) / (2 * epsilon)
            a = ga.reshape(-1)[i]
            err = abs(a - numeric) / max(1e-8, abs(a) + abs(numeric))
            worst = max(worst, err)
    return worst
