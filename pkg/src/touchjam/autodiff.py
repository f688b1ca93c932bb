"""Minimal reverse-mode automatic differentiation over numpy arrays.

Only the operations needed by the gesture model are implemented: dense
algebra, the LSTM nonlinearities, and the numerically-stable pieces of the
mixture log-likelihood. Values are float64 throughout so that analytic
gradients can be checked against central finite differences.
"""

from __future__ import annotations

import numpy as np


def _unbroadcast(grad, shape):
    """Sum `grad` down to `shape`, undoing numpy broadcasting."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Var:
    """A node in the computation graph: a value plus a backward rule."""

    __slots__ = ("value", "grad", "_parents", "_backward")

    def __init__(self, value, parents=(), backward=None):
        self.value = np.asarray(value, dtype=np.float64)
        self.grad = None
        self._parents = parents
        self._backward = backward

    @property
    def shape(self):
        return self.value.shape

    # -- arithmetic -------------------------------------------------------

    def __add__(self, other):
        other = _as_var(other)
        out = Var(self.value + other.value, (self, other))

        def backward(g):
            return (_unbroadcast(g, self.shape), _unbroadcast(g, other.shape))

        out._backward = backward
        return out

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_var(other)
        out = Var(self.value - other.value, (self, other))

        def backward(g):
            return (_unbroadcast(g, self.shape), _unbroadcast(-g, other.shape))

        out._backward = backward
        return out

    def __rsub__(self, other):
        return _as_var(other) - self

    def __mul__(self, other):
        other = _as_var(other)
        out = Var(self.value * other.value, (self, other))

        def backward(g):
            return (
                _unbroadcast(g * other.value, self.shape),
                _unbroadcast(g * self.value, other.shape),
            )

        out._backward = backward
        return out

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_var(other)
        out = Var(self.value / other.value, (self, other))

        def backward(g):
            return (
                _unbroadcast(g / other.value, self.shape),
                _unbroadcast(-g * self.value / other.value**2, other.shape),
            )

        out._backward = backward
        return out

    def __rtruediv__(self, other):
        return _as_var(other) / self

    def __neg__(self):
        out = Var(-self.value, (self,))
        out._backward = lambda g: (-g,)
        return out

    def __matmul__(self, other):
        other = _as_var(other)
        out = Var(self.value @ other.value, (self, other))

        def backward(g):
            return (g @ other.value.T, self.value.T @ g)

        out._backward = backward
        return out

    def __getitem__(self, key):
        out = Var(self.value[key], (self,))

        def backward(g):
            full = np.zeros_like(self.value)
            full[key] = g
            return (full,)

        out._backward = backward
        return out

    # -- graph traversal --------------------------------------------------

    def backward(self):
        """Accumulate gradients of this scalar into every reachable node."""
        if self.value.size != 1:
            raise ValueError("backward() requires a scalar output")
        order = []
        seen = set()
        stack = [(self, False)]
        while stack:
            node, done = stack.pop()
            if done:
                order.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for p in node._parents:
                if id(p) not in seen:
                    stack.append((p, False))

        for node in order:
            node.grad = None
        self.grad = np.ones_like(self.value)
        for node in reversed(order):
            if node._backward is None or node.grad is None:
                continue
            for parent, pg in zip(node._parents, node._backward(node.grad)):
                if parent.grad is None:
                    parent.grad = pg.copy()
                else:
                    parent.grad = parent.grad + pg


def _as_var(x):
    return x if isinstance(x, Var) else Var(x)


def constant(x):
    """A leaf node that never receives a gradient."""
    return Var(x)


# -- elementwise functions ------------------------------------------------


def tanh(x: Var) -> Var:
    t = np.tanh(x.value)
    out = Var(t, (x,))
    out._backward = lambda g: (g * (1.0 - t * t),)
    return out


def sigmoid(x: Var) -> Var:
    s = 1.0 / (1.0 + np.exp(-x.value))
    out = Var(s, (x,))
    out._backward = lambda g: (g * s * (1.0 - s),)
    return out


def exp(x: Var) -> Var:
    e = np.exp(x.value)
    out = Var(e, (x,))
    out._backward = lambda g: (g * e,)
    return out


def log(x: Var) -> Var:
    out = Var(np.log(x.value), (x,))
    out._backward = lambda g: (g / x.value,)
    return out


def square(x: Var) -> Var:
    out = Var(x.value**2, (x,))
    out._backward = lambda g: (g * 2.0 * x.value,)
    return out


def clip(x: Var, lo: float, hi: float) -> Var:
    """Clamp values; gradient is zero outside [lo, hi] (straight-through inside)."""
    mask = (x.value >= lo) & (x.value <= hi)
    out = Var(np.clip(x.value, lo, hi), (x,))
    out._backward = lambda g: (g * mask,)
    return out


# -- reductions -----------------------------------------------------------


def vsum(x: Var, axis=None, keepdims=False) -> Var:
    out = Var(x.value.sum(axis=axis, keepdims=keepdims), (x,))

    def backward(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, x.shape).copy(),)

    out._backward = backward
    return out


def vmean(x: Var, axis=None) -> Var:
    n = x.value.size if axis is None else x.value.shape[axis]
    return vsum(x, axis=axis) * (1.0 / n)


def logsumexp(x: Var, axis: int = -1) -> Var:
    """log(sum(exp(x))) along `axis`; the max shift is treated as constant."""
    m = np.max(x.value, axis=axis, keepdims=True)
    shifted = x - constant(m)
    return log(vsum(exp(shifted), axis=axis)) + constant(np.squeeze(m, axis=axis))


def log_softmax(x: Var, axis: int = -1) -> Var:
    lse = logsumexp(x, axis=axis)
    return x - reshape_keepdim(lse, axis)


def reshape_keepdim(x: Var, axis: int) -> Var:
    """Re-insert a reduced axis of size 1 so the result broadcasts."""
    out = Var(np.expand_dims(x.value, axis), (x,))
    out._backward = lambda g: (np.squeeze(g, axis=axis),)
    return out


def concat(vars_, axis: int = -1) -> Var:
    vals = [v.value for v in vars_]
    out = Var(np.concatenate(vals, axis=axis), tuple(vars_))
    sizes = [v.shape[axis] for v in vals]
    splits = np.cumsum(sizes)[:-1]

    def backward(g):
        return tuple(np.split(g, splits, axis=axis))

    out._backward = backward
    return out
