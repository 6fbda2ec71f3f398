"""Numeric kernels behind the value network.

Every kernel exists twice: a vectorized numpy implementation and a loop
implementation that numba compiles to machine code. The active set is chosen
once at import time: numba when it is importable, unless the environment
variable ``COOPADV_NO_NUMBA=1`` forces the numpy path.
``benchmarks/bench_kernels.py`` times the two against each other.

Parameter layout: all weights and biases live in a single flat float64
vector. Layer k maps dims[k] inputs to dims[k+1] outputs; its weight matrix
is stored row-major at the running offset, immediately followed by its bias
vector. Hidden layers apply tanh, the final layer is linear and has exactly
one output.
"""

import math
import os

import numpy as np

__all__ = [
    "BACKEND",
    "param_count",
    "value_batch",
    "input_grad_batch",
    "backward_single",
    "backward_batch",
    "numpy_kernels",
    "numba_kernels",
]


def param_count(dims):
    """Length of the flat parameter vector for the given layer sizes."""
    dims = np.asarray(dims)
    return int(sum(dims[k + 1] * (dims[k] + 1) for k in range(len(dims) - 1)))


def _layer_views(params, dims):
    """(W, b) views into the flat vector, one pair per layer."""
    views = []
    off = 0
    for k in range(len(dims) - 1):
        din, dout = int(dims[k]), int(dims[k + 1])
        w = params[off:off + din * dout].reshape(dout, din)
        off += din * dout
        b = params[off:off + dout]
        off += dout
        views.append((w, b))
    return views


# -- numpy path -------------------------------------------------------------

def _np_value_batch(params, dims, x_batch):
    layers = _layer_views(params, dims)
    act = x_batch
    last = len(layers) - 1
    for k, (w, b) in enumerate(layers):
        act = act @ w.T + b
        if k < last:
            act = np.tanh(act)
    return act[:, 0]


def _np_input_grad_batch(params, dims, x_batch):
    layers = _layer_views(params, dims)
    last = len(layers) - 1
    acts = [x_batch]
    act = x_batch
    for k, (w, b) in enumerate(layers):
        act = act @ w.T + b
        if k < last:
            act = np.tanh(act)
        acts.append(act)
    grad = np.ones((x_batch.shape[0], 1))
    for k in range(last, -1, -1):
        w, _ = layers[k]
        grad = grad @ w
        if k > 0:
            grad = grad * (1.0 - acts[k] ** 2)
    return grad


def _np_backward_single(params, dims, x, loss_grad):
    layers = _layer_views(params, dims)
    last = len(layers) - 1
    acts = [x]
    act = x
    for k, (w, b) in enumerate(layers):
        act = w @ act + b
        if k < last:
            act = np.tanh(act)
        acts.append(act)
    pgrad = np.zeros_like(params)
    gviews = _layer_views(pgrad, dims)
    delta = np.array([float(loss_grad)])
    input_grad = np.zeros(int(dims[0]))
    for k in range(last, -1, -1):
        w, _ = layers[k]
        gw, gb = gviews[k]
        gw[...] = np.outer(delta, acts[k])
        gb[...] = delta
        upstream = w.T @ delta
        if k > 0:
            delta = upstream * (1.0 - acts[k] ** 2)
        else:
            input_grad = upstream
    return pgrad, input_grad


def _np_backward_batch(params, dims, x_batch, loss_grads):
    """Summed parameter gradient and per-row input gradients for a batch.

    loss_grads[s] is dL/dV for row s; the parameter block comes back
    summed over the batch (callers divide for a mean).
    """
    layers = _layer_views(params, dims)
    last = len(layers) - 1
    acts = [x_batch]
    act = x_batch
    for k, (w, b) in enumerate(layers):
        act = act @ w.T + b
        if k < last:
            act = np.tanh(act)
        acts.append(act)
    pgrad = np.zeros_like(params)
    gviews = _layer_views(pgrad, dims)
    delta = np.ascontiguousarray(loss_grads, dtype=np.float64)[:, None]
    for k in range(last, -1, -1):
        w, _ = layers[k]
        gw, gb = gviews[k]
        gw[...] = delta.T @ acts[k]
        gb[...] = delta.sum(axis=0)
        upstream = delta @ w
        if k > 0:
            delta = upstream * (1.0 - acts[k] ** 2)
    return pgrad, upstream


# -- loop path (numba-compiled when enabled) --------------------------------

def _loop_value_batch(params, dims, x_batch):
    n_layer = dims.shape[0] - 1
    n = x_batch.shape[0]
    wmax = 0
    for k in range(dims.shape[0]):
        if dims[k] > wmax:
            wmax = dims[k]
    out = np.empty(n)
    cur = np.empty(wmax)
    nxt = np.empty(wmax)
    for s in range(n):
        for i in range(dims[0]):
            cur[i] = x_batch[s, i]
        off = 0
        for k in range(n_layer):
            din = dims[k]
            dout = dims[k + 1]
            for o in range(dout):
                acc = 0.0
                base = off + o * din
                for i in range(din):
                    acc += params[base + i] * cur[i]
                acc += params[off + dout * din + o]
                if k < n_layer - 1:
                    acc = math.tanh(acc)
                nxt[o] = acc
            off += dout * (din + 1)
            cur, nxt = nxt, cur
        out[s] = cur[0]
    return out


def _loop_input_grad_batch(params, dims, x_batch):
    n_layer = dims.shape[0] - 1
    n = x_batch.shape[0]
    wmax = 0
    for k in range(dims.shape[0]):
        if dims[k] > wmax:
            wmax = dims[k]
    offs = np.empty(n_layer, np.int64)
    off = 0
    for k in range(n_layer):
        offs[k] = off
        off += dims[k + 1] * (dims[k] + 1)
    grads = np.empty((n, x_batch.shape[1]))
    acts = np.empty((dims.shape[0], wmax))
    delta = np.empty(wmax)
    upstream = np.empty(wmax)
    for s in range(n):
        for i in range(dims[0]):
            acts[0, i] = x_batch[s, i]
        for k in range(n_layer):
            din = dims[k]
            dout = dims[k + 1]
            base = offs[k]
            for o in range(dout):
                acc = 0.0
                row = base + o * din
                for i in range(din):
                    acc += params[row + i] * acts[k, i]
                acc += params[base + dout * din + o]
                if k < n_layer - 1:
                    acc = math.tanh(acc)
                acts[k + 1, o] = acc
        delta[0] = 1.0
        for k in range(n_layer - 1, -1, -1):
            din = dims[k]
            dout = dims[k + 1]
            base = offs[k]
            for i in range(din):
                acc = 0.0
                for o in range(dout):
                    acc += params[base + o * din + i] * delta[o]
                upstream[i] = acc
            if k > 0:
                for i in range(din):
                    delta[i] = upstream[i] * (1.0 - acts[k, i] * acts[k, i])
            else:
                for i in range(din):
                    grads[s, i] = upstream[i]
    return grads


def _loop_backward_single(params, dims, x, loss_grad):
    n_layer = dims.shape[0] - 1
    wmax = 0
    for k in range(dims.shape[0]):
        if dims[k] > wmax:
            wmax = dims[k]
    offs = np.empty(n_layer, np.int64)
    off = 0
    for k in range(n_layer):
        offs[k] = off
        off += dims[k + 1] * (dims[k] + 1)
    acts = np.empty((dims.shape[0], wmax))
    for i in range(dims[0]):
        acts[0, i] = x[i]
    for k in range(n_layer):
        din = dims[k]
        dout = dims[k + 1]
        base = offs[k]
        for o in range(dout):
            acc = 0.0
            row = base + o * din
            for i in range(din):
                acc += params[row + i] * acts[k, i]
            acc += params[base + dout * din + o]
            if k < n_layer - 1:
                acc = math.tanh(acc)
            acts[k + 1, o] = acc
    pgrad = np.zeros_like(params)
    input_grad = np.empty(dims[0])
    delta = np.empty(wmax)
    upstream = np.empty(wmax)
    delta[0] = loss_grad
    for k in range(n_layer - 1, -1, -1):
        din = dims[k]
        dout = dims[k + 1]
        base = offs[k]
        for o in range(dout):
            row = base + o * din
            for i in range(din):
                pgrad[row + i] = delta[o] * acts[k, i]
            pgrad[base + dout * din + o] = delta[o]
        for i in range(din):
            acc = 0.0
            for o in range(dout):
                acc += params[base + o * din + i] * delta[o]
            upstream[i] = acc
        if k > 0:
            for i in range(din):
                delta[i] = upstream[i] * (1.0 - acts[k, i] * acts[k, i])
        else:
            for i in range(din):
                input_grad[i] = upstream[i]
    return pgrad, input_grad


def _loop_backward_batch(params, dims, x_batch, loss_grads):
    # mirrors _loop_backward_single with an outer sample loop; parameter
    # gradients accumulate across rows, input gradients stay per-row
    n_layer = dims.shape[0] - 1
    n = x_batch.shape[0]
    wmax = 0
    for k in range(dims.shape[0]):
        if dims[k] > wmax:
            wmax = dims[k]
    offs = np.empty(n_layer, np.int64)
    off = 0
    for k in range(n_layer):
        offs[k] = off
        off += dims[k + 1] * (dims[k] + 1)
    pgrad = np.zeros_like(params)
    input_grads = np.empty((n, dims[0]))
    acts = np.empty((dims.shape[0], wmax))
    delta = np.empty(wmax)
    upstream = np.empty(wmax)
    for s in range(n):
        for i in range(dims[0]):
            acts[0, i] = x_batch[s, i]
        for k in range(n_layer):
            din = dims[k]
            dout = dims[k + 1]
            base = offs[k]
            for o in range(dout):
                acc = 0.0
                row = base + o * din
                for i in range(din):
                    acc += params[row + i] * acts[k, i]
                acc += params[base + dout * din + o]
                if k < n_layer - 1:
                    acc = math.tanh(acc)
                acts[k + 1, o] = acc
        delta[0] = loss_grads[s]
        for k in range(n_layer - 1, -1, -1):
            din = dims[k]
            dout = dims[k + 1]
            base = offs[k]
            for o in range(dout):
                row = base + o * din
                for i in range(din):
                    pgrad[row + i] += delta[o] * acts[k, i]
                pgrad[base + dout * din + o] += delta[o]
            for i in range(din):
                acc = 0.0
                for o in range(dout):
                    acc += params[base + o * din + i] * delta[o]
                upstream[i] = acc
            if k > 0:
                for i in range(din):
                    delta[i] = upstream[i] * (1.0 - acts[k, i] * acts[k, i])
            else:
                for i in range(din):
                    input_grads[s, i] = upstream[i]
    return pgrad, input_grads


# -- backend selection ------------------------------------------------------

def numpy_kernels():
    """The vectorized set (value_batch, input_grad_batch, backward_single, backward_batch)."""
    return _np_value_batch, _np_input_grad_batch, _np_backward_single, _np_backward_batch


_NUMBA_CACHE = None


def numba_kernels():
    """Compile (lazily, once) and return the numba kernel set.

    Raises ImportError when numba is not installed.
    """
    global _NUMBA_CACHE
    if _NUMBA_CACHE is None:
        from numba import njit
        _NUMBA_CACHE = (
            njit(cache=True)(_loop_value_batch),
            njit(cache=True)(_loop_input_grad_batch),
            njit(cache=True)(_loop_backward_single),
            njit(cache=True)(_loop_backward_batch),
        )
    return _NUMBA_CACHE


def _select_backend():
    disabled = os.environ.get("COOPADV_NO_NUMBA", "0").lower() in ("1", "true", "yes")
    if not disabled:
        try:
            return "numba", numba_kernels()
        except ImportError:
            pass
    return "numpy", numpy_kernels()


BACKEND, (value_batch, input_grad_batch, backward_single, backward_batch) = _select_backend()
