"""Minimal feedforward value network with exact gradients.

The network is a scalar-output regressor: tanh hidden layers, linear final
layer. It serves two masters at once -- the coordinator values belief inputs
with it, and the white-box attacks differentiate through it -- so both the
parameter gradients and the input gradient are exact, not approximated.

Nets are immutable: every update returns a fresh instance, which makes it
safe to snapshot a net for evaluation mid-training.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels


class DimensionMismatchError(ValueError):
    """Input vector length does not match the network's input layer."""


class NonFiniteParameterError(ValueError):
    """A parameter became NaN or infinite; the net's contract forbids this."""


@dataclass(frozen=True)
class ValueNet:
    """Flat-parameter feedforward net. ``dims`` = [d_in, hidden..., 1]."""

    dims: np.ndarray
    params: np.ndarray

    def __post_init__(self):
        dims = np.ascontiguousarray(self.dims, dtype=np.int64)
        params = np.ascontiguousarray(self.params, dtype=np.float64)
        if params.size != _kernels.param_count(dims):
            raise DimensionMismatchError(
                f"{params.size} params for layer sizes {dims.tolist()}"
            )
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "params", params)

    @property
    def input_dim(self):
        return int(self.dims[0])


@dataclass(frozen=True)
class GradientReport:
    """Exact gradients of a scalar loss: flat parameter block + input block."""

    param_grads: np.ndarray
    input_grad: np.ndarray


def init_net(layer_dims, rng):
    """Build a net with uniform [-1/sqrt(fan_in), +1/sqrt(fan_in)] init.

    layer_dims must end in 1 (scalar output). The draw order is fixed
    (per layer: weights row-major, then biases) so equal seeds give equal
    nets.
    """
    dims = np.asarray(layer_dims, dtype=np.int64)
    if dims.ndim != 1 or len(dims) < 2:
        raise ValueError("layer_dims needs at least an input and an output size")
    if (dims < 1).any():
        raise ValueError("layer sizes must be positive")
    if dims[-1] != 1:
        raise ValueError("output layer must have size 1")
    params = np.empty(_kernels.param_count(dims))
    off = 0
    for k in range(len(dims) - 1):
        din, dout = int(dims[k]), int(dims[k + 1])
        bound = 1.0 / np.sqrt(din)
        params[off:off + din * dout] = rng.uniform(-bound, bound, din * dout)
        off += din * dout
        params[off:off + dout] = rng.uniform(-bound, bound, dout)
        off += dout
    return ValueNet(dims=dims, params=params)


def layer_parameters(net):
    """Copies of the (weights, biases) per layer, for inspection and tests."""
    return [(w.copy(), b.copy()) for w, b in _kernels._layer_views(net.params, net.dims)]


def net_from_layers(layers):
    """Assemble a net from explicit [(W, b), ...] pairs."""
    dims = [layers[0][0].shape[1]] + [w.shape[0] for w, _ in layers]
    dims = np.asarray(dims, dtype=np.int64)
    params = np.empty(_kernels.param_count(dims))
    for (w, b), (wv, bv) in zip(layers, _kernels._layer_views(params, dims)):
        wv[...] = w
        bv[...] = b
    return ValueNet(dims=dims, params=params)


def _check_input(net, x):
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape != (net.input_dim,):
        raise DimensionMismatchError(
            f"expected input of length {net.input_dim}, got shape {x.shape}"
        )
    return x


def _check_batch(net, x_batch):
    x_batch = np.ascontiguousarray(x_batch, dtype=np.float64)
    if x_batch.ndim != 2 or x_batch.shape[1] != net.input_dim:
        raise DimensionMismatchError(
            f"expected batch of shape (n, {net.input_dim}), got {x_batch.shape}"
        )
    return x_batch


def forward(net, x):
    """Scalar value estimate for one input vector. Pure."""
    x = _check_input(net, x)
    return float(_kernels.value_batch(net.params, net.dims, x[None, :])[0])


def forward_batch(net, x_batch):
    """Value estimates for each row of a batch."""
    x_batch = _check_batch(net, x_batch)
    return _kernels.value_batch(net.params, net.dims, x_batch)


def input_grad_batch(net, x_batch):
    """d(value)/d(input) for each row of a batch."""
    x_batch = _check_batch(net, x_batch)
    return _kernels.input_grad_batch(net.params, net.dims, x_batch)


def backward(net, x, loss_grad=1.0):
    """Exact gradients of ``loss_grad * value(x)`` w.r.t. params and input."""
    x = _check_input(net, x)
    pgrad, igrad = _kernels.backward_single(net.params, net.dims, x, float(loss_grad))
    return GradientReport(param_grads=pgrad, input_grad=igrad)


def backward_batch(net, x_batch, loss_grads):
    """Gradients of ``sum_s loss_grads[s] * value(x_s)``.

    Returns a GradientReport whose param_grads are summed over the batch
    and whose input_grad holds the per-row input gradients.
    """
    x_batch = _check_batch(net, x_batch)
    loss_grads = np.ascontiguousarray(loss_grads, dtype=np.float64)
    if loss_grads.shape != (x_batch.shape[0],):
        raise DimensionMismatchError("one loss gradient per batch row required")
    pgrad, igrads = _kernels.backward_batch(net.params, net.dims, x_batch, loss_grads)
    return GradientReport(param_grads=pgrad, input_grad=igrads)


def sgd_step(net, grads, lr):
    """One gradient-descent step; returns the updated net.

    Raises NonFiniteParameterError if any parameter would leave the finite
    range -- training must never silently continue past a NaN.
    """
    if grads.param_grads.shape != net.params.shape:
        raise DimensionMismatchError("gradient shape does not match parameters")
    new_params = net.params - lr * grads.param_grads
    if not np.isfinite(new_params).all():
        raise NonFiniteParameterError("sgd_step produced a non-finite parameter")
    return ValueNet(dims=net.dims, params=new_params)
