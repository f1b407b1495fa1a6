"""Layer descriptors with numpy forward/backward passes.

Tensors are channels-last: a batch of images is ``(N, H, W, C)``.
Each layer is a small frozen dataclass that knows its output shape,
how to initialise its parameters and how to run forward/backward.
``forward`` returns ``(out, cache)``; ``backward`` takes the upstream
gradient and the cache and returns ``(dx, grads)`` where ``grads`` has
the same keys as the layer's parameter dict.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


def _windows(x, size, stride):
    # (N, H, W, C) -> (N, Ho, Wo, C, size, size)
    win = sliding_window_view(x, (size, size), axis=(1, 2))
    return win[:, ::stride, ::stride]


@dataclass(frozen=True)
class Conv:
    out_channels: int
    kernel: int = 3
    stride: int = 1
    padding: int = 0

    kind = "conv"

    def output_shape(self, shape):
        h, w, _ = shape
        ho = (h + 2 * self.padding - self.kernel) // self.stride + 1
        wo = (w + 2 * self.padding - self.kernel) // self.stride + 1
        if ho < 1 or wo < 1:
            raise ValueError(f"conv kernel {self.kernel} does not fit input {shape}")
        return (ho, wo, self.out_channels)

    def init(self, rng, shape, dtype):
        fan_in = self.kernel * self.kernel * shape[2]
        limit = np.sqrt(6.0 / fan_in)  # He-uniform
        W = rng.uniform(-limit, limit, (self.kernel, self.kernel, shape[2], self.out_channels))
        return {"W": W.astype(dtype), "b": np.zeros(self.out_channels, dtype=dtype)}

    def forward(self, params, x):
        p, k, s = self.padding, self.kernel, self.stride
        xp = np.pad(x, ((0, 0), (p, p), (p, p), (0, 0))) if p else x
        win = _windows(xp, k, s)  # (N, Ho, Wo, C, k, k)
        n, ho, wo, c = win.shape[:4]
        cols = win.transpose(0, 1, 2, 4, 5, 3).reshape(n * ho * wo, k * k * c)
        out = cols @ params["W"].reshape(k * k * c, -1) + params["b"]
        return out.reshape(n, ho, wo, -1), (xp.shape, cols)

    def backward(self, params, dout, cache):
        xp_shape, cols = cache
        p, k, s = self.padding, self.kernel, self.stride
        n, ho, wo, f = dout.shape
        c = xp_shape[3]
        dflat = dout.reshape(-1, f)
        Wmat = params["W"].reshape(k * k * c, f)
        grads = {"W": (cols.T @ dflat).reshape(params["W"].shape), "b": dflat.sum(axis=0)}
        dcols = (dflat @ Wmat.T).reshape(n, ho, wo, k, k, c)
        dxp = np.zeros(xp_shape, dtype=dout.dtype)
        for i in range(k):
            for j in range(k):
                dxp[:, i:i + s * ho:s, j:j + s * wo:s, :] += dcols[:, :, :, i, j, :]
        dx = dxp[:, p:xp_shape[1] - p, p:xp_shape[2] - p, :] if p else dxp
        return dx, grads


@dataclass(frozen=True)
class MaxPool:
    size: int = 2
    stride: int = 2

    kind = "maxpool"

    def output_shape(self, shape):
        h, w, c = shape
        ho = (h - self.size) // self.stride + 1
        wo = (w - self.size) // self.stride + 1
        if ho < 1 or wo < 1:
            raise ValueError(f"maxpool size {self.size} does not fit input {shape}")
        return (ho, wo, c)

    def init(self, rng, shape, dtype):
        return {}

    def forward(self, params, x):
        win = _windows(x, self.size, self.stride)  # (N, Ho, Wo, C, p, p)
        flat = win.reshape(*win.shape[:4], -1)
        idx = flat.argmax(axis=-1)  # first maximum wins ties
        out = np.take_along_axis(flat, idx[..., None], axis=-1)[..., 0]
        return out, (x.shape, idx)

    def backward(self, params, dout, cache):
        x_shape, idx = cache
        p, s = self.size, self.stride
        _, ho, wo, _ = dout.shape
        dx = np.zeros(x_shape, dtype=dout.dtype)
        for i in range(p):
            for j in range(p):
                routed = np.where(idx == i * p + j, dout, 0)
                dx[:, i:i + s * ho:s, j:j + s * wo:s, :] += routed
        return dx, {}


@dataclass(frozen=True)
class ReLU:
    kind = "relu"

    def output_shape(self, shape):
        return shape

    def init(self, rng, shape, dtype):
        return {}

    def forward(self, params, x):
        return np.maximum(x, 0), x > 0

    def backward(self, params, dout, cache):
        return dout * cache, {}


@dataclass(frozen=True)
class Flatten:
    kind = "flatten"

    def output_shape(self, shape):
        return (int(np.prod(shape)),)

    def init(self, rng, shape, dtype):
        return {}

    def forward(self, params, x):
        return x.reshape(x.shape[0], -1), x.shape

    def backward(self, params, dout, cache):
        return dout.reshape(cache), {}


@dataclass(frozen=True)
class Dense:
    units: int

    kind = "dense"

    def output_shape(self, shape):
        if len(shape) != 1:
            raise ValueError(f"dense layer needs a flat input, got {shape}")
        return (self.units,)

    def init(self, rng, shape, dtype):
        limit = np.sqrt(6.0 / (shape[0] + self.units))  # Xavier/Glorot uniform
        W = rng.uniform(-limit, limit, (shape[0], self.units))
        return {"W": W.astype(dtype), "b": np.zeros(self.units, dtype=dtype)}

    def forward(self, params, x):
        return x @ params["W"] + params["b"], x

    def backward(self, params, dout, cache):
        x = cache
        return dout @ params["W"].T, {"W": x.T @ dout, "b": dout.sum(axis=0)}


@dataclass(frozen=True)
class Softmax:
    kind = "softmax"

    def output_shape(self, shape):
        return shape

    def init(self, rng, shape, dtype):
        return {}

    def forward(self, params, x):
        p = softmax(x)
        return p, p

    def backward(self, params, dout, cache):
        # Full Jacobian-vector product; training takes the (p - y) shortcut instead.
        p = cache
        return p * (dout - (dout * p).sum(axis=1, keepdims=True)), {}


def softmax(logits):
    """Row-wise softmax, shifted by the row max so that huge logits stay finite."""
    z = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


LAYER_TYPES = {cls.kind: cls for cls in (Conv, MaxPool, ReLU, Flatten, Dense, Softmax)}


def layer_to_dict(layer):
    return {"type": layer.kind, **asdict(layer)}


def layer_from_dict(d):
    d = dict(d)
    try:
        cls = LAYER_TYPES[d.pop("type")]
    except KeyError as exc:
        raise ValueError(f"unknown layer type {exc}") from None
    return cls(**d)
