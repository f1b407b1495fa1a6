"""Model specification, parameters and the forward/backward passes."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from ..errors import ModelError
from .layers import Dense, Softmax, layer_from_dict, layer_to_dict, softmax

CE_EPS = 1e-12


class RoadClass(enum.IntEnum):
    """The five road surfaces, with their fixed one-hot ordinals."""

    asphalt = 0
    asphalt_damaged = 1
    gravel = 2
    gravel_damaged = 3
    pavement = 4

    @classmethod
    def names(cls):
        return [c.name for c in cls]


@dataclass(frozen=True)
class ModelSpec:
    layers: tuple
    input_shape: tuple
    num_classes: int = len(RoadClass)

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        object.__setattr__(self, "input_shape", tuple(int(v) for v in self.input_shape))
        if len(self.input_shape) != 3 or min(self.input_shape) < 1:
            raise ModelError(f"input_shape must be (H, W, C), got {self.input_shape}")
        if len(self.layers) < 2 or not isinstance(self.layers[-1], Softmax) \
                or self.layers[-2] != Dense(self.num_classes):
            raise ModelError(f"model must end with dense({self.num_classes}), softmax")
        self.shapes()

    def shapes(self):
        """Input shape of every layer followed by the final output shape."""
        out = [self.input_shape]
        for i, layer in enumerate(self.layers):
            try:
                out.append(layer.output_shape(out[-1]))
            except ValueError as exc:
                raise ModelError(f"layer {i} ({layer.kind}): {exc}") from None
        return out

    def to_dict(self):
        return {
            "layers": [layer_to_dict(layer) for layer in self.layers],
            "input_shape": list(self.input_shape),
            "num_classes": self.num_classes,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            layers=tuple(layer_from_dict(ld) for ld in d["layers"]),
            input_shape=tuple(d["input_shape"]),
            num_classes=int(d["num_classes"]),
        )


@dataclass
class TrainedModel:
    spec: ModelSpec
    params: list
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        shapes = self.spec.shapes()
        if len(self.params) != len(self.spec.layers):
            raise ModelError(f"expected {len(self.spec.layers)} parameter groups, got {len(self.params)}")
        rng = np.random.default_rng(0)
        for i, (layer, p) in enumerate(zip(self.spec.layers, self.params)):
            ref = layer.init(rng, shapes[i], np.float64)
            if set(ref) != set(p):
                raise ModelError(f"layer {i} ({layer.kind}) parameters {sorted(p)} != {sorted(ref)}")
            for key in ref:
                if ref[key].shape != p[key].shape:
                    raise ModelError(
                        f"layer {i} ({layer.kind}) {key}: expected shape {ref[key].shape}, got {p[key].shape}")
                if not np.all(np.isfinite(p[key])):
                    raise ModelError(f"layer {i} ({layer.kind}) {key} has non-finite values")

    @property
    def dtype(self):
        for p in self.params:
            for v in p.values():
                return v.dtype
        return np.dtype(np.float64)

    def copy(self):
        params = [{k: v.copy() for k, v in p.items()} for p in self.params]
        return TrainedModel(self.spec, params, dict(self.meta))


def init_model(spec, seed=0, dtype=np.float32):
    """He-uniform conv, Xavier dense, zero biases."""
    rng = np.random.default_rng(seed)
    shapes = spec.shapes()
    params = [layer.init(rng, shapes[i], dtype) for i, layer in enumerate(spec.layers)]
    return TrainedModel(spec, params, {"seed": seed})


def _check_batch(model, x):
    x = np.asarray(x)
    if x.ndim == 3:
        x = x[None]
    if x.shape[1:] != model.spec.input_shape:
        raise ModelError(
            f"layer 0 ({model.spec.layers[0].kind}): expected input shape "
            f"{model.spec.input_shape}, got {x.shape[1:]}")
    return x.astype(model.dtype, copy=False)


def _forward_logits(model, x):
    caches = []
    for layer, p in zip(model.spec.layers[:-1], model.params[:-1]):
        x, cache = layer.forward(p, x)
        caches.append(cache)
    return x, caches


def forward(model, batch):
    """Class probabilities, shape ``(N, num_classes)``."""
    x = _check_batch(model, batch)
    logits, _ = _forward_logits(model, x)
    return softmax(logits)


def loss(probs, labels):
    """Mean categorical cross-entropy; ``labels`` is one-hot (or any row-stochastic matrix)."""
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.float64)
    if probs.shape != labels.shape:
        raise ValueError(f"probs {probs.shape} and labels {labels.shape} differ in shape")
    return float(-(labels * np.log(probs + CE_EPS)).sum(axis=1).mean())


def one_hot(indices, num_classes=len(RoadClass)):
    indices = np.asarray(indices, dtype=int)
    out = np.zeros((len(indices), num_classes))
    out[np.arange(len(indices)), indices] = 1.0
    return out


def loss_and_gradients(model, batch, labels):
    """Cross-entropy of the batch and its gradient for every parameter.

    The softmax/cross-entropy pair is differentiated jointly: the gradient
    reaching the logits is ``(p - y) / N``.
    """
    x = _check_batch(model, batch)
    labels = np.asarray(labels, dtype=x.dtype)
    logits, caches = _forward_logits(model, x)
    probs = softmax(logits)
    value = loss(probs, labels)
    dout = (probs - labels) / x.shape[0]
    grads = [{} for _ in model.spec.layers]
    for i in range(len(model.spec.layers) - 2, -1, -1):
        dout, grads[i] = model.spec.layers[i].backward(model.params[i], dout, caches[i])
    return value, grads


def backward(model, batch, labels):
    return loss_and_gradients(model, batch, labels)[1]


def predict(model, image):
    """Most probable class and the full distribution; ties go to the lowest ordinal."""
    probs = forward(model, image)[0]
    return RoadClass(int(np.argmax(probs))), probs
