"""Desk-scale architecture presets sharing the dense-256/softmax head."""
from __future__ import annotations

from .layers import Conv, Dense, Flatten, MaxPool, ReLU, Softmax
from .model import ModelSpec, RoadClass

HEAD_UNITS = 256


def _head(num_classes):
    return (Flatten(), Dense(HEAD_UNITS), ReLU(), Dense(num_classes), Softmax())


def mini_vgg(input_shape=(64, 64, 1), num_classes=len(RoadClass), widths=(8, 16, 32)):
    """Three conv3x3/relu/maxpool2 blocks then the shared head."""
    layers = []
    for w in widths:
        layers += [Conv(w, kernel=3, padding=1), ReLU(), MaxPool(2, 2)]
    return ModelSpec(tuple(layers) + _head(num_classes), input_shape, num_classes)


def mini_alexnet(input_shape=(64, 64, 1), num_classes=len(RoadClass)):
    """Two wide-kernel convolutions (7x7 stride 2, then 5x5) then the head.

    There is no pooling after the second convolution: the wide flattened
    feature vector is what lets plain SGD at lr 1e-4 make progress.
    """
    layers = (
        Conv(32, kernel=7, stride=2, padding=3), ReLU(), MaxPool(2, 2),
        Conv(64, kernel=5, padding=2), ReLU(),
    )
    return ModelSpec(layers + _head(num_classes), input_shape, num_classes)


PRESETS = {"mini-vgg": mini_vgg, "mini-alexnet": mini_alexnet}


def build_preset(name, input_shape=(64, 64, 1), num_classes=len(RoadClass)):
    try:
        factory = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return factory(tuple(input_shape), num_classes)
