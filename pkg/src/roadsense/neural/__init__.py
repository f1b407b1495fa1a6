"""From-scratch micro-CNN: layers, model, SGD training, serialisation."""
from .layers import Conv, Dense, Flatten, MaxPool, ReLU, Softmax, softmax
from .model import (ModelSpec, RoadClass, TrainedModel, backward, forward, init_model, loss,
                    loss_and_gradients, one_hot, predict)
from .presets import PRESETS, build_preset, mini_alexnet, mini_vgg
from .serialization import load_model, save_model
from .training import EarlyStopping, TrainConfig, evaluate_loss, train

__all__ = [
    "Conv", "Dense", "Flatten", "MaxPool", "ReLU", "Softmax", "softmax",
    "ModelSpec", "RoadClass", "TrainedModel", "backward", "forward", "init_model", "loss",
    "loss_and_gradients", "one_hot", "predict",
    "PRESETS", "build_preset", "mini_alexnet", "mini_vgg",
    "load_model", "save_model",
    "EarlyStopping", "TrainConfig", "evaluate_loss", "train",
]
