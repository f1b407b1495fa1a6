"""Mini-batch SGD with validation-loss early stopping."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np

from ..errors import DataError, TrainingDiverged
from .model import forward, init_model, loss, loss_and_gradients, one_hot

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 1e-4
    batch_size: int = 16
    max_epochs: int = 100
    patience: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0 or self.batch_size < 1 or self.max_epochs < 1 or self.patience < 1:
            raise ValueError(f"invalid training config {self}")

    def to_dict(self):
        return asdict(self)


class EarlyStopping:
    """Tracks the best validation loss; ``update`` returns True when training should stop.

    An epoch counts as an improvement only if its loss is strictly below
    the best so far.  Epochs are numbered from 1.
    """

    def __init__(self, patience=10):
        self.patience = patience
        self.best_loss = np.inf
        self.best_epoch = 0
        self.epoch = 0
        self.bad_epochs = 0

    def update(self, val_loss):
        self.epoch += 1
        if val_loss < self.best_loss:
            self.best_loss = val_loss
            self.best_epoch = self.epoch
            self.bad_epochs = 0
            return False
        self.bad_epochs += 1
        return self.bad_epochs >= self.patience

    @property
    def improved(self):
        return self.best_epoch == self.epoch


def _as_arrays(dataset):
    x, y = dataset
    x = np.asarray(x)
    y = np.asarray(y)
    if len(x) == 0 or len(x) != len(y):
        raise DataError(f"dataset needs matching, non-empty images and labels ({len(x)} vs {len(y)})")
    return x, y


def evaluate_loss(model, x, y, batch_size=64):
    total = 0.0
    for start in range(0, len(x), batch_size):
        xb, yb = x[start:start + batch_size], y[start:start + batch_size]
        total += loss(forward(model, xb), one_hot(yb, model.spec.num_classes)) * len(xb)
    return total / len(x)


def train(spec, train_set, val_set, cfg=TrainConfig(), init=None, monitor=None, dtype=np.float32):
    """Fit ``spec`` on ``train_set = (images, class_indices)``.

    After each epoch the validation loss is computed (or obtained from
    ``monitor(model, epoch)`` when given, which lets tests inject a
    sequence).  Returns the parameters of the best validation epoch;
    ``meta["history"]`` holds per-epoch train/validation losses.
    """
    x_train, y_train = _as_arrays(train_set)
    x_val, y_val = _as_arrays(val_set)
    missing = sorted(set(range(spec.num_classes)) - set(np.unique(y_train).tolist()))
    if missing:
        raise DataError(f"classes {missing} missing from training set")

    model = init.copy() if init is not None else init_model(spec, cfg.seed, dtype)
    if model.spec != spec:
        raise DataError("initial model does not match the requested spec")
    rng = np.random.default_rng(cfg.seed)
    stopper = EarlyStopping(cfg.patience)
    best = model.copy()
    history = []

    for epoch in range(1, cfg.max_epochs + 1):
        order = rng.permutation(len(x_train))
        seen = 0
        running = 0.0
        for b, start in enumerate(range(0, len(order), cfg.batch_size)):
            idx = order[start:start + cfg.batch_size]
            value, grads = loss_and_gradients(
                model, x_train[idx], one_hot(y_train[idx], spec.num_classes))
            if not np.isfinite(value):
                raise TrainingDiverged(epoch, b, value)
            for p, g in zip(model.params, grads):
                for key in p:
                    p[key] -= (cfg.learning_rate * g[key]).astype(p[key].dtype)
            running += value * len(idx)
            seen += len(idx)
        val_loss = monitor(model, epoch) if monitor else evaluate_loss(model, x_val, y_val)
        if not np.isfinite(val_loss):
            raise TrainingDiverged(epoch, "validation", val_loss)
        history.append({"epoch": epoch, "train_loss": running / seen, "val_loss": float(val_loss)})
        stop = stopper.update(val_loss)
        if stopper.improved:
            best = model.copy()
        log.info("epoch %d train %.4f val %.4f", epoch, running / seen, val_loss)
        if stop:
            break

    best.meta = {
        "seed": cfg.seed,
        "config": cfg.to_dict(),
        "epochs_run": len(history),
        "best_epoch": stopper.best_epoch,
        "best_val_loss": float(stopper.best_loss),
        "stopped_early": len(history) < cfg.max_epochs,
        "history": history,
    }
    return best
