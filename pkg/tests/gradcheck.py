"""Central finite-difference oracle for the model gradients."""
import numpy as np

from roadsense.neural import ModelSpec, init_model, loss_and_gradients, one_hot

H = 1e-5


def micro_models(num_classes=5):
    """Small float64-friendly specs that together cover every layer type."""
    from roadsense.neural import Conv, Dense, Flatten, MaxPool, ReLU, Softmax
    return {
        "conv": ModelSpec((Conv(3, 3, 1, 1), Conv(2, 3, 2, 1), Flatten(), Dense(num_classes), Softmax()),
                          (6, 6, 2), num_classes),
        "maxpool": ModelSpec((Conv(3, 2), MaxPool(2, 2), Flatten(), Dense(num_classes), Softmax()),
                             (7, 7, 1), num_classes),
        "dense": ModelSpec((Flatten(), Dense(6), ReLU(), Dense(num_classes), Softmax()), (3, 3, 2), num_classes),
        "softmax-ce": ModelSpec((Flatten(), Dense(num_classes), Softmax()), (2, 2, 3), num_classes),
    }


def max_relative_error(spec, seed=0, n=8, max_checks=200):
    """Largest |analytic - numeric| / max(|analytic|, |numeric|, 1e-8) over sampled parameters."""
    rng = np.random.default_rng(seed)
    model = init_model(spec, seed=seed, dtype=np.float64)
    for p in model.params:
        if "b" in p:
            p["b"][:] = rng.normal(0, 0.1, p["b"].shape)
    x = rng.normal(size=(n,) + spec.input_shape)
    y = one_hot(rng.integers(0, spec.num_classes, n), spec.num_classes)
    _, grads = loss_and_gradients(model, x, y)
    worst = 0.0
    for p, g in zip(model.params, grads):
        for key, arr in p.items():
            flat = arr.reshape(-1)
            picks = rng.choice(flat.size, min(flat.size, max_checks), replace=False)
            for i in picks:
                orig = flat[i]
                flat[i] = orig + H
                up = loss_and_gradients(model, x, y)[0]
                flat[i] = orig - H
                down = loss_and_gradients(model, x, y)[0]
                flat[i] = orig
                numeric = (up - down) / (2 * H)
                analytic = g[key].reshape(-1)[i]
                worst = max(worst, abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-8))
    return worst
