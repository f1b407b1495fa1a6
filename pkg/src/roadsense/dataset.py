"""Synthetic five-class road data and stratified splitting.

The generators stand in for field recordings.  Acceleration streams are
band-limited noise whose RMS follows pavement > gravel > asphalt, with a
periodic bump train on pavement and Poisson-timed decaying impulses on
the damaged classes.  Images are procedural textures: smooth asphalt,
speckled gravel, a block pattern for pavement, dark blobs for damage.

Every generator draws from independent child streams of one
``SeedSequence`` so a damaged variant shares its base texture/noise
with the undamaged class at the same seed.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import signal as sps
from scipy.ndimage import gaussian_filter

from .errors import DataError
from .neural.model import RoadClass
from .signal_processing import DEFAULT_SAMPLE_RATE

SPLITS = ("train", "val", "test")
DEFAULT_RATIOS = (0.70, 0.15, 0.15)


@dataclass(frozen=True)
class SurfaceParams:
    roughness: float  # RMS of the surface noise, m/s^2
    speed_kmh: float  # sets the noise band; roughly 0.5 Hz per km/h
    bandwidth: float = 0.6  # relative width of the noise band
    bump_hz: float = 0.0  # periodic bump train (pavement joints)
    bump_amplitude: float = 0.0


@dataclass(frozen=True)
class SynthParams:
    surfaces: dict = field(default_factory=lambda: {
        "asphalt": SurfaceParams(roughness=0.25, speed_kmh=50.0, bandwidth=0.3),
        "gravel": SurfaceParams(roughness=0.6, speed_kmh=10.0, bandwidth=0.8),
        "pavement": SurfaceParams(roughness=1.2, speed_kmh=30.0, bandwidth=0.5,
                                  bump_hz=4.0, bump_amplitude=1.5),
    })
    impulse_rate: float = 2.0  # damage events per second
    impulse_magnitude: float = 4.0  # peak, in multiples of the surface roughness
    impulse_decay_s: float = 0.06
    noise_floor: float = 0.02
    sample_rate: float = DEFAULT_SAMPLE_RATE

    def __post_init__(self):
        r = {k: v.roughness for k, v in self.surfaces.items()}
        if not r["pavement"] > r["gravel"] > r["asphalt"]:
            raise ValueError("roughness must satisfy pavement > gravel > asphalt")

    def to_dict(self):
        d = asdict(self)
        d["surfaces"] = {k: asdict(v) for k, v in self.surfaces.items()}
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "surfaces" in d:
            d["surfaces"] = {k: SurfaceParams(**v) for k, v in d["surfaces"].items()}
        return cls(**d)


def _road_class(road_class):
    if isinstance(road_class, RoadClass):
        return road_class
    try:
        return RoadClass[road_class]
    except KeyError:
        raise ValueError(f"unknown road class {road_class!r}") from None


def _base_surface(rc):
    return rc.name.replace("_damaged", "")


def _rngs(seed, n):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def _band_noise(rng, n, fs, surface):
    if surface.roughness == 0:
        return np.zeros(n)
    centre = 0.5 * surface.speed_kmh
    nyq = fs / 2
    lo = max(centre * (1 - surface.bandwidth / 2), 0.5)
    hi = min(centre * (1 + surface.bandwidth / 2), 0.95 * nyq)
    sos = sps.butter(4, [lo, hi], btype="bandpass", fs=fs, output="sos")
    pad = int(fs)  # discard filter start-up transient
    x = sps.sosfilt(sos, rng.standard_normal(n + pad))[pad:]
    return x * (surface.roughness / np.sqrt(np.mean(x ** 2)))


def impulse_times(duration_s, params, seed):
    """Poisson arrival times of damage events (seconds)."""
    rng = _rngs(seed, 3)[1]
    if params.impulse_rate <= 0:
        return np.zeros(0)
    count = rng.poisson(params.impulse_rate * duration_s)
    return np.sort(rng.uniform(0, duration_s, count))


def synth_accel(road_class, duration_s, params=None, seed=0):
    """Z-axis acceleration stream for one road class.

    Returns ``(stream, label)``.  Damaged classes are the base surface
    at the same seed plus decaying impulses, so ``damaged - base`` is
    non-zero only within a few decay constants of each impulse.
    """
    params = params or SynthParams()
    rc = _road_class(road_class)
    if duration_s <= 0:
        raise ValueError("duration_s must be positive")
    fs = params.sample_rate
    n = int(round(duration_s * fs))
    t = np.arange(n) / fs
    surface = params.surfaces[_base_surface(rc)]
    noise_rng, _, phase_rng = _rngs(seed, 3)

    x = _band_noise(noise_rng, n, fs, surface)
    if surface.bump_hz > 0:
        phase = phase_rng.uniform(0, 1)
        frac = (t * surface.bump_hz + phase) % 1.0
        # short raised-cosine bump at every joint
        width = 0.15
        x = x + surface.bump_amplitude * np.where(frac < width, 0.5 - 0.5 * np.cos(2 * np.pi * frac / width), 0)
    x = x + params.noise_floor * phase_rng.standard_normal(n)

    if rc.name.endswith("_damaged"):
        tau = params.impulse_decay_s
        support = int(math.ceil(8 * tau * fs))
        k = np.arange(support) / fs
        kernel = np.exp(-k / tau) * np.sin(2 * np.pi * 12.0 * k + np.pi / 2)
        amp = params.impulse_magnitude * surface.roughness
        for ti in impulse_times(duration_s, params, seed):
            i = int(ti * fs)
            seg = kernel[:max(0, min(support, n - i))]
            x[i:i + len(seg)] += amp * seg
    return x, rc.name


def _smooth(rng, shape, sigma):
    return gaussian_filter(rng.standard_normal(shape), sigma)


def blob_mask(size, seed):
    """Boolean mask of the dark damage blobs used for ``seed``."""
    rng = _rngs(seed, 3)[2]
    yy, xx = np.mgrid[0:size, 0:size]
    mask = np.zeros((size, size), dtype=bool)
    for _ in range(rng.integers(2, 4)):
        cy, cx = rng.uniform(0.2, 0.8, 2) * size
        ry, rx = rng.uniform(0.10, 0.18, 2) * size
        mask |= ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1.0
    return mask


def synth_image(road_class, size=64, seed=0):
    """Grey-scale texture ``(size, size, 1)`` in [0, 1]; returns ``(image, label)``."""
    if size < 16:
        raise ValueError("size must be >= 16")
    rc = _road_class(road_class)
    base = _base_surface(rc)
    rng, aux, _ = _rngs(seed, 3)
    if base == "asphalt":
        img = 0.35 + 0.03 * rng.standard_normal((size, size)) + 0.3 * _smooth(aux, (size, size), 4)
    elif base == "gravel":
        img = 0.6 + 0.12 * rng.standard_normal((size, size))
        stones = aux.random((size, size))
        img[stones < 0.10] = 0.95
        img[stones > 0.90] = 0.3
    else:
        brick = max(size // 8, 4)
        ox, oy = aux.integers(0, brick, 2)
        yy, xx = np.mgrid[0:size, 0:size]
        row = (yy + oy) // brick
        grout = ((yy + oy) % brick < 2) | ((xx + ox + (row % 2) * (brick // 2)) % brick < 2)
        img = np.where(grout, 0.15, 0.8) + 0.04 * rng.standard_normal((size, size))
    img = np.clip(img, 0.0, 1.0)
    if rc.name.endswith("_damaged"):
        mask = blob_mask(size, seed)
        img = np.where(mask, 0.03 + 0.1 * img, img)
    return img[:, :, None], rc.name


def stratified_split(entries, ratios=DEFAULT_RATIOS, seed=0):
    """Assign each entry a split, per class.

    For a class with ``n`` entries, val and test get ``floor(ratio * n)``
    entries and train gets everything left over.  Returns a new list of
    entries (dicts) in the input order, each with a ``split`` key.
    """
    ratios = tuple(float(r) for r in ratios)
    if len(ratios) != 3 or min(ratios) < 0 or not math.isclose(sum(ratios), 1.0, abs_tol=1e-9):
        raise ValueError(f"ratios must be three non-negative numbers summing to 1, got {ratios}")
    by_class = {}
    for i, e in enumerate(entries):
        by_class.setdefault(e["road_class"], []).append(i)
    for name in RoadClass.names():
        if name not in by_class:
            raise DataError(f"class {name!r} has no entries")
    rng = np.random.default_rng(seed)
    split_of = {}
    for name in RoadClass.names():
        idx = np.array(by_class[name])
        n = len(idx)
        n_val = math.floor(ratios[1] * n + 1e-9)
        n_test = math.floor(ratios[2] * n + 1e-9)
        order = idx[rng.permutation(n)]
        for j, i in enumerate(order):
            split_of[int(i)] = "val" if j < n_val else "test" if j < n_val + n_test else "train"
    return [{**e, "split": split_of[i]} for i, e in enumerate(entries)]


def class_counts(entries):
    counts = {s: {c: 0 for c in RoadClass.names()} for s in SPLITS}
    for e in entries:
        counts[e["split"]][e["road_class"]] += 1
    return counts


def make_manifest(entries, seed, generator_params=None, extra=None):
    manifest = {
        "entries": list(entries),
        "class_counts": class_counts(entries) if entries and "split" in entries[0] else {},
        "seed": seed,
        "generator_params": generator_params or {},
    }
    if extra:
        manifest.update(extra)
    return manifest


def save_manifest(manifest, path):
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_manifest(path):
    try:
        with open(path) as fh:
            manifest = json.load(fh)
    except FileNotFoundError:
        raise DataError(f"manifest not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"manifest {path} is not valid JSON: {exc}") from None
    if "entries" not in manifest:
        raise DataError(f"manifest {path} has no 'entries'")
    return manifest
