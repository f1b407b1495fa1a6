"""Acceleration windows, magnitude STFT and spectrogram images.

Energy convention for :func:`stft`: magnitudes are the raw (unscaled)
one-sided DFT ``|X_k|`` of each tapered frame, ``k = 0 .. n/2``.  For a
rectangular taper Parseval gives, per frame,

    sum(x**2) == (|X_0|**2 + 2 * sum(|X_k|**2, 0 < k < n/2) + |X_{n/2}|**2) / n

which is what :func:`frame_energy` computes.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError

DEFAULT_SAMPLE_RATE = 100.0
DEFAULT_WINDOW_LEN = 256
DEFAULT_FFT_SIZE = 64
DEFAULT_FRAME_HOP = 16


@dataclass(frozen=True)
class AccelWindow:
    samples: np.ndarray
    sample_rate: float = DEFAULT_SAMPLE_RATE
    start_index: int = 0
    label: str | None = None

    def __post_init__(self):
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")


@dataclass(frozen=True)
class Spectrogram:
    magnitudes: np.ndarray  # (frequency_bins, time_frames)
    sample_rate: float
    fft_size: int
    frame_hop: int
    frame_starts: np.ndarray = field(repr=False)

    @property
    def frequencies(self):
        return np.fft.rfftfreq(self.fft_size, d=1.0 / self.sample_rate)

    @property
    def times(self):
        return self.frame_starts / self.sample_rate


def segment(stream, sample_rate=DEFAULT_SAMPLE_RATE, window_len=DEFAULT_WINDOW_LEN,
            hop=None, label=None):
    """Cut ``stream`` into windows at offsets 0, hop, 2*hop, ...; a trailing partial window is dropped."""
    stream = np.asarray(stream, dtype=np.float64)
    hop = window_len if hop is None else hop
    if window_len < 1 or hop < 1:
        raise ValueError("window_len and hop must be >= 1")
    if len(stream) < window_len:
        raise DataError(f"stream of {len(stream)} samples is shorter than one window ({window_len})")
    count = (len(stream) - window_len) // hop + 1
    return [
        AccelWindow(stream[i * hop:i * hop + window_len].copy(), sample_rate, i * hop, label)
        for i in range(count)
    ]


def _taper(name, n):
    if name == "rectangular":
        return np.ones(n)
    if name == "hann":
        return np.hanning(n + 1)[:-1]  # periodic Hann
    raise ValueError(f"unknown taper {name!r}")


def stft(window, fft_size=DEFAULT_FFT_SIZE, frame_hop=DEFAULT_FRAME_HOP, taper="hann"):
    samples = window.samples if isinstance(window, AccelWindow) else np.asarray(window, dtype=np.float64)
    rate = window.sample_rate if isinstance(window, AccelWindow) else DEFAULT_SAMPLE_RATE
    if fft_size < 1 or fft_size & (fft_size - 1):
        raise ValueError(f"fft_size must be a power of two, got {fft_size}")
    if fft_size > len(samples):
        raise ValueError(f"fft_size {fft_size} exceeds window length {len(samples)}")
    if frame_hop < 1:
        raise ValueError("frame_hop must be >= 1")
    starts = np.arange(0, len(samples) - fft_size + 1, frame_hop)
    frames = np.stack([samples[s:s + fft_size] for s in starts]) * _taper(taper, fft_size)
    mags = np.abs(np.fft.rfft(frames, axis=1)).T
    return Spectrogram(mags, rate, fft_size, frame_hop, starts)


def frame_energy(spec):
    """Per-frame signal energy recovered from one-sided magnitudes (see module docstring)."""
    m2 = spec.magnitudes ** 2
    weights = np.full(m2.shape[0], 2.0)
    weights[0] = 1.0
    if spec.fft_size % 2 == 0:
        weights[-1] = 1.0
    return (weights[:, None] * m2).sum(axis=0) / spec.fft_size


def resize_bilinear(img, height, width):
    """Bilinear resize with corner alignment; ``img`` is (H, W) or (H, W, C)."""
    img = np.asarray(img, dtype=np.float64)
    if height < 1 or width < 1:
        raise ValueError("target dimensions must be >= 1")
    h, w = img.shape[:2]

    def coords(n_out, n_in):
        if n_out == 1 or n_in == 1:
            pos = np.zeros(n_out)
        else:
            pos = np.arange(n_out) * ((n_in - 1) / (n_out - 1))
        lo = np.minimum(np.floor(pos).astype(int), n_in - 1)
        hi = np.minimum(lo + 1, n_in - 1)
        return lo, hi, pos - lo

    y0, y1, fy = coords(height, h)
    x0, x1, fx = coords(width, w)
    if img.ndim == 3:
        fy = fy[:, None, None]
        fx = fx[None, :, None]
    else:
        fy = fy[:, None]
        fx = fx[None, :]
    top = img[y0][:, x0] * (1 - fx) + img[y0][:, x1] * fx
    bottom = img[y1][:, x0] * (1 - fx) + img[y1][:, x1] * fx
    return top * (1 - fy) + bottom * fy


def minmax(a):
    lo, hi = a.min(), a.max()
    if hi > lo:
        return (a - lo) / (hi - lo)
    return np.zeros_like(a)


def to_image(spec, target_h=224, target_w=224, scaling="log1p", channels=1):
    """Spectrogram -> ``(target_h, target_w, channels)`` array in [0, 1].

    Low frequencies end up in the bottom rows.  Normalisation is min-max
    per image, applied after the resize so a non-constant image always
    spans exactly [0, 1].
    """
    mags = spec.magnitudes if isinstance(spec, Spectrogram) else np.asarray(spec, dtype=np.float64)
    if scaling == "log1p":
        values = np.log1p(mags)
    elif scaling == "linear":
        values = mags.astype(np.float64)
    else:
        raise ValueError(f"unknown scaling {scaling!r}")
    if isinstance(spec, Spectrogram):
        values = values[::-1]
    img = minmax(resize_bilinear(values, target_h, target_w))
    return np.repeat(img[:, :, None], channels, axis=2)


def window_to_image(samples, size=64, sample_rate=DEFAULT_SAMPLE_RATE, fft_size=DEFAULT_FFT_SIZE,
                    frame_hop=DEFAULT_FRAME_HOP, taper="hann", scaling="log1p", channels=1):
    """Convenience chain: samples -> STFT -> square image."""
    spec = stft(AccelWindow(np.asarray(samples, dtype=np.float64), sample_rate), fft_size, frame_hop, taper)
    return to_image(spec, size, size, scaling, channels)
