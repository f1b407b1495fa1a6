"""From a z-axis acceleration stream to classifier images."""
import numpy as np

from roadsense.dataset import synth_accel
from roadsense.signal_processing import AccelWindow, frame_energy, segment, stft, to_image

fs = 100.0
stream, label = synth_accel("pavement", 12.0, seed=1)
print(label, stream.shape, "rms", np.sqrt(np.mean(stream ** 2)).round(3))

windows = segment(stream, fs, window_len=256, hop=128)
print(len(windows), "windows, starts:", [w.start_index for w in windows])

spec = stft(windows[0], fft_size=64, frame_hop=16)
print("spectrogram", spec.magnitudes.shape, "bins up to", spec.frequencies[-1], "Hz")
peak = spec.frequencies[spec.magnitudes.mean(axis=1)[1:].argmax() + 1]
print("strongest non-DC band", peak, "Hz")  # the surface noise band, about 0.5 Hz per km/h

# energy bookkeeping with a rectangular taper and no overlap
x = windows[0].samples
rect = stft(AccelWindow(x, fs), 64, 64, "rectangular")
print(frame_energy(rect))
print((x.reshape(4, 64) ** 2).sum(axis=1))

img = to_image(spec)  # 224 x 224 by default
print(img.shape, img.min(), img.max())
small = to_image(spec, 64, 64, channels=3)
print(small.shape)

# rough vs smooth: mean image intensity per class
for rc in ("asphalt", "asphalt_damaged", "gravel", "gravel_damaged", "pavement"):
    s, _ = synth_accel(rc, 2.56, seed=7)
    print(f"{rc:<16} rms {np.sqrt(np.mean(s ** 2)):.3f}  image mean {to_image(stft(AccelWindow(s)), 64, 64).mean():.3f}")
