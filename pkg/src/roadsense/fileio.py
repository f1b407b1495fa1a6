"""Binary PGM/PPM images and the accelerometer CSV formats."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError

SENSOR_COLUMNS = ("timestamp_s", "accel_z")
DRIVE_COLUMNS = ("timestamp_s", "accel_z", "image", "wind_speed", "humidity",
                 "light_level", "temperature", "rain_sensor")


def to_uint8(img):
    return np.round(np.clip(np.asarray(img, dtype=np.float64), 0.0, 1.0) * 255).astype(np.uint8)


def write_pnm(path, img):
    """Write an (H, W), (H, W, 1) or (H, W, 3) array in [0, 1] as P5 or P6, maxval 255."""
    data = to_uint8(img)
    if data.ndim == 3 and data.shape[2] == 1:
        data = data[:, :, 0]
    if data.ndim == 2:
        magic = b"P5"
    elif data.ndim == 3 and data.shape[2] == 3:
        magic = b"P6"
    else:
        raise ValueError(f"cannot write image of shape {data.shape}")
    h, w = data.shape[:2]
    with open(path, "wb") as fh:
        fh.write(b"%s\n%d %d\n255\n" % (magic, w, h))
        fh.write(np.ascontiguousarray(data).tobytes())


def _tokens(data):
    """Yield header tokens and finally the offset of the pixel data."""
    pos = 0
    out = []
    while len(out) < 4:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise DataError("truncated PNM header")
        out.append(data[start:pos])
    return out, pos + 1


def read_pnm(path):
    """Read P5/P6 (maxval <= 255) into a float array (H, W, C) in [0, 1]."""
    with open(path, "rb") as fh:
        data = fh.read()
    (magic, w, h, maxval), offset = _tokens(data)
    if magic not in (b"P5", b"P6"):
        raise DataError(f"{path}: unsupported image format {magic!r}")
    w, h, maxval = int(w), int(h), int(maxval)
    if not 0 < maxval <= 255:
        raise DataError(f"{path}: only 8-bit images are supported (maxval {maxval})")
    c = 1 if magic == b"P5" else 3
    n = w * h * c
    if len(data) - offset < n:
        raise DataError(f"{path}: truncated pixel data")
    pixels = np.frombuffer(data, dtype=np.uint8, count=n, offset=offset).reshape(h, w, c)
    return pixels.astype(np.float64) / maxval


def write_sensor_csv(path, stream, sample_rate, label=None):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SENSOR_COLUMNS + (("label",) if label is not None else ()))
        for i, v in enumerate(stream):
            row = [f"{i / sample_rate:.6f}", repr(float(v))]
            if label is not None:
                row.append(label)
            writer.writerow(row)


def read_sensor_csv(path):
    """Returns ``(timestamps, accel_z, labels or None)``."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header[:2]) != SENSOR_COLUMNS:
            raise DataError(f"{path}: header must start with {','.join(SENSOR_COLUMNS)}")
        has_label = len(header) > 2 and header[2] == "label"
        ts, az, labels = [], [], []
        for line, row in enumerate(reader, start=2):
            try:
                ts.append(float(row[0]))
                az.append(float(row[1]))
            except (ValueError, IndexError):
                raise DataError(f"{path}:{line}: malformed sensor row {row!r}") from None
            if has_label:
                labels.append(row[2] if len(row) > 2 else "")
    return np.array(ts), np.array(az), (labels if has_label else None)


@dataclass(frozen=True)
class DriveLogRecord:
    timestamp_s: float
    accel_z: float
    image: str | None
    wind_speed: float
    humidity: float
    light_level: float
    temperature: float
    rain_sensor: float
    line: int = 0


def read_drive_log(path):
    """Parse a drive log; timestamps must be strictly increasing."""
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            return records
        missing = [c for c in DRIVE_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise DataError(f"{path}:1: drive log is missing columns {missing}")
        prev = -math.inf
        for line, row in enumerate(reader, start=2):
            try:
                values = {c: float(row[c]) for c in DRIVE_COLUMNS if c != "image"}
            except (TypeError, ValueError):
                raise DataError(f"{path}:{line}: malformed drive log row") from None
            if not all(math.isfinite(v) for v in values.values()):
                raise DataError(f"{path}:{line}: non-finite value")
            if values["timestamp_s"] <= prev:
                raise DataError(f"{path}:{line}: timestamps must be strictly increasing")
            prev = values["timestamp_s"]
            records.append(DriveLogRecord(image=row["image"] or None, line=line, **values))
    return records


def write_drive_log(path, records):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DRIVE_COLUMNS)
        for r in records:
            writer.writerow([repr(float(r.timestamp_s)), repr(float(r.accel_z)), r.image or "",
                             r.wind_speed, r.humidity, r.light_level, r.temperature, r.rain_sensor])
