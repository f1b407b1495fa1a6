"""End-to-end operations behind the command line.

Every function here reads and writes plain files (PGM images, CSV
streams, JSON manifests/reports, RSM1 models) so that runs with the same
configuration and seed are byte-for-byte reproducible.  Paths stored in
manifests are relative to the manifest's directory.
"""
from __future__ import annotations

import csv
import json
import logging
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
from filelock import FileLock

from . import dataset, fileio
from .errors import ConfigError, DataError, ModelError
from .evaluation import confusion, render_text, report
from .fuzzy import dump_system, load_system
from .neural import RoadClass, TrainConfig, build_preset, forward, load_model, save_model, train
from .signal_processing import (DEFAULT_FFT_SIZE, DEFAULT_FRAME_HOP, DEFAULT_SAMPLE_RATE,
                                DEFAULT_WINDOW_LEN, resize_bilinear, segment, window_to_image)
from .weather import Modality, WeatherCondition, WeatherReading, build_weather_system, decide, model_key

log = logging.getLogger(__name__)

SIMULATION_COLUMNS = ("window_start", "condition", "modality", "model_key", "predicted_class", "probability")
MODEL_SUFFIX = ".rsm"


@dataclass(frozen=True)
class SignalConfig:
    sample_rate: float = DEFAULT_SAMPLE_RATE
    window_len: int = DEFAULT_WINDOW_LEN
    hop: int = DEFAULT_WINDOW_LEN
    fft_size: int = DEFAULT_FFT_SIZE
    frame_hop: int = DEFAULT_FRAME_HOP
    taper: str = "hann"
    scaling: str = "log1p"


@dataclass(frozen=True)
class PipelineConfig:
    data_root: str = "data"
    model_store: str = "models"
    rules_path: str | None = None
    image_size: int = 64
    seed: int = 0
    signal: SignalConfig = field(default_factory=SignalConfig)
    train: TrainConfig = field(default_factory=TrainConfig)

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"unknown config keys {unknown}")
        try:
            if "signal" in d:
                d["signal"] = _strict(SignalConfig, d["signal"], "signal")
            if "train" in d:
                d["train"] = _strict(TrainConfig, d["train"], "train")
            cfg = cls(**d)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from None
        if cfg.rules_path is not None and not os.path.exists(cfg.rules_path):
            raise ConfigError(f"rules_path does not exist: {cfg.rules_path}")
        return cfg

    def to_dict(self):
        return asdict(self)


def _strict(cls, d, section):
    unknown = sorted(set(d) - {f.name for f in fields(cls)})
    if unknown:
        raise ConfigError(f"unknown keys in {section!r}: {unknown}")
    return cls(**d)


def load_config(path=None, overrides=None):
    """Config file (JSON) merged with flag overrides; overrides win."""
    raw = {}
    if path is not None:
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError("config file must hold a JSON object")
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        section, _, name = key.rpartition(".")
        target = raw.setdefault(section, {}) if section else raw
        target[name] = value
    return PipelineConfig.from_dict(raw)


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


# -- rules and weather -------------------------------------------------------

def export_rules(out_path):
    out_path = Path(out_path)
    try:
        dump_system(build_weather_system(), out_path)
    except OSError as exc:
        raise ConfigError(f"cannot write {out_path}: {exc.strerror}") from None
    return out_path


def weather_system(cfg=None):
    if cfg is not None and cfg.rules_path:
        try:
            return load_system(cfg.rules_path)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load rule base {cfg.rules_path}: {exc}") from None
    return build_weather_system()


def format_decision(decision):
    lines = [
        f"condition: {decision.condition.value}",
        f"modality: {decision.modality.value}",
        f"model_key: {decision.model_key}",
        "",
        f"{'condition':<10} activation",
    ]
    for label, value in decision.activations.items():
        lines.append(f"{label:<10} {value:.4f}")
    return "\n".join(lines) + "\n"


# -- data ------------------------------------------------------------------

def _entry_seed(seed, modality, road_class, i):
    return [int(seed), 0 if modality == "camera" else 1, int(RoadClass[road_class]), int(i)]


def synth(out_dir, modality="both", per_class=200, image_size=64, seed=0, params=None,
          signal_cfg=SignalConfig()):
    """Generate raw synthetic data and an (unsplit) manifest ``out_dir/manifest.json``."""
    out_dir = Path(out_dir)
    modalities = ["camera", "acceleration"] if modality == "both" else [Modality(modality).value]
    params = params or dataset.SynthParams(sample_rate=signal_cfg.sample_rate)
    duration = signal_cfg.window_len / signal_cfg.sample_rate
    entries = []
    for mod in modalities:
        for rc in RoadClass:
            folder = out_dir / "raw" / mod / rc.name
            folder.mkdir(parents=True, exist_ok=True)
            for i in range(per_class):
                s = _entry_seed(seed, mod, rc.name, i)
                if mod == "camera":
                    img, _ = dataset.synth_image(rc, image_size, s)
                    path = folder / f"{rc.name}_{i:04d}.pgm"
                    fileio.write_pnm(path, img)
                else:
                    stream, _ = dataset.synth_accel(rc, duration, params, s)
                    path = folder / f"{rc.name}_{i:04d}.csv"
                    fileio.write_sensor_csv(path, stream, params.sample_rate, rc.name)
                entries.append({"path": path.relative_to(out_dir).as_posix(), "modality": mod,
                                "road_class": rc.name})
    manifest = dataset.make_manifest(entries, seed, {
        "synth": params.to_dict(), "per_class": per_class, "image_size": image_size,
        "window_len": signal_cfg.window_len})
    path = out_dir / "manifest.json"
    dataset.save_manifest(manifest, path)
    return path


def split(manifest_path, ratios=dataset.DEFAULT_RATIOS, seed=0, out_path=None):
    """Stratify every modality independently and write the manifest (in place by default)."""
    manifest = dataset.load_manifest(manifest_path)
    entries = manifest["entries"]
    result = [None] * len(entries)
    for mod in sorted({e["modality"] for e in entries}):
        idx = [i for i, e in enumerate(entries) if e["modality"] == mod]
        try:
            assigned = dataset.stratified_split([entries[i] for i in idx], ratios, seed)
        except DataError as exc:
            raise DataError(f"{mod}: {exc}") from None
        for i, e in zip(idx, assigned):
            result[i] = e
    manifest["entries"] = result
    manifest["class_counts"] = {
        mod: dataset.class_counts([e for e in result if e["modality"] == mod])
        for mod in sorted({e["modality"] for e in result})
    }
    manifest["split_seed"] = seed
    manifest["ratios"] = list(ratios)
    out_path = Path(out_path or manifest_path)
    dataset.save_manifest(manifest, out_path)
    return out_path


def preprocess(manifest_path, out_dir=None, image_size=64, signal_cfg=SignalConfig()):
    """Turn every entry into a classifier-ready PGM and write ``out_dir/manifest.json``.

    Acceleration streams are segmented; each window becomes one
    spectrogram image inheriting the stream's class and split.  Camera
    images are resized to ``image_size``.
    """
    manifest_path = Path(manifest_path)
    root = manifest_path.parent
    manifest = dataset.load_manifest(manifest_path)
    out_dir = Path(out_dir) if out_dir is not None else root / "processed"
    entries = []
    for e in manifest["entries"]:
        src = root / e["path"]
        stem = Path(e["path"]).with_suffix("")
        if e["modality"] == "acceleration":
            _, az, _ = fileio.read_sensor_csv(src)
            windows = segment(az, signal_cfg.sample_rate, signal_cfg.window_len, signal_cfg.hop, e["road_class"])
            images = [(f"_w{w.start_index:06d}", window_to_image(
                w.samples, image_size, signal_cfg.sample_rate, signal_cfg.fft_size,
                signal_cfg.frame_hop, signal_cfg.taper, signal_cfg.scaling)) for w in windows]
        else:
            img = fileio.read_pnm(src)
            if img.shape[:2] != (image_size, image_size):
                img = resize_bilinear(img, image_size, image_size)
            images = [("", img[:, :, :1])]
        for suffix, img in images:
            rel = Path("images") / f"{stem.as_posix().replace('raw/', '', 1)}{suffix}.pgm"
            (out_dir / rel).parent.mkdir(parents=True, exist_ok=True)
            fileio.write_pnm(out_dir / rel, img)
            entries.append({**e, "path": rel.as_posix(),
                            "source": os.path.relpath(src, out_dir).replace(os.sep, "/")})
    out = dataset.make_manifest(entries, manifest.get("seed"), manifest.get("generator_params"), {
        "image_size": image_size, "signal": asdict(signal_cfg)})
    if entries and "split" in entries[0]:
        out["class_counts"] = {
            mod: dataset.class_counts([x for x in entries if x["modality"] == mod])
            for mod in sorted({x["modality"] for x in entries})
        }
    out_path = out_dir / "manifest.json"
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset.save_manifest(out, out_path)
    return out_path


def load_split(manifest_path, modality, split_name, channels=1):
    """``(images, class_indices)`` for one modality and split of a processed manifest."""
    manifest_path = Path(manifest_path)
    manifest = dataset.load_manifest(manifest_path)
    chosen = [e for e in manifest["entries"]
              if e["modality"] == modality and e.get("split") == split_name]
    if not chosen:
        raise DataError(f"no {modality} entries in split {split_name!r} of {manifest_path}")
    images = []
    for e in chosen:
        img = fileio.read_pnm(manifest_path.parent / e["path"])
        if img.shape[2] != channels:
            img = np.repeat(img[:, :, :1], channels, axis=2)
        images.append(img)
    labels = np.array([RoadClass[e["road_class"]].value for e in chosen])
    return np.stack(images).astype(np.float32), labels


# -- models ------------------------------------------------------------------

def _store_lock(store):
    store = Path(store)
    store.mkdir(parents=True, exist_ok=True)
    return FileLock(str(store / ".lock"))


def model_path(store, key):
    return Path(store) / f"{key}{MODEL_SUFFIX}"


def train_model(manifest_path, modality, condition, model_store, preset="mini-alexnet",
                cfg=TrainConfig(), init_from=None):
    """Train one (modality, condition) model; writes model, JSON report and loss-curve CSV."""
    modality = Modality(modality).value
    key = model_key(modality, condition)
    x_train, y_train = load_split(manifest_path, modality, "train")
    x_val, y_val = load_split(manifest_path, modality, "val")
    spec = build_preset(preset, x_train.shape[1:])
    init = None
    if init_from is not None:
        init = _load(init_from)
        if init.spec != spec:
            raise ModelError(f"initial model {init_from} does not match preset {preset!r}")
    model = train(spec, (x_train, y_train), (x_val, y_val), cfg, init=init)
    model.meta.update({"model_key": key, "preset": preset, "modality": modality,
                       "condition": WeatherCondition(condition).value})
    store = Path(model_store)
    with _store_lock(store):
        save_model(model, model_path(store, key))
        _write_json(store / f"{key}.train.json", {
            "model_key": key, "preset": preset, "patience": cfg.patience,
            "stopping_epoch": model.meta["epochs_run"], "best_epoch": model.meta["best_epoch"],
            "stopped_early": model.meta["stopped_early"], "config": cfg.to_dict(),
            "history": model.meta["history"],
        })
        with open(store / f"{key}.loss.csv", "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["epoch", "train_loss", "val_loss"])
            for h in model.meta["history"]:
                writer.writerow([h["epoch"], repr(h["train_loss"]), repr(h["val_loss"])])
    return model_path(store, key)


def _load(path):
    try:
        return load_model(path)
    except FileNotFoundError:
        raise ModelError(f"model not found: {path}") from None


def evaluate_model(model_path_, manifest_path, split_name="test", out_prefix=None):
    """Confusion matrix and report for one split; optionally writes ``<prefix>.json`` / ``.txt``."""
    model = _load(model_path_)
    modality = model.meta.get("modality")
    if modality is None:
        raise ModelError(f"{model_path_} does not record its modality")
    x, y = load_split(manifest_path, modality, split_name, channels=model.spec.input_shape[2])
    pred = np.concatenate([forward(model, x[i:i + 64]).argmax(axis=1) for i in range(0, len(x), 64)])
    cm = confusion(y, pred, len(RoadClass), RoadClass.names())
    rep = report(cm)
    text = render_text(rep)
    if out_prefix is not None:
        _write_json(f"{out_prefix}.json", {"split": split_name, "model_key": model.meta.get("model_key"),
                                           "confusion_matrix": cm.to_dict(), "report": rep.to_dict()})
        with open(f"{out_prefix}.txt", "w") as fh:
            fh.write(text)
    return cm, rep, text


# -- simulation --------------------------------------------------------------

def simulate(log_path, model_store, out_path, signal_cfg=SignalConfig(), system=None):
    """Replay a drive log window by window: weather -> route -> preprocess -> predict.

    Weather is re-evaluated per window from the mean sensor readings over
    the window.  Returns the number of rows written.
    """
    log_path = Path(log_path)
    records = fileio.read_drive_log(log_path)
    system = system or build_weather_system()
    rows = []
    if records:
        az = np.array([r.accel_z for r in records])
        if len(az) < signal_cfg.window_len:
            raise DataError(f"{log_path}: log has {len(az)} samples, fewer than one window ({signal_cfg.window_len})")
        models = {}
        with _store_lock(model_store):
            for w in segment(az, signal_cfg.sample_rate, signal_cfg.window_len, signal_cfg.hop):
                span = records[w.start_index:w.start_index + signal_cfg.window_len]
                reading = WeatherReading(*(float(np.mean([getattr(r, f) for r in span])) for f in (
                    "wind_speed", "humidity", "light_level", "temperature", "rain_sensor")))
                decision = decide(reading, system)
                if decision.model_key not in models:
                    path = model_path(model_store, decision.model_key)
                    if not path.exists():
                        raise ModelError(f"no model for {decision.model_key} in {model_store}")
                    models[decision.model_key] = load_model(path)
                model = models[decision.model_key]
                h, wd, c = model.spec.input_shape
                if decision.modality is Modality.acceleration:
                    img = window_to_image(w.samples, h, signal_cfg.sample_rate, signal_cfg.fft_size,
                                          signal_cfg.frame_hop, signal_cfg.taper, signal_cfg.scaling, c)
                else:
                    ref = next((r for r in span if r.image), None)
                    if ref is None:
                        raise DataError(f"{log_path}:{span[0].line}: camera window has no image")
                    try:
                        img = fileio.read_pnm(log_path.parent / ref.image)
                    except FileNotFoundError:
                        raise DataError(f"{log_path}:{ref.line}: image not found: {ref.image}") from None
                    img = resize_bilinear(img, h, wd)
                    img = img[:, :, :1] if c == 1 else np.repeat(img[:, :, :1], c, axis=2)
                probs = forward(model, img)[0]
                k = int(np.argmax(probs))
                rows.append([repr(records[w.start_index].timestamp_s), decision.condition.value,
                             decision.modality.value, decision.model_key, RoadClass(k).name,
                             f"{probs[k]:.6f}"])
    with open(out_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SIMULATION_COLUMNS)
        writer.writerows(rows)
    return len(rows)


def synth_drive_log(out_path, conditions, seconds_per_segment=10.0, seed=0, image_size=64,
                    signal_cfg=SignalConfig()):
    """Write a synthetic drive log.

    ``conditions`` is a list of ``(road_class, WeatherReading)`` segments;
    each segment contributes ``seconds_per_segment`` of acceleration and
    one camera frame per second (written next to the log).
    """
    out_path = Path(out_path)
    frames = out_path.parent / f"{out_path.stem}_frames"
    frames.mkdir(parents=True, exist_ok=True)
    fs = signal_cfg.sample_rate
    records = []
    t0 = 0
    for j, (road_class, reading) in enumerate(conditions):
        stream, _ = dataset.synth_accel(road_class, seconds_per_segment, dataset.SynthParams(sample_rate=fs),
                                        [int(seed), 2, j])
        for i, a in enumerate(stream):
            image = None
            if i % int(fs) == 0:
                img, _ = dataset.synth_image(road_class, image_size, [int(seed), 3, j, i])
                name = f"seg{j:03d}_{i:06d}.pgm"
                fileio.write_pnm(frames / name, img)
                image = f"{frames.name}/{name}"
            records.append(fileio.DriveLogRecord(
                round((t0 + i) / fs, 6), float(a), image, reading.wind_speed, reading.humidity,
                reading.light_level, reading.temperature, reading.rain_sensor))
        t0 += len(stream)
    fileio.write_drive_log(out_path, records)
    return out_path
