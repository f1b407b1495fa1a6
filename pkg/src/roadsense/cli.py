"""``roadsense`` command line.

Exit codes: 0 ok, 2 configuration error, 3 data error, 4 model error.
Errors are reported as one line on stderr: ``error[<code>]: <message>``.
"""
from __future__ import annotations

import argparse
import logging
import sys

from . import pipeline
from .errors import RoadsenseError
from .neural import PRESETS
from .weather import WeatherCondition, WeatherReading


def _add_config(p):
    p.add_argument("--config", help="JSON config file; flags override its values")


def _add_signal(p):
    p.add_argument("--sample-rate", type=float, dest="signal.sample_rate")
    p.add_argument("--window-len", type=int, dest="signal.window_len")
    p.add_argument("--hop", type=int, dest="signal.hop")
    p.add_argument("--fft-size", type=int, dest="signal.fft_size")
    p.add_argument("--frame-hop", type=int, dest="signal.frame_hop")
    p.add_argument("--taper", choices=["hann", "rectangular"], dest="signal.taper")
    p.add_argument("--scaling", choices=["log1p", "linear"], dest="signal.scaling")


def build_parser():
    parser = argparse.ArgumentParser(prog="roadsense", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("export-rules", help="write the weather rule base as JSON")
    p.add_argument("--out", default="weather_rules.json")

    p = sub.add_parser("classify-weather", help="fuzzy weather condition and routing for one reading")
    _add_config(p)
    p.add_argument("--rules", dest="rules_path", help="rule-base JSON (default: built-in)")
    for flag in ("wind", "humidity", "light", "temperature", "rain"):
        p.add_argument(f"--{flag}", type=float, required=True)

    p = sub.add_parser("synth", help="generate synthetic camera images and acceleration streams")
    _add_config(p)
    _add_signal(p)
    p.add_argument("--out", required=True)
    p.add_argument("--modality", choices=["camera", "acceleration", "both"], default="both")
    p.add_argument("--per-class", type=int, default=200)
    p.add_argument("--image-size", type=int, dest="image_size")
    p.add_argument("--seed", type=int, dest="seed")

    p = sub.add_parser("split", help="stratified train/val/test split of a manifest")
    _add_config(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--ratios", type=float, nargs=3, default=(0.70, 0.15, 0.15), metavar=("TRAIN", "VAL", "TEST"))
    p.add_argument("--seed", type=int, dest="seed")
    p.add_argument("--out")

    p = sub.add_parser("preprocess", help="spectrogram/resize every entry into classifier images")
    _add_config(p)
    _add_signal(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", help="output directory (default: <manifest dir>/processed)")
    p.add_argument("--image-size", type=int, dest="image_size")

    p = sub.add_parser("train", help="train a model keyed <modality>-<condition>")
    _add_config(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--modality", choices=["camera", "acceleration"], required=True)
    p.add_argument("--condition", choices=[c.value for c in WeatherCondition], required=True)
    p.add_argument("--preset", choices=sorted(PRESETS), default="mini-alexnet")
    p.add_argument("--model-store", dest="model_store")
    p.add_argument("--init-from", help="start from this model's weights")
    p.add_argument("--lr", type=float, dest="train.learning_rate")
    p.add_argument("--batch-size", type=int, dest="train.batch_size")
    p.add_argument("--max-epochs", type=int, dest="train.max_epochs")
    p.add_argument("--patience", type=int, dest="train.patience")
    p.add_argument("--seed", type=int, dest="train.seed")

    p = sub.add_parser("evaluate", help="confusion matrix and classification report")
    p.add_argument("--model", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--split", choices=["train", "val", "test"], default="test")
    p.add_argument("--out", help="write <OUT>.json and <OUT>.txt")

    p = sub.add_parser("simulate", help="replay a drive log through weather routing and the models")
    _add_config(p)
    _add_signal(p)
    p.add_argument("--log", required=True)
    p.add_argument("--model-store", dest="model_store")
    p.add_argument("--rules", dest="rules_path")
    p.add_argument("--out", required=True)
    return parser


_CONFIG_KEYS = ("image_size", "seed", "model_store", "rules_path")


def _config(args):
    overrides = {k: v for k, v in vars(args).items() if k in _CONFIG_KEYS or "." in k}
    return pipeline.load_config(getattr(args, "config", None), overrides)


def run(args):
    cmd = args.command
    if cmd == "export-rules":
        print(pipeline.export_rules(args.out))
        return
    if cmd == "evaluate":
        _, _, text = pipeline.evaluate_model(args.model, args.manifest, args.split, args.out)
        sys.stdout.write(text)
        return

    cfg = _config(args)
    if cmd == "classify-weather":
        from .weather import decide
        reading = WeatherReading(args.wind, args.humidity, args.light, args.temperature, args.rain)
        sys.stdout.write(pipeline.format_decision(decide(reading, pipeline.weather_system(cfg))))
    elif cmd == "synth":
        print(pipeline.synth(args.out, args.modality, args.per_class, cfg.image_size, cfg.seed,
                             signal_cfg=cfg.signal))
    elif cmd == "split":
        print(pipeline.split(args.manifest, tuple(args.ratios), cfg.seed, args.out))
    elif cmd == "preprocess":
        print(pipeline.preprocess(args.manifest, args.out, cfg.image_size, cfg.signal))
    elif cmd == "train":
        print(pipeline.train_model(args.manifest, args.modality, args.condition, cfg.model_store,
                                   args.preset, cfg.train, args.init_from))
    elif cmd == "simulate":
        n = pipeline.simulate(args.log, cfg.model_store, args.out, cfg.signal, pipeline.weather_system(cfg))
        print(f"{n} windows -> {args.out}")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        run(args)
    except RoadsenseError as exc:
        print(f"error[{exc.code}]: {' '.join(str(exc).split())}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"error[data]: file not found: {exc.filename}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error[data]: {exc.strerror}: {exc.filename}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
