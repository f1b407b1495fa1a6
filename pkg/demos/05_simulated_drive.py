"""A simulated drive: weather changes, the router switches sensors.

Runs the whole pipeline at toy scale in a temporary directory.
"""
import csv
import tempfile
from pathlib import Path

from roadsense import pipeline
from roadsense.neural import TrainConfig
from roadsense.weather import WeatherReading

root = Path(tempfile.mkdtemp(prefix="roadsense-"))
data, store = root / "data", root / "models"
print("working in", root)

pipeline.synth(data, "both", per_class=20, image_size=32, seed=0)
pipeline.split(data / "manifest.json", seed=0)
manifest = pipeline.preprocess(data / "manifest.json", image_size=32)

cfg = TrainConfig(learning_rate=1e-3, max_epochs=10)
for modality, condition in (("camera", "day"), ("camera", "sunny"), ("acceleration", "foggy"),
                            ("acceleration", "night"), ("acceleration", "rainy")):
    path = pipeline.train_model(manifest, modality, condition, store, "mini-vgg", cfg)
    print("trained", path.name)

segments = [
    ("asphalt", WeatherReading(2, 30, 90, 28, 0)),          # bright, dry
    ("gravel", WeatherReading(6, 95, 40, 18, 70)),          # rain
    ("pavement", WeatherReading(1, 40, 3, 12, 0)),          # night
    ("asphalt_damaged", WeatherReading(1, 10, 5, 5, 0)),    # dark, dry, cold
]
log = pipeline.synth_drive_log(root / "drive.csv", segments, seconds_per_segment=5.12, image_size=32)
n = pipeline.simulate(log, store, root / "simulation.csv")
print(n, "windows")
with open(root / "simulation.csv") as fh:
    for row in csv.DictReader(fh):
        print(row)
