"""Fuzzy weather classification and modality routing, step by step."""
import numpy as np

from roadsense.fuzzy import fuzzify, infer, infer_batch
from roadsense.weather import VARIABLES, WeatherReading, build_weather_system, decide

system = build_weather_system()
print(len(system.rules), "rules over", [v.name for v in system.variables])

# membership degrees of one crisp reading
wind = system.by_name["wind"]
for x in (0, 4, 5, 6, 9):
    print("wind", x, fuzzify(wind, x))

# a dark, dry, cool morning
label, acts = infer(system, {"wind": 1, "humidity": 10, "light": 5, "temperature": 5, "rain": 0})
print("condition:", label)
for name, value in sorted(acts.items(), key=lambda kv: -kv[1]):
    print(f"  {name:<6} {value:.3f}")

# the router picks the sensor that still works in that condition
for reading in (WeatherReading(1, 10, 5, 5, 0), WeatherReading(1, 10, 95, 40, 0),
                WeatherReading(9, 95, 10, 38, 0), WeatherReading(2, 30, 80, 25, 85)):
    d = decide(reading)
    print(reading, "->", d.condition.value, d.modality.value, d.model_key)

# a light sweep at fixed weather shows where the decision flips
light = np.linspace(0, 100, 21)
n = len(light)
index, acts = infer_batch(system, {"wind": np.full(n, 2.0), "humidity": np.full(n, 50.0), "light": light,
                                   "temperature": np.full(n, 25.0), "rain": np.zeros(n)})
for x, i in zip(light, index):
    print(f"light {x:5.1f} -> {system.output_labels[i]}")

# count how often each condition wins on a coarse grid
axes = [np.linspace(*v.universe, 9) for v in VARIABLES]
grid = np.meshgrid(*axes, indexing="ij")
index, _ = infer_batch(system, {v.name: g.ravel() for v, g in zip(VARIABLES, grid)})
labels, counts = np.unique(index, return_counts=True)
print({system.output_labels[i]: int(c) for i, c in zip(labels, counts)})
