"""Weather condition from five crisp sensor readings, and modality routing.

Membership breakpoints for wind, light, humidity and temperature follow
the published system; rain-sensor terms mirror light/humidity.  The rule
base holds the eight published sample rules plus 24 completion rules.
The completion rules leave wind out and use Low/Medium/High terms of
light, rain and humidity so that at least one rule fires everywhere in
the input space (including wind = 5, where only wind.medium is non-zero,
and temperature = 30, where every temperature term is zero).
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .fuzzy import FuzzyRule, FuzzySystem, FuzzyVariable, infer


class WeatherCondition(str, enum.Enum):
    sunny = "sunny"
    rainy = "rainy"
    foggy = "foggy"
    night = "night"
    day = "day"


class Modality(str, enum.Enum):
    camera = "camera"
    acceleration = "acceleration"


ACCELERATION_CONDITIONS = frozenset({WeatherCondition.rainy, WeatherCondition.foggy, WeatherCondition.night})

# safety first: conditions that route to the accelerometer win ties
TIE_BREAK = ("foggy", "rainy", "night", "day", "sunny")

VARIABLES = (
    FuzzyVariable("wind", (0, 10), {
        "low": (0, 0, 3, 5), "medium": (3, 5, 7), "high": (5, 7, 10, 10)}),
    FuzzyVariable("humidity", (0, 100), {
        "low": (0, 0, 50), "medium": (0, 50, 100), "high": (50, 100, 100)}),
    FuzzyVariable("light", (0, 100), {
        "low": (0, 0, 50), "medium": (0, 50, 100), "high": (50, 100, 100)}),
    FuzzyVariable("temperature", (0, 45), {
        "low": (0, 0, 10, 20), "medium": (10, 22, 30), "high": (30, 35, 45, 45)}),
    FuzzyVariable("rain", (0, 100), {
        "none": (0, 0, 50), "light": (0, 50, 100), "heavy": (50, 100, 100)}),
)

# (wind, humidity, light, temperature, rain) -> condition
SAMPLE_RULES = (
    ("low", "low", "low", "low", "none", "foggy"),
    ("low", "low", "high", "high", "none", "day"),
    ("low", "high", "low", "high", "none", "rainy"),
    ("low", "high", "high", "low", "heavy", "day"),
    ("high", "low", "low", "low", "none", "foggy"),
    ("high", "low", "high", "high", "none", "day"),
    ("high", "high", "low", "high", "none", "rainy"),
    ("high", "high", "high", "low", "heavy", "day"),
)

COMPLETION_RULES = (
    # dark
    ({"light": "low", "rain": "heavy"}, "rainy"),
    ({"light": "low", "rain": "light"}, "rainy"),
    ({"light": "low", "rain": "none", "humidity": "low"}, "foggy"),
    ({"light": "low", "rain": "none", "humidity": "medium"}, "night"),
    ({"light": "low", "rain": "none", "humidity": "high"}, "rainy"),
    # dim
    ({"light": "medium", "rain": "heavy"}, "rainy"),
    ({"light": "medium", "rain": "light"}, "rainy"),
    ({"light": "medium", "rain": "none", "humidity": "high"}, "foggy"),
    ({"light": "medium", "rain": "none", "humidity": "medium"}, "day"),
    ({"light": "medium", "rain": "none", "humidity": "low"}, "day"),
    # bright
    ({"light": "high", "rain": "none", "humidity": "low"}, "day"),
    ({"light": "high", "rain": "none", "humidity": "medium"}, "sunny"),
    ({"light": "high", "rain": "none", "humidity": "high"}, "day"),
    ({"light": "high", "rain": "light"}, "day"),
    ({"light": "high", "rain": "heavy"}, "day"),
    # temperature refinements
    ({"light": "low", "rain": "none", "humidity": "low", "temperature": "low"}, "foggy"),
    ({"light": "low", "rain": "none", "humidity": "medium", "temperature": "low"}, "foggy"),
    ({"light": "low", "rain": "none", "humidity": "medium", "temperature": "high"}, "night"),
    ({"light": "medium", "rain": "none", "humidity": "medium", "temperature": "low"}, "foggy"),
    ({"light": "medium", "rain": "none", "humidity": "low", "temperature": "low"}, "foggy"),
    ({"light": "high", "rain": "none", "humidity": "low", "temperature": "high"}, "day"),
    ({"light": "high", "rain": "none", "humidity": "medium", "temperature": "high"}, "day"),
    ({"light": "high", "rain": "none", "humidity": "medium", "temperature": "low"}, "sunny"),
    ({"light": "high", "rain": "light", "humidity": "high"}, "rainy"),
)


def build_weather_system():
    names = ("wind", "humidity", "light", "temperature", "rain")
    rules = [FuzzyRule(dict(zip(names, row[:5])), row[5]) for row in SAMPLE_RULES]
    rules += [FuzzyRule(ante, out) for ante, out in COMPLETION_RULES]
    return FuzzySystem(VARIABLES, tuple(c.value for c in WeatherCondition), rules, TIE_BREAK)


_SYSTEM = build_weather_system()


@dataclass(frozen=True)
class WeatherReading:
    wind_speed: float
    humidity: float
    light_level: float
    temperature: float
    rain_sensor: float

    def __post_init__(self):
        for name, value in self.as_inputs().items():
            if not math.isfinite(value):
                raise ValueError(f"{name} reading is not finite: {value}")

    def as_inputs(self):
        return {
            "wind": float(self.wind_speed),
            "humidity": float(self.humidity),
            "light": float(self.light_level),
            "temperature": float(self.temperature),
            "rain": float(self.rain_sensor),
        }


def classify_weather(reading, system=None):
    """``(WeatherCondition, activations)`` for a :class:`WeatherReading`."""
    label, activations = infer(system or _SYSTEM, reading.as_inputs())
    return WeatherCondition(label), activations


@dataclass(frozen=True)
class RoutingDecision:
    condition: WeatherCondition
    modality: Modality
    model_key: str
    activations: dict = field(default_factory=dict)


def model_key(modality, condition):
    return f"{Modality(modality).value}-{WeatherCondition(condition).value}"


def route(condition, activations=None):
    condition = WeatherCondition(condition)
    modality = Modality.acceleration if condition in ACCELERATION_CONDITIONS else Modality.camera
    return RoutingDecision(condition, modality, model_key(modality, condition), dict(activations or {}))


def decide(reading, system=None):
    """Classify the weather and route in one step."""
    condition, activations = classify_weather(reading, system)
    return route(condition, activations)
