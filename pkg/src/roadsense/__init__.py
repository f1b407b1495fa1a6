"""Weather-aware road surface classification.

A fuzzy weather classifier picks the sensing modality (camera or
accelerometer); a from-scratch micro-CNN classifies the road surface
from camera images or accelerometer spectrogram images.
"""
from .errors import ConfigError, DataError, ModelError, NoRuleFiredError, RoadsenseError
from .weather import Modality, RoutingDecision, WeatherCondition, WeatherReading, classify_weather, route

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DataError", "ModelError", "NoRuleFiredError", "RoadsenseError",
    "Modality", "RoutingDecision", "WeatherCondition", "WeatherReading", "classify_weather", "route",
]
