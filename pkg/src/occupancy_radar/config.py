"""Radar waveform, array and sampling parameters.

Defaults reproduce a 77 GHz TDM-MIMO FMCW sensor with 2 Tx x 4 Rx active,
98 MHz/us slope, 3.92 GHz sweep, 580 us chirp repetition, 6.25 frames/s and
a 2.2 MHz complex ADC.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

from scipy.constants import c as SPEED_OF_LIGHT

from .errors import ConfigError

CARRIER_FREQUENCY = 77e9


@dataclass(frozen=True)
class RadarConfig:
    chirp_slope: float = 98e12            # Hz/s
    chirp_period: float = 580e-6          # s, includes idle time
    sweep_bandwidth: float = 3920e6       # Hz
    frame_rate: float = 6.25              # frames/s
    adc_rate: float = 2.2e6               # complex samples/s
    start_wavelength: float = SPEED_OF_LIGHT / CARRIER_FREQUENCY
    n_tx: int = 2
    n_rx: int = 4
    n_chirps_per_tx: int = 64
    element_spacing: float = 0.5          # wavelengths

    def __post_init__(self):
        for name in ("chirp_slope", "chirp_period", "sweep_bandwidth", "frame_rate",
                     "adc_rate", "start_wavelength", "element_spacing"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"{name} must be a finite positive number, got {value!r}")
        for name in ("n_tx", "n_rx", "n_chirps_per_tx"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if self.ramp_time > self.chirp_period * (1 + 1e-12):
            raise ConfigError(
                f"active ramp time {self.ramp_time:.6g} s (sweep_bandwidth / chirp_slope) "
                f"exceeds chirp_period {self.chirp_period:.6g} s")
        frame_time = self.n_tx * self.n_chirps_per_tx * self.chirp_period
        if frame_time > (1.0 / self.frame_rate) * (1 + 1e-12):
            raise ConfigError(
                f"n_tx * n_chirps_per_tx * chirp_period = {frame_time:.6g} s does not fit "
                f"in the frame period 1/frame_rate = {1.0 / self.frame_rate:.6g} s")
        if int(math.floor(self.adc_rate * self.ramp_time + 1e-9)) < 1:
            raise ConfigError("ramp too short to collect a single ADC sample")

    @property
    def ramp_time(self) -> float:
        return self.sweep_bandwidth / self.chirp_slope

    @property
    def n_virtual(self) -> int:
        return self.n_tx * self.n_rx

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RadarConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "RadarConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config JSON must be an object")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path) -> "RadarConfig":
        return cls.from_json(Path(path).read_text())

    def save(self, path) -> None:
        Path(path).write_text(self.to_json() + "\n")

    def hash(self) -> str:
        """SHA-256 of the canonical JSON encoding."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()


@dataclass(frozen=True)
class DerivedParams:
    samples_per_chirp: int
    fft_size: int
    range_bin_count: int
    range_resolution: float
    range_bin_spacing: float
    max_range: float
    angular_resolution: float
    n_virtual_channels: int


def next_pow2(n: int) -> int:
    return 1 << max(0, int(n - 1).bit_length())


def derive(config: RadarConfig) -> DerivedParams:
    """Quantities every processing stage needs, computed from a validated config.

    The complex ADC rate bounds the observable beat frequency, so the
    maximum range is ``adc_rate * c / (2 * slope)``.  Angular resolution of
    an L-element half-wavelength array is taken as ``2 / L`` radians.
    """
    if not isinstance(config, RadarConfig):
        raise ConfigError("derive expects a RadarConfig")
    # B/K is often a hair below the exact ratio in binary floating point
    samples = int(math.floor(config.adc_rate * config.ramp_time + 1e-9))
    fft_size = next_pow2(samples)
    L = config.n_virtual
    return DerivedParams(
        samples_per_chirp=samples,
        fft_size=fft_size,
        range_bin_count=fft_size,
        range_resolution=SPEED_OF_LIGHT / (2.0 * config.sweep_bandwidth),
        range_bin_spacing=range_bin_spacing(config, fft_size),
        max_range=config.adc_rate * SPEED_OF_LIGHT / (2.0 * config.chirp_slope),
        angular_resolution=2.0 / L,
        n_virtual_channels=L,
    )


def range_bin_spacing(config: RadarConfig, fft_size: int) -> float:
    return (config.adc_rate / fft_size) * SPEED_OF_LIGHT / (2.0 * config.chirp_slope)


def beat_frequency(config: RadarConfig, target_range: float) -> float:
    return 2.0 * target_range * config.chirp_slope / SPEED_OF_LIGHT
