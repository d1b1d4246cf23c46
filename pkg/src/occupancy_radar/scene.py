"""Forward model: parametric scenes to TDM-MIMO FMCW baseband data cubes.

Each point scatterer contributes, on virtual channel ``l`` at fast-time
``t_f`` and slow-time ``t_s``::

    b * exp(-j * (2*pi*f_b*t_f + 4*pi*r(t_s)/lam + 2*pi*d*l*sin(theta)))

where ``f_b = 2*r*K/c`` is the beat frequency and ``r(t_s)`` is the
instantaneous range including radial velocity and sinusoidal breathing.
Complex white Gaussian noise and an optional per-chirp random-walk phase
(common to every receiver of that chirp) are added on top.

Cubes are laid out already demultiplexed: ``samples[m, l, n]`` holds chirp
slot ``m`` of the transmitter that owns virtual channel ``l`` (Tx ``l //
n_rx``), so the 8 channels of one index ``m`` come from a consecutive pair of
physical chirps.
"""
from __future__ import annotations

import dataclasses
import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .classes import OccupancyClass
from .config import SPEED_OF_LIGHT, RadarConfig, derive
from .errors import SceneError


@dataclass(frozen=True)
class Target:
    range: float
    azimuth: float
    gain: float = 1.0
    velocity: float = 0.0
    breathing_amplitude: float = 0.0
    breathing_rate: float = 0.0
    breathing_phase: float = 0.0

    def __post_init__(self):
        if not self.range > 0:
            raise SceneError(f"target range must be positive, got {self.range}")
        if not abs(self.azimuth) < math.pi / 2:
            raise SceneError(f"target azimuth must lie in (-pi/2, pi/2), got {self.azimuth}")
        if not self.gain > 0:
            raise SceneError(f"target gain must be positive, got {self.gain}")
        if not self.breathing_amplitude >= 0 or not self.breathing_rate >= 0:
            raise SceneError("breathing amplitude and rate must be non-negative")

    @property
    def is_static(self) -> bool:
        return self.velocity == 0 and self.breathing_amplitude == 0


@dataclass(frozen=True)
class Scene:
    targets: tuple = ()
    clutter: tuple = ()
    noise_power: float = 0.0
    phase_noise_std: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        object.__setattr__(self, "clutter", tuple(self.clutter))
        if not self.noise_power >= 0:
            raise SceneError("noise_power must be non-negative")
        if not self.phase_noise_std >= 0:
            raise SceneError("phase_noise_std must be non-negative")
        for c in self.clutter:
            if not c.is_static:
                raise SceneError("clutter scatterers must have zero velocity and no breathing")

    @property
    def scatterers(self) -> tuple:
        return self.targets + self.clutter

    def to_dict(self) -> dict:
        return {
            "targets": [dataclasses.asdict(t) for t in self.targets],
            "clutter": [dataclasses.asdict(t) for t in self.clutter],
            "noise_power": self.noise_power,
            "phase_noise_std": self.phase_noise_std,
            "rng_seed": self.rng_seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Scene":
        known = {"targets", "clutter", "noise_power", "phase_noise_std", "rng_seed"}
        unknown = sorted(set(data) - known)
        if unknown:
            raise SceneError(f"unknown scene keys: {', '.join(unknown)}")
        try:
            targets = tuple(Target(**t) for t in data.get("targets", []))
            clutter = tuple(Target(**t) for t in data.get("clutter", []))
        except TypeError as exc:
            raise SceneError(f"bad scatterer entry: {exc}") from exc
        return cls(targets=targets, clutter=clutter,
                   noise_power=float(data.get("noise_power", 0.0)),
                   phase_noise_std=float(data.get("phase_noise_std", 0.0)),
                   rng_seed=int(data.get("rng_seed", 0)))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2) + "\n")

    @classmethod
    def load(cls, path) -> "Scene":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise SceneError(f"scene file is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


@dataclass
class RawDataCube:
    samples: np.ndarray  # (chirp slot, virtual channel, fast-time sample)
    config: RadarConfig

    def __post_init__(self):
        d = derive(self.config)
        expected = (self.config.n_chirps_per_tx, d.n_virtual_channels, d.samples_per_chirp)
        if self.samples.shape != expected:
            raise SceneError(f"cube shape {self.samples.shape} does not match config {expected}")

    @property
    def energy(self) -> float:
        return float(np.sum(np.abs(self.samples) ** 2))


def slow_time(config: RadarConfig) -> np.ndarray:
    """Start time of the physical chirp feeding each (slot, virtual channel), shape (M, L)."""
    m = np.arange(config.n_chirps_per_tx)[:, None]
    tx = np.arange(config.n_virtual)[None, :] // config.n_rx
    return (m * config.n_tx + tx) * config.chirp_period


def instantaneous_range(target: Target, t_s: np.ndarray) -> np.ndarray:
    r = target.range + target.velocity * t_s
    if target.breathing_amplitude:
        r = r + target.breathing_amplitude * np.sin(
            2 * np.pi * target.breathing_rate * t_s + target.breathing_phase)
    return r


def target_signal(target: Target, config: RadarConfig) -> np.ndarray:
    """Noiseless contribution of one scatterer with identity channel matrix."""
    d = derive(config)
    t_f = np.arange(d.samples_per_chirp) / config.adc_rate
    t_s = slow_time(config)
    r = instantaneous_range(target, t_s)[:, :, None]
    f_b = 2.0 * r * config.chirp_slope / SPEED_OF_LIGHT
    l = np.arange(config.n_virtual)[None, :, None]
    phase = (2 * np.pi * f_b * t_f
             + 4 * np.pi * r / config.start_wavelength
             + 2 * np.pi * config.element_spacing * l * np.sin(target.azimuth))
    return target.gain * np.exp(-1j * phase)


def random_channel_matrix(config: RadarConfig, rng, gain_std=0.1, phase_std=0.1) -> np.ndarray:
    """Diagonal of a random channel gain/phase mismatch matrix (optional Gamma mode)."""
    L = config.n_virtual
    gains = np.abs(1.0 + gain_std * rng.standard_normal(L))
    return gains * np.exp(-1j * phase_std * rng.standard_normal(L))


def synthesize(scene: Scene, config: RadarConfig, channel_gains=None) -> RawDataCube:
    """Synthesize one frame of baseband data for ``scene``.

    ``channel_gains`` is the diagonal of the channel mismatch matrix; the
    default is identity.
    """
    d = derive(config)
    for t in scene.scatterers:
        if t.range >= d.max_range:
            raise SceneError(
                f"scatterer at {t.range:.3f} m is beyond max_range {d.max_range:.3f} m")
    shape = (config.n_chirps_per_tx, config.n_virtual, d.samples_per_chirp)
    x = np.zeros(shape, dtype=np.complex128)
    for t in scene.scatterers:
        x += target_signal(t, config)
    if channel_gains is not None:
        channel_gains = np.asarray(channel_gains, dtype=np.complex128)
        if channel_gains.shape != (config.n_virtual,):
            raise SceneError("channel_gains must have one entry per virtual channel")
        x *= channel_gains[None, :, None]

    rng = np.random.default_rng(scene.rng_seed)
    if scene.phase_noise_std > 0:
        n_phys = config.n_chirps_per_tx * config.n_tx
        walk = np.cumsum(scene.phase_noise_std * rng.standard_normal(n_phys))
        idx = (np.arange(config.n_chirps_per_tx)[:, None] * config.n_tx
               + np.arange(config.n_virtual)[None, :] // config.n_rx)
        x *= np.exp(-1j * walk[idx])[:, :, None]
    if scene.noise_power > 0:
        sigma = math.sqrt(scene.noise_power / 2.0)
        x += sigma * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    return RawDataCube(x, config)


# -- cabin scenarios --------------------------------------------------------

@dataclass(frozen=True)
class CabinGeometry:
    """Seat layout, occupant motion statistics and static cabin clutter.

    Ranges in metres, angles in degrees.  One seat of an occupied row is
    picked at random per scene.
    """
    row_ranges: tuple = (0.8, 1.6, 2.4)
    seat_azimuths_deg: tuple = (-20.0, 20.0)
    range_jitter: float = 0.04
    azimuth_jitter_deg: float = 3.0
    occupant_gain: float = 1.0
    breathing_amplitude: tuple = (0.003, 0.006)
    breathing_rate: tuple = (0.2, 0.5)
    speed: tuple = (0.03, 0.05)     # radial fidgeting speed, random sign
    # (range m, azimuth deg, gain): dashboard, seat backs, side panels
    clutter: tuple = (
        (0.35, 0.0, 3.0),
        (1.05, -20.0, 2.0), (1.05, 20.0, 2.0),
        (1.85, -20.0, 2.0), (1.85, 20.0, 2.0),
        (2.65, -20.0, 2.0), (2.65, 20.0, 2.0),
        (1.3, -50.0, 1.5), (1.3, 50.0, 1.5),
    )
    noise_power: float = 0.1
    phase_noise_std: float = 0.0

    def to_dict(self) -> dict:
        data = dataclasses.asdict(self)
        data["clutter"] = [list(c) for c in self.clutter]
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "CabinGeometry":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise SceneError(f"unknown geometry keys: {', '.join(unknown)}")
        kw = {k: (tuple(tuple(c) for c in v) if k == "clutter" else
                  tuple(v) if isinstance(v, list) else v) for k, v in data.items()}
        return cls(**kw)

    @classmethod
    def load(cls, path) -> "CabinGeometry":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()

    def clutter_targets(self) -> tuple:
        return tuple(Target(range=r, azimuth=math.radians(az), gain=g)
                     for r, az, g in self.clutter)


def scene_for_class(class_label, geometry: CabinGeometry = None, rng_seed: int = 0) -> Scene:
    """Random scene for one occupancy class: one breathing occupant per occupied row."""
    label = OccupancyClass.parse(class_label)
    geometry = geometry or CabinGeometry()
    rng = np.random.default_rng(rng_seed)
    targets = []
    for row in label.rows:
        seat = int(rng.integers(len(geometry.seat_azimuths_deg)))
        rng_off = rng.uniform(-geometry.range_jitter, geometry.range_jitter)
        az_off = rng.uniform(-geometry.azimuth_jitter_deg, geometry.azimuth_jitter_deg)
        targets.append(Target(
            range=geometry.row_ranges[row - 1] + rng_off,
            azimuth=math.radians(geometry.seat_azimuths_deg[seat] + az_off),
            gain=geometry.occupant_gain,
            velocity=rng.choice((-1.0, 1.0)) * rng.uniform(*geometry.speed),
            breathing_amplitude=rng.uniform(*geometry.breathing_amplitude),
            breathing_rate=rng.uniform(*geometry.breathing_rate),
            breathing_phase=rng.uniform(0, 2 * np.pi),
        ))
    return Scene(targets=tuple(targets), clutter=geometry.clutter_targets(),
                 noise_power=geometry.noise_power,
                 phase_noise_std=geometry.phase_noise_std,
                 rng_seed=int(rng.integers(2**63)))


# -- cube export ---------------------------------------------------------

def write_cube(cube: RawDataCube, path) -> Path:
    """Write ``<path>`` as interleaved little-endian float32 (re, im) plus ``<path>.json``."""
    path = Path(path)
    interleaved = np.empty(cube.samples.shape + (2,), dtype="<f4")
    interleaved[..., 0] = cube.samples.real
    interleaved[..., 1] = cube.samples.imag
    path.write_bytes(interleaved.tobytes(order="C"))
    sidecar = {
        "shape": list(cube.samples.shape),
        "axes": ["chirp", "channel", "sample"],
        "dtype": "<f4 interleaved complex",
        "config_hash": cube.config.hash(),
        "config": cube.config.to_dict(),
    }
    side = path.with_name(path.name + ".json")
    side.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return side


def read_cube(path) -> RawDataCube:
    path = Path(path)
    side = json.loads(path.with_name(path.name + ".json").read_text())
    config = RadarConfig.from_dict(side["config"])
    if config.hash() != side["config_hash"]:
        raise SceneError("cube sidecar config hash mismatch")
    raw = np.frombuffer(path.read_bytes(), dtype="<f4").reshape(tuple(side["shape"]) + (2,))
    return RawDataCube(raw[..., 0].astype(np.float64) + 1j * raw[..., 1].astype(np.float64), config)
