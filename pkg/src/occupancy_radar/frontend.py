"""Range FFT and stationary clutter removal.

The baseband model carries the beat tone as ``exp(-j*2*pi*f_b*t)``, so the
range transform uses the positive-exponent kernel

    X[k] = (1/sqrt(N)) * sum_n w[n] x[n] exp(+j*2*pi*k*n/N)

which places a target at range ``r`` in bin ``k = f_b * N / f_s``.  The
scaling is unitary, hence Parseval holds for the windowed, zero-padded
sequence.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .config import SPEED_OF_LIGHT, RadarConfig, derive
from .errors import FFTSizeError, InsufficientSnapshotsError
from .scene import RawDataCube

WINDOWS = ("rectangular", "hann", "hamming")


@dataclass
class RangeProfileCube:
    bins: np.ndarray        # (chirp slot, virtual channel, range bin)
    range_axis: np.ndarray  # metres
    config: RadarConfig = None

    @property
    def n_range_bins(self) -> int:
        return self.bins.shape[2]


def make_window(kind: str, n: int) -> np.ndarray:
    if kind == "rectangular":
        return np.ones(n)
    if kind == "hann":
        return np.hanning(n)
    if kind == "hamming":
        return np.hamming(n)
    raise ValueError(f"unknown window {kind!r}; expected one of {WINDOWS}")


def range_axis(config: RadarConfig, fft_size: int) -> np.ndarray:
    k = np.arange(fft_size)
    return k * (config.adc_rate / fft_size) * SPEED_OF_LIGHT / (2.0 * config.chirp_slope)


def range_fft(cube: RawDataCube, window: str = "hann", fft_size: int = None) -> RangeProfileCube:
    n = cube.samples.shape[-1]
    if fft_size is None:
        fft_size = derive(cube.config).fft_size
    if fft_size < n:
        raise FFTSizeError(f"fft_size {fft_size} is smaller than samples_per_chirp {n}")
    w = make_window(window, n)
    # ifft with norm="ortho" is exactly the unitary +j kernel above
    bins = np.fft.ifft(cube.samples * w, n=fft_size, axis=-1, norm="ortho")
    return RangeProfileCube(bins, range_axis(cube.config, fft_size), cube.config)


def remove_clutter(profiles: RangeProfileCube) -> RangeProfileCube:
    """Subtract the slow-time mean of every (channel, range bin)."""
    if profiles.bins.shape[0] < 2:
        raise InsufficientSnapshotsError("clutter removal needs at least 2 chirps per channel")
    bins = profiles.bins - profiles.bins.mean(axis=0, keepdims=True)
    return RangeProfileCube(bins, profiles.range_axis.copy(), profiles.config)


def dump_range_profile_csv(profiles: RangeProfileCube, path, chirp=0, channel=0) -> None:
    """Debug dump of one range profile as ``range_m,magnitude``."""
    mag = np.abs(profiles.bins[chirp, channel])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["range_m", "magnitude"])
        for r, m in zip(profiles.range_axis, mag):
            writer.writerow([f"{r:.6f}", f"{m:.9g}"])
