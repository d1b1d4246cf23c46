"""Capon (MVDR) range-azimuth mapping over the virtual array."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from .errors import InsufficientSnapshotsError, NotPositiveDefiniteError
from .frontend import RangeProfileCube

DEFAULT_LOADING = 0.01
ABSOLUTE_LOADING = 1e-12


def default_angle_grid() -> np.ndarray:
    """181 angles from -90 to +90 degrees, 1 degree apart, in radians."""
    return np.deg2rad(np.arange(-90, 91, dtype=float))


@dataclass
class CovarianceMatrix:
    entries: np.ndarray
    loading: float = 0.0
    degenerate: bool = False

    @property
    def size(self) -> int:
        return self.entries.shape[0]


@dataclass
class RangeAzimuthMap:
    values: np.ndarray       # (range bin, angle)
    range_axis: np.ndarray   # metres
    angle_axis: np.ndarray   # radians

    @property
    def shape(self):
        return self.values.shape

    def to_db(self) -> np.ndarray:
        return 10.0 * np.log10(self.values)


def _load(R: np.ndarray, loading_factor: float):
    L = R.shape[-1]
    trace = np.real(np.trace(R))
    if loading_factor <= 0:
        return R, 0.0, False
    if trace <= 0:
        return R + ABSOLUTE_LOADING * np.eye(L), ABSOLUTE_LOADING, True
    delta = loading_factor * trace / L
    return R + delta * np.eye(L), delta, False


def sample_covariance(snapshots: np.ndarray, loading_factor: float = 0.0) -> CovarianceMatrix:
    """Loaded sample covariance of snapshot vectors stacked as rows, shape (M, L)."""
    if loading_factor < 0:
        raise ValueError("loading_factor must be non-negative")
    X = np.asarray(snapshots, dtype=np.complex128)
    if X.ndim != 2 or X.shape[0] == 0:
        raise InsufficientSnapshotsError("covariance needs at least one snapshot")
    R = X.T @ X.conj() / X.shape[0]
    R = 0.5 * (R + R.conj().T)
    R, delta, degenerate = _load(R, loading_factor)
    return CovarianceMatrix(R, delta, degenerate)


def estimate_covariance(profiles: RangeProfileCube, range_bin: int,
                        loading_factor: float = DEFAULT_LOADING) -> CovarianceMatrix:
    """Covariance of the virtual-channel vector at one range bin, chirps as snapshots."""
    return sample_covariance(profiles.bins[:, :, range_bin], loading_factor)


def steering(theta, L: int, spacing: float = 0.5) -> np.ndarray:
    """Uniform-linear-array steering vector ``exp(-j*2*pi*spacing*l*sin(theta))``.

    ``theta`` may be an array of angles; the result then has shape (L, n_angles).
    """
    theta = np.asarray(theta, dtype=float)
    if np.any(np.abs(theta) > np.pi / 2):
        raise ValueError("steering angles must lie in [-pi/2, pi/2]")
    l = np.arange(L).reshape((L,) + (1,) * theta.ndim)
    return np.exp(-2j * np.pi * spacing * l * np.sin(theta))


def _cholesky(R: np.ndarray) -> np.ndarray:
    try:
        return la.cholesky(R, lower=True)
    except la.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            "covariance is not positive definite; increase the diagonal loading") from exc


def capon_spectrum(R, angle_grid=None, spacing: float = 0.5) -> np.ndarray:
    """``1 / (a^H R^-1 a)`` over ``angle_grid`` via a Cholesky solve."""
    entries = R.entries if isinstance(R, CovarianceMatrix) else np.asarray(R)
    if angle_grid is None:
        angle_grid = default_angle_grid()
    A = steering(np.asarray(angle_grid, dtype=float), entries.shape[0], spacing)
    C = _cholesky(entries)
    # a^H R^-1 a = ||C^-1 a||^2 with R = C C^H
    W = la.solve_triangular(C, A, lower=True)
    return 1.0 / np.sum(np.abs(W) ** 2, axis=0)


def range_azimuth_map(profiles: RangeProfileCube, angle_grid=None,
                      loading_factor: float = DEFAULT_LOADING) -> RangeAzimuthMap:
    """Capon spectrum for every range bin; expects clutter-removed profiles."""
    if angle_grid is None:
        angle_grid = default_angle_grid()
    angle_grid = np.asarray(angle_grid, dtype=float)
    spacing = profiles.config.element_spacing if profiles.config is not None else 0.5
    X = profiles.bins
    M, L, n_bins = X.shape
    if M == 0:
        raise InsufficientSnapshotsError("no chirp snapshots")
    # all range bins at once: R[r] = (1/M) sum_m x_m x_m^H
    R = np.einsum("mlr,mkr->rlk", X, X.conj()) / M
    R = 0.5 * (R + np.conj(np.swapaxes(R, 1, 2)))
    A = steering(angle_grid, L, spacing)
    values = np.empty((n_bins, angle_grid.size))
    for r in range(n_bins):
        Rl, _, _ = _load(R[r], loading_factor)
        try:
            C = _cholesky(Rl)
        except NotPositiveDefiniteError as exc:
            raise NotPositiveDefiniteError(f"range bin {r}: {exc}") from exc
        W = la.solve_triangular(C, A, lower=True)
        values[r] = 1.0 / np.sum(np.abs(W) ** 2, axis=0)
    return RangeAzimuthMap(values, profiles.range_axis.copy(), angle_grid.copy())


def export_csv(ra_map: RangeAzimuthMap, path, db: bool = False) -> None:
    vals = ra_map.to_db() if db else ra_map.values
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["range_m", "angle_deg", "value_db" if db else "value"])
        for i, r in enumerate(ra_map.range_axis):
            for j, a in enumerate(ra_map.angle_axis):
                writer.writerow([f"{r:.6f}", f"{np.rad2deg(a):.3f}", repr(float(vals[i, j]))])


def read_csv(path) -> RangeAzimuthMap:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    ranges = np.unique(data[:, 0])
    angles = np.unique(data[:, 1])
    values = data[:, 2].reshape(ranges.size, angles.size)
    return RangeAzimuthMap(values, ranges, np.deg2rad(angles))


def export_pgm(ra_map: RangeAzimuthMap, path) -> None:
    """8-bit binary PGM, rows = range bins, columns = angles, min-max normalized."""
    v = ra_map.values
    lo, hi = float(v.min()), float(v.max())
    # spread at rounding level (e.g. an all-loading map) renders flat
    if hi - lo > 1e-9 * abs(hi):
        img = np.round(255.0 * (v - lo) / (hi - lo)).astype(np.uint8)
    else:
        img = np.zeros(v.shape, dtype=np.uint8)
    rows, cols = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{cols} {rows}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def read_pgm(path) -> np.ndarray:
    raw = open(path, "rb").read()
    parts = raw.split(maxsplit=4)
    if parts[0] != b"P5":
        raise ValueError("not a binary PGM")
    cols, rows, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    return np.frombuffer(parts[4], dtype=np.uint8 if maxval < 256 else ">u2").reshape(rows, cols)


def find_peaks_2d(values: np.ndarray, range_halfwidth: int = 3, angle_halfwidth: int = 10,
                  n_peaks: int = None, rel_threshold: float = 0.0):
    """Local maxima of a map over a (2*rh+1) x (2*ah+1) neighbourhood, strongest first."""
    from scipy.ndimage import maximum_filter

    footprint = np.ones((2 * range_halfwidth + 1, 2 * angle_halfwidth + 1), dtype=bool)
    local = maximum_filter(values, footprint=footprint, mode="nearest") == values
    local &= values >= rel_threshold * values.max()
    idx = np.argwhere(local)
    order = np.argsort(-values[local], kind="stable")
    idx = [tuple(int(i) for i in idx[k]) for k in order]
    return idx if n_peaks is None else idx[:n_peaks]
