import numpy as np
from scipy.signal import find_peaks

from occupancy_radar import Target


def moving_target(rng, r, azimuth, gain=1.0):
    """Occupant-like scatterer with fidgeting speed and breathing."""
    return Target(range=r, azimuth=azimuth, gain=gain,
                  velocity=float(rng.choice((-1.0, 1.0)) * rng.uniform(0.03, 0.05)),
                  breathing_amplitude=rng.uniform(0.003, 0.006),
                  breathing_rate=rng.uniform(0.2, 0.5),
                  breathing_phase=rng.uniform(0, 2 * np.pi))


def strongest_row_near(ra_map, r, spacing):
    k = int(round(r / spacing))
    lo = max(k - 1, 0)
    return lo + int(np.argmax(ra_map.values[lo:k + 2].max(axis=1)))


def peaks_in_window(row, angles_deg, lo_deg, hi_deg, rel=0.25):
    """Local maxima of a spectrum row inside [lo, hi] with at least ``rel`` of the row max."""
    pk, _ = find_peaks(row)
    keep = (angles_deg[pk] >= lo_deg) & (angles_deg[pk] <= hi_deg) & (row[pk] >= rel * row.max())
    return pk[keep]
