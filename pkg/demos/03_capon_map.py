# # Capon range-azimuth map
#
# Two occupants in the front row. The map is built bin by bin from the
# clutter-free profiles, then written out as CSV and a grayscale PGM.

import sys
import tempfile
from pathlib import Path

import numpy as np

from occupancy_radar import CabinGeometry, RadarConfig, Scene, Target, synthesize
from occupancy_radar.capon import capon_spectrum, export_csv, export_pgm, find_peaks_2d
from occupancy_radar.dataset import process_frame

cfg = RadarConfig()
people = (Target(0.8, np.radians(-20), velocity=0.04, breathing_amplitude=0.004, breathing_rate=0.25),
          Target(0.8, np.radians(20), velocity=-0.03, breathing_amplitude=0.005, breathing_rate=0.35))
scene = Scene(targets=people, clutter=CabinGeometry().clutter_targets(), noise_power=0.1, rng_seed=4)

ra = process_frame(synthesize(scene, cfg))
print("map shape (range bins, angles):", ra.shape)

for i, j in find_peaks_2d(ra.values, n_peaks=2):
    print("peak at %.2f m, %+.0f deg" % (ra.range_axis[i], np.degrees(ra.angle_axis[j])))

# With white input the spectrum is flat at 1/L.
print("identity covariance:", np.unique(np.round(capon_spectrum(np.eye(8)), 12)))

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())
export_csv(ra, out / "map.csv", db=True)
export_pgm(ra, out / "map.pgm")
print("wrote", out / "map.csv", "and", out / "map.pgm")
