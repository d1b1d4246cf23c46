# # Radar configuration and derived quantities
#
# The default configuration is the 77 GHz TDM-MIMO setup used everywhere else.
# Everything downstream (sample counts, FFT size, range axis, angular cell)
# is derived from it.

import numpy as np

from occupancy_radar import RadarConfig, derive

cfg = RadarConfig()
print(cfg.to_json())

# Derived values. Note the range resolution uses the exact speed of light.
d = derive(cfg)
print(f"samples per chirp : {d.samples_per_chirp}")
print(f"FFT size          : {d.fft_size}")
print(f"range resolution  : {d.range_resolution:.5f} m")
print(f"bin spacing       : {d.range_bin_spacing:.5f} m")
print(f"max range         : {d.max_range:.3f} m")
print(f"angular cell      : {d.angular_resolution:.3f} rad = {np.degrees(d.angular_resolution):.1f} deg")
print(f"virtual channels  : {d.n_virtual_channels}")

# Bad configurations are rejected with a message naming the broken invariant.
try:
    RadarConfig(chirp_period=10e-6)
except ValueError as exc:
    print("rejected:", exc)

# The config hash identifies datasets and models built from it.
print("hash:", cfg.hash()[:16])
