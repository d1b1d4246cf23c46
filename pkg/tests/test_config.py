import json
import math

import pytest
from hypothesis import given, strategies as st

from occupancy_radar import RadarConfig, derive
from occupancy_radar.config import SPEED_OF_LIGHT
from occupancy_radar.errors import ConfigError


def test_table_defaults():
    cfg = RadarConfig()
    assert cfg.chirp_slope == 98e12
    assert cfg.chirp_period == 580e-6
    assert cfg.sweep_bandwidth == 3920e6
    assert cfg.frame_rate == 6.25
    assert cfg.adc_rate == 2.2e6
    assert cfg.n_virtual == 8


def test_derived_values(config):
    d = derive(config)
    # 3920 MHz / 98 MHz/us = 40 us of ramp, times 2.2 MHz
    assert d.samples_per_chirp == 88
    assert d.fft_size == 128
    assert d.range_bin_count == 128
    assert d.angular_resolution == pytest.approx(0.25)
    assert math.degrees(d.angular_resolution) == pytest.approx(14.3, abs=0.05)
    assert d.range_resolution == pytest.approx(SPEED_OF_LIGHT / 7.84e9, rel=1e-15)
    # hand values use c = 3e8
    assert d.range_resolution == pytest.approx(0.03826, rel=1e-3)
    assert d.max_range == pytest.approx(3.37, rel=2e-3)
    assert d.n_virtual_channels == 8


@pytest.mark.parametrize("field,value,needle", [
    ("chirp_slope", 0.0, "chirp_slope"),
    ("adc_rate", -1.0, "adc_rate"),
    ("sweep_bandwidth", 60e9, "ramp"),
    ("n_chirps_per_tx", 200, "frame"),
    ("n_tx", 0, "n_tx"),
])
def test_invalid_config_names_invariant(field, value, needle):
    with pytest.raises(ConfigError, match=needle):
        RadarConfig(**{field: value})


def test_json_roundtrip_and_unknown_keys(tmp_path):
    cfg = RadarConfig(n_chirps_per_tx=32)
    p = tmp_path / "c.json"
    cfg.save(p)
    assert RadarConfig.load(p) == cfg
    assert RadarConfig.load(p).hash() == cfg.hash()
    data = json.loads(p.read_text())
    data["chirp_slop"] = 1.0
    with pytest.raises(ConfigError, match="chirp_slop"):
        RadarConfig.from_dict(data)


def test_derive_deterministic(config):
    assert derive(config) == derive(config)


def test_doubling_bandwidth_halves_resolution():
    a = RadarConfig(sweep_bandwidth=1000e6)
    b = RadarConfig(sweep_bandwidth=2000e6)
    assert derive(b).range_resolution * 2 == derive(a).range_resolution


@given(st.integers(1, 3), st.integers(1, 8))
def test_angular_resolution_times_L_is_two(n_tx, n_rx):
    d = derive(RadarConfig(n_tx=n_tx, n_rx=n_rx, n_chirps_per_tx=32))
    assert d.angular_resolution * d.n_virtual_channels == 2.0
