import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from occupancy_radar import (CabinGeometry, OccupancyClass, RadarConfig, Scene, Target, derive,
                             scene_for_class, synthesize)
from occupancy_radar.config import beat_frequency
from occupancy_radar.errors import SceneError
from occupancy_radar.scene import read_cube, write_cube

from oracles import dft_matrix


def test_beat_frequency_of_one_metre(config):
    cube = synthesize(Scene(targets=(Target(1.0, 0.0),)), config)
    chirp = cube.samples[0, 0]
    # fine zero-padded DFT by explicit kernel, searched for its maximum
    n_fine = 4096
    W = dft_matrix(n_fine)[:, :chirp.size]
    mag = np.abs(W @ chirp)
    f_est = np.argmax(mag) * config.adc_rate / n_fine
    step = config.adc_rate / n_fine
    assert abs(f_est - beat_frequency(config, 1.0)) <= step
    # 2 * 1.0 * 9.8e13 / 3e8
    assert f_est == pytest.approx(653.33e3, rel=2e-3)


def test_empty_scene_no_noise_is_zero(config):
    cube = synthesize(Scene(), config)
    assert cube.samples.shape == (64, 8, 88)
    assert not np.any(cube.samples)


def test_broadside_channels_identical(config):
    cube = synthesize(Scene(targets=(Target(1.3, 0.0, velocity=0.02),)), config)
    # channels 0-3 share a chirp; Tx2 channels see the next chirp slot
    for l in range(4):
        np.testing.assert_array_equal(cube.samples[:, l], cube.samples[:, 0])
    static = synthesize(Scene(targets=(Target(1.3, 0.0),)), config)
    for l in range(8):
        np.testing.assert_allclose(static.samples[:, l], static.samples[:, 0], atol=1e-12)


def test_steering_phase_progression(config):
    theta = math.radians(30)
    cube = synthesize(Scene(targets=(Target(1.0, theta),)), config)
    ratio = cube.samples[0, 1:4, 0] / cube.samples[0, 0:3, 0]
    np.testing.assert_allclose(ratio, np.exp(-1j * np.pi / 2), atol=1e-12)


def test_out_of_scene(config):
    with pytest.raises(SceneError, match="max_range"):
        synthesize(Scene(targets=(Target(3.5, 0.0),)), config)


def test_target_validation():
    with pytest.raises(SceneError):
        Target(-1.0, 0.0)
    with pytest.raises(SceneError):
        Target(1.0, math.pi / 2)
    with pytest.raises(SceneError):
        Scene(clutter=(Target(1.0, 0.0, velocity=0.1),))


def test_energy_single_target(config):
    t = Target(1.7, 0.3, gain=2.5, velocity=0.04, breathing_amplitude=0.004, breathing_rate=0.3)
    cube = synthesize(Scene(targets=(t,)), config)
    assert cube.energy == pytest.approx(2.5 ** 2 * cube.samples.size, rel=1e-9)


def test_determinism(config):
    sc = scene_for_class(OccupancyClass.Row123, CabinGeometry(), 99)
    a = synthesize(sc, config).samples
    b = synthesize(sc, config).samples
    assert a.tobytes() == b.tobytes()


scatterer = st.builds(
    Target,
    range=st.floats(0.2, 3.2),
    azimuth=st.floats(-1.4, 1.4),
    gain=st.floats(0.1, 3.0),
    velocity=st.floats(-0.1, 0.1),
    breathing_amplitude=st.floats(0, 0.01),
    breathing_rate=st.floats(0, 1),
)


@settings(max_examples=25, deadline=None)
@given(st.lists(scatterer, min_size=1, max_size=3), st.lists(scatterer, min_size=1, max_size=3))
def test_linearity(a, b):
    cfg = RadarConfig(n_chirps_per_tx=8)
    xa = synthesize(Scene(targets=tuple(a)), cfg).samples
    xb = synthesize(Scene(targets=tuple(b)), cfg).samples
    xab = synthesize(Scene(targets=tuple(a + b)), cfg).samples
    np.testing.assert_allclose(xa + xb, xab, atol=1e-9)


def test_noise_power_and_seed(config):
    sc = Scene(noise_power=0.5, rng_seed=4)
    x = synthesize(sc, config).samples
    assert np.mean(np.abs(x) ** 2) == pytest.approx(0.5, rel=0.02)
    y = synthesize(Scene(noise_power=0.5, rng_seed=5), config).samples
    assert not np.allclose(x, y)


def test_phase_noise_common_within_chirp(config):
    sc = Scene(targets=(Target(1.0, 0.0),), phase_noise_std=0.1, rng_seed=1)
    x = synthesize(sc, config).samples
    ref = synthesize(Scene(targets=(Target(1.0, 0.0),)), config).samples
    ph = np.angle(x / ref)
    # same physical chirp -> same phase error across its 4 receivers
    np.testing.assert_allclose(ph[:, 0:4], ph[:, [0]].repeat(4, axis=1), atol=1e-12)
    assert np.std(ph[:, 0]) > 0


def test_channel_mismatch(config):
    gains = np.exp(1j * np.arange(8) * 0.1) * 2
    x = synthesize(Scene(targets=(Target(1.0, 0.0),)), config, channel_gains=gains).samples
    ref = synthesize(Scene(targets=(Target(1.0, 0.0),)), config).samples
    np.testing.assert_allclose(x, ref * gains[None, :, None])


def test_scene_for_class_contents():
    g = CabinGeometry()
    empty = scene_for_class(OccupancyClass.NoOne, g, 1)
    assert empty.targets == () and len(empty.clutter) > 0
    r13 = scene_for_class("Row13", g, 1)
    assert len(r13.targets) == 2
    assert abs(r13.targets[0].range - 0.8) <= g.range_jitter
    assert abs(r13.targets[1].range - 2.4) <= g.range_jitter
    r123 = scene_for_class(OccupancyClass.Row123, g, 2)
    ranges = [t.range for t in r123.targets]
    assert len(ranges) == 3 and len(set(np.round(ranges, 2))) == 3
    for t in r123.targets:
        assert not t.is_static
    with pytest.raises(ValueError):
        scene_for_class("Row4", g, 0)


def test_scene_json_roundtrip(tmp_path):
    sc = scene_for_class(OccupancyClass.Row12, CabinGeometry(), 5)
    sc.save(tmp_path / "s.json")
    assert Scene.load(tmp_path / "s.json") == sc


def test_cube_export_roundtrip(tmp_path, config):
    sc = scene_for_class(OccupancyClass.Row2, CabinGeometry(), 5)
    cube = synthesize(sc, config)
    write_cube(cube, tmp_path / "cube.bin")
    raw = np.fromfile(tmp_path / "cube.bin", dtype="<f4")
    assert raw.size == 2 * cube.samples.size
    assert raw[0] == np.float32(cube.samples[0, 0, 0].real)
    assert raw[1] == np.float32(cube.samples[0, 0, 0].imag)
    back = read_cube(tmp_path / "cube.bin")
    np.testing.assert_allclose(back.samples, cube.samples, rtol=0, atol=1e-5 * np.abs(cube.samples).max())


def test_geometry_roundtrip(tmp_path):
    g = CabinGeometry(noise_power=0.05)
    (tmp_path / "g.json").write_text(__import__("json").dumps(g.to_dict()))
    g2 = CabinGeometry.load(tmp_path / "g.json")
    assert g2 == g and g2.hash() == g.hash()
