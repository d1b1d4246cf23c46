import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from occupancy_radar import RadarConfig, Scene, Target, derive, range_fft, remove_clutter, synthesize
from occupancy_radar.errors import FFTSizeError, InsufficientSnapshotsError
from occupancy_radar.frontend import RangeProfileCube, dump_range_profile_csv, range_axis
from occupancy_radar.scene import RawDataCube

from oracles import ac_fraction, dft_matrix


def test_single_target_bin_38(config):
    cube = synthesize(Scene(targets=(Target(1.0, 0.0),)), config)
    prof = range_fft(cube, "rectangular", 128)
    mag = np.abs(prof.bins[0, 0])
    assert np.argmax(mag) == 38
    oracle = np.abs(dft_matrix(128)[:, :88] @ cube.samples[0, 0])
    assert np.argmax(oracle) == 38
    assert prof.range_axis[1] == pytest.approx(0.0263, abs=5e-5)
    assert prof.range_axis[0] == 0.0
    assert np.all(np.diff(prof.range_axis) > 0)


def test_zero_cube_gives_zero_profile(config):
    cube = synthesize(Scene(), config)
    assert not np.any(range_fft(cube).bins)


def test_two_close_targets_resolved(config):
    # different speeds rotate the relative phase across chirps, so the chirp-summed
    # power adds the two responses incoherently
    cube = synthesize(Scene(targets=(Target(1.0, 0.0), Target(1.04, 0.0, velocity=0.05))), config)
    n_fft = 1024
    mag = np.sum(np.abs(range_fft(cube, "rectangular", n_fft).bins[:, 0]) ** 2, axis=0)
    # brute-force local maxima within 20 cm of the pair
    ax = range_axis(config, n_fft)
    near = np.flatnonzero((ax > 0.9) & (ax < 1.14))
    peaks = [k for k in near if mag[k] > mag[k - 1] and mag[k] > mag[k + 1]
             and mag[k] > 0.5 * mag.max()]
    assert len(peaks) == 2
    assert abs(ax[peaks[0]] - 1.0) < 0.01 and abs(ax[peaks[1]] - 1.04) < 0.01


def test_fft_size_error(config):
    cube = synthesize(Scene(), config)
    with pytest.raises(FFTSizeError):
        range_fft(cube, fft_size=64)
    with pytest.raises(ValueError):
        range_fft(cube, window="kaiser")


def test_default_fft_size_and_window(config):
    cube = synthesize(Scene(targets=(Target(1.0, 0.0),)), config)
    prof = range_fft(cube)
    assert prof.bins.shape == (64, 8, 128)
    w = np.hanning(88)
    expected = dft_matrix(128)[:, :88] @ (w * cube.samples[3, 5])
    np.testing.assert_allclose(prof.bins[3, 5], expected, atol=1e-12)


@pytest.mark.parametrize("window", ["rectangular", "hann", "hamming"])
def test_parseval_windowed(config, rng, window):
    x = rng.standard_normal((64, 8, 88)) + 1j * rng.standard_normal((64, 8, 88))
    prof = range_fft(RawDataCube(x, config), window)
    from occupancy_radar.frontend import make_window
    e_time = np.sum(np.abs(x * make_window(window, 88)) ** 2)
    assert np.sum(np.abs(prof.bins) ** 2) == pytest.approx(e_time, rel=1e-9)


def test_clutter_only_scene_vanishes(config):
    clutter = tuple(Target(r, a, gain=3.0) for r, a in [(0.4, 0.0), (1.1, -0.3), (2.7, 0.5)])
    prof = range_fft(synthesize(Scene(clutter=clutter), config))
    out = remove_clutter(prof)
    assert np.sum(np.abs(out.bins) ** 2) < 1e-9 * np.sum(np.abs(prof.bins) ** 2)


def test_breathing_target_survives_clutter_removal(config):
    t = Target(1.6, 0.2, velocity=0.0, breathing_amplitude=0.005, breathing_rate=0.4,
               breathing_phase=0.3)
    clutter = (Target(1.6, -0.4, gain=3.0), Target(0.5, 0.0, gain=3.0))
    alone = range_fft(synthesize(Scene(targets=(t,)), config))
    mixed = range_fft(synthesize(Scene(targets=(t,), clutter=clutter), config))
    k = int(np.argmax(np.sum(np.abs(alone.bins) ** 2, axis=(0, 1))))
    frac = ac_fraction(t, config)
    expected_ac = np.sum(np.sum(np.abs(alone.bins[:, :, k]) ** 2, axis=0) * frac)
    retained = np.sum(np.abs(remove_clutter(mixed).bins[:, :, k]) ** 2)
    assert frac.min() > 0.05
    assert retained / expected_ac >= 0.5
    assert retained / expected_ac == pytest.approx(1.0, rel=0.05)


def test_mean_zero_after_removal(config, rng):
    x = rng.standard_normal((64, 8, 88)) + 1j * rng.standard_normal((64, 8, 88))
    out = remove_clutter(range_fft(RawDataCube(x, config)))
    assert np.max(np.abs(out.bins.mean(axis=0))) < 1e-14


def test_single_chirp_rejected():
    prof = RangeProfileCube(np.zeros((1, 8, 16), complex), np.arange(16.0))
    with pytest.raises(InsufficientSnapshotsError):
        remove_clutter(prof)


complex_cube = arrays(np.complex128, (6, 3, 5),
                      elements=st.complex_numbers(max_magnitude=1e3, allow_nan=False,
                                                  allow_infinity=False))


@settings(max_examples=40, deadline=None)
@given(complex_cube)
def test_removal_idempotent(bins):
    p = RangeProfileCube(bins, np.arange(5.0))
    once = remove_clutter(p).bins
    twice = remove_clutter(remove_clutter(p)).bins
    np.testing.assert_allclose(twice, once, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(complex_cube, arrays(np.complex128, (3, 5),
                            elements=st.complex_numbers(max_magnitude=10, allow_nan=False,
                                                        allow_infinity=False)))
def test_removal_commutes_with_scaling(bins, scale):
    p = RangeProfileCube(bins, np.arange(5.0))
    a = remove_clutter(RangeProfileCube(bins * scale, np.arange(5.0))).bins
    b = remove_clutter(p).bins * scale
    np.testing.assert_allclose(a, b, atol=1e-6)


def test_profile_csv(tmp_path, config):
    prof = range_fft(synthesize(Scene(targets=(Target(1.0, 0.0),)), config))
    dump_range_profile_csv(prof, tmp_path / "p.csv")
    data = np.loadtxt(tmp_path / "p.csv", delimiter=",", skiprows=1)
    assert data.shape == (128, 2)
