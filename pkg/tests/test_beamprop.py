import math

import numpy as np
import pytest

from ffwm import beamprop, tables
from ffwm.base import ConfigError, IllConditionedIntegralError, TableFormatError

wavelength = 1.301e-6


def radial_plane(profile=lambda r: np.exp(-r ** 2 / 4e-12)):
    x = beamprop.centered_grid(41, 0.2e-6)
    r = np.hypot(x[np.newaxis, :], x[:, np.newaxis])
    phi = np.arctan2(x[:, np.newaxis], x[np.newaxis, :])
    field = np.array([np.cos(phi) * profile(r), np.sin(phi) * profile(r), np.zeros_like(r)], dtype=complex)
    return beamprop.TransversePlaneField(x=x, y=x, z=0.0, field=field, wavelength=wavelength)


def random_farfield(generator, na=0.8, samples=41):
    s = beamprop.centered_grid(samples, 2 * na / (samples - 1))
    inside = s[np.newaxis, :] ** 2 + s[:, np.newaxis] ** 2 <= na ** 2
    amplitude = (generator.normal(size=(3, samples, samples))
                 + 1j * generator.normal(size=(3, samples, samples))) * inside
    return beamprop.FarField(sx=s, sy=s, amplitude=amplitude, wavelength=wavelength)


def test_single_plane_wave_has_flat_intensity():
    s = beamprop.centered_grid(5, 0.1)
    amplitude = np.zeros((3, 5, 5), dtype=complex)
    amplitude[0, 1, 3] = 1  # s_y = -0.1, s_x = 0.1
    field = beamprop.FarField(sx=s, sy=s, amplitude=amplitude, wavelength=wavelength)
    x = beamprop.centered_grid(9, 0.3e-6)
    plane = beamprop.debye_wolf(field, x, x, 0.0)
    ex = plane.field[0]
    assert np.allclose(np.abs(ex), np.abs(ex[0, 0]), rtol=1e-12, atol=0)
    k = 2 * np.pi / wavelength
    phase = np.exp(1j * k * (0.1 * (x[np.newaxis, :] - x[0]) - 0.1 * (x[:, np.newaxis] - x[0])))
    assert np.allclose(ex / ex[0, 0], phase, rtol=1e-9, atol=1e-9)
    assert np.all(plane.field[1:] == 0)


def test_radial_focus_has_dark_center():
    field = beamprop.radial_farfield(wavelength, 0.82)
    x = beamprop.default_plane_grid(2e-6, 21)
    plane = beamprop.debye_wolf(field, x, x, 0.0)
    peak = np.max(np.abs(plane.field))
    assert abs(plane.field[0, 10, 10]) <= 1e-10 * peak
    assert abs(plane.field[1, 10, 10]) <= 1e-10 * peak
    assert abs(plane.field[2, 10, 10]) > 0


def test_focusing_is_linear():
    generator = np.random.default_rng(7)
    first = random_farfield(generator)
    second = random_farfield(generator)
    both = beamprop.FarField(sx=first.sx, sy=first.sy, amplitude=first.amplitude + second.amplitude,
                             wavelength=wavelength)
    x = beamprop.centered_grid(17, 0.25e-6)
    combined = beamprop.debye_wolf(both, x, x, 0.4e-6).field
    separate = beamprop.debye_wolf(first, x, x, 0.4e-6).field + beamprop.debye_wolf(second, x, x, 0.4e-6).field
    assert np.max(np.abs(combined - separate)) <= 1e-12 * np.max(np.abs(combined))


@pytest.mark.parametrize('field, z', [(beamprop.gaussian_farfield(wavelength, 3e-6, 0.82), 0.0),
                                      (beamprop.radial_farfield(wavelength, 0.82), 2e-6)])
def test_plane_power_matches_far_field(field, z):
    x = beamprop.default_plane_grid()
    plane = beamprop.debye_wolf(field, x, x, z)
    assert plane.power() == pytest.approx(field.focal_power(), rel=1e-2)


def test_grazing_rays_are_rejected():
    s = 0.9999999
    grid = np.array([-s, 0, s])
    amplitude = np.zeros((3, 3, 3), dtype=complex)
    amplitude[0, 1, :] = 1
    amplitude[0, :, 1] = 1
    field = beamprop.FarField(sx=grid, sy=grid, amplitude=amplitude, wavelength=wavelength)
    with pytest.raises(IllConditionedIntegralError):
        beamprop.debye_wolf(field, np.array([-1e-6, 0, 1e-6]), np.array([-1e-6, 0, 1e-6]), 0.0)
    clipped, _ = beamprop.clip_na(field, 0.9)
    beamprop.debye_wolf(clipped, np.array([-1e-6, 0, 1e-6]), np.array([-1e-6, 0, 1e-6]), 0.0)


def test_far_field_outside_unit_disc_is_rejected():
    grid = np.array([-0.9, 0, 0.9])
    amplitude = np.ones((3, 3, 3), dtype=complex)
    with pytest.raises(ValueError):
        beamprop.FarField(sx=grid, sy=grid, amplitude=amplitude, wavelength=wavelength)


def test_waveplate_turns_radial_into_linear():
    plane = radial_plane()
    converted = beamprop.s_waveplate(plane)
    peak = np.max(np.abs(plane.field))
    expected = np.exp(-plane.radius ** 2 / 4e-12)
    assert np.allclose(converted.field[0], expected, rtol=0, atol=1e-12 * peak)
    assert np.max(np.abs(converted.field[1])) <= 1e-12 * peak


def test_waveplate_is_an_involution_and_keeps_power():
    generator = np.random.default_rng(3)
    plane = radial_plane()
    field = generator.normal(size=plane.field.shape) + 1j * generator.normal(size=plane.field.shape)
    plane = beamprop.TransversePlaneField(x=plane.x, y=plane.y, z=0.0, field=field, wavelength=wavelength)
    once = beamprop.s_waveplate(plane)
    twice = beamprop.s_waveplate(once)
    assert np.allclose(twice.field, plane.field, rtol=0, atol=1e-12)
    assert np.allclose(once.intensity(), plane.intensity(), rtol=1e-12)


def test_gaussian_overlaps_itself():
    spec = beamprop.GaussianBeamSpec(waist=1.5e-6, offset=0.7e-6, wavelength=wavelength)
    x = beamprop.centered_grid(81, 0.1e-6)
    field = np.array([beamprop.gaussian_field(spec, x, x), np.zeros((81, 81)), np.zeros((81, 81))])
    plane = beamprop.TransversePlaneField(x=x, y=x, z=0.0, field=field, wavelength=wavelength)
    assert beamprop.gaussian_overlap(plane, spec) == pytest.approx(1, abs=1e-9)


def test_odd_field_does_not_couple():
    spec = beamprop.GaussianBeamSpec(waist=1.5e-6, offset=0.0, wavelength=wavelength)
    x = beamprop.centered_grid(81, 0.1e-6)
    odd = x[np.newaxis, :] * beamprop.gaussian_field(spec, x, x)
    field = np.array([odd, np.zeros_like(odd), np.zeros_like(odd)])
    plane = beamprop.TransversePlaneField(x=x, y=x, z=0.0, field=field, wavelength=wavelength)
    assert beamprop.gaussian_overlap(plane, spec) == pytest.approx(0, abs=1e-12)


def test_overlap_is_a_fraction():
    generator = np.random.default_rng(11)
    x = beamprop.centered_grid(31, 0.2e-6)
    for _ in range(10):
        field = generator.normal(size=(3, 31, 31)) + 1j * generator.normal(size=(3, 31, 31))
        plane = beamprop.TransversePlaneField(x=x, y=x, z=0.0, field=field, wavelength=wavelength)
        spec = beamprop.GaussianBeamSpec(waist=generator.uniform(0.5e-6, 3e-6),
                                         offset=generator.uniform(-2e-6, 2e-6), wavelength=wavelength)
        assert 0 <= beamprop.gaussian_overlap(plane, spec) <= 1 + 1e-12


def test_overlap_of_dark_field_is_undefined():
    x = beamprop.centered_grid(11, 0.2e-6)
    plane = beamprop.TransversePlaneField(x=x, y=x, z=0.0, field=np.zeros((3, 11, 11)), wavelength=wavelength)
    with pytest.raises(ValueError):
        beamprop.gaussian_overlap(plane, beamprop.GaussianBeamSpec(1e-6, 0.0, wavelength))


def test_full_aperture_keeps_everything():
    field = beamprop.gaussian_farfield(wavelength, 1e-6, 0.9, samples=101)
    clipped, fraction = beamprop.clip_na(field, 1.0)
    assert fraction == 1
    assert np.array_equal(clipped.amplitude, field.amplitude)


def test_captured_fraction_of_uniform_cone():
    field = beamprop.uniform_farfield(wavelength, 0.95, samples=401)
    _, fraction = beamprop.clip_na(field, 0.82)
    expected = (1 - math.sqrt(1 - 0.82 ** 2)) / (1 - math.sqrt(1 - 0.95 ** 2))
    assert fraction == pytest.approx(expected, rel=1e-2)


@pytest.mark.parametrize('na', [0, 1.2])
def test_numerical_aperture_range(na):
    with pytest.raises(ValueError):
        beamprop.clip_na(beamprop.uniform_farfield(wavelength, 0.5, samples=21), na)


def test_gaussian_far_field_recovers_its_waist():
    field = beamprop.gaussian_farfield(wavelength, 3e-6, 0.82)
    optimum = beamprop.optimize_spatial(field, 0.82, [0.0], 0.9, apply_waveplate=False)
    assert optimum.overlap >= 0.99
    assert optimum.waist == pytest.approx(3e-6, rel=2e-2)
    assert optimum.spatial_efficiency == pytest.approx(0.9 * optimum.overlap)
    assert optimum.captured_fraction == pytest.approx(1)


def test_best_plane_wins_and_ties_go_to_smaller_z():
    field = beamprop.gaussian_farfield(wavelength, 2e-6, 0.82, samples=101)
    x = beamprop.default_plane_grid(10e-6, 101)
    optimum = beamprop.optimize_spatial(field, 0.82, [1e-6, -1e-6, 0.0], 1.0, x=x, apply_waveplate=False, threads=2)
    assert [plane.z for plane in optimum.planes] == [1e-6, -1e-6, 0.0]
    assert optimum.overlap == max(plane.overlap for plane in optimum.planes)
    best = [plane.z for plane in optimum.planes if plane.overlap == optimum.overlap]
    assert optimum.z == min(best)
    assert optimum.field.z == optimum.z


def test_overlap_converges_with_grid_refinement():
    coarse = beamprop.optimize_spatial(beamprop.radial_farfield(wavelength, 0.82, samples=201), 0.82, [0.0], 0.9,
                                       x=beamprop.default_plane_grid(number=257))
    fine = beamprop.optimize_spatial(beamprop.radial_farfield(wavelength, 0.82, samples=401), 0.82, [0.0], 0.9,
                                     x=beamprop.default_plane_grid(number=513))
    assert 0 < fine.overlap < 1
    assert coarse.overlap == pytest.approx(fine.overlap, rel=5e-3)


def test_zero_transmission_gives_zero_efficiency():
    field = beamprop.gaussian_farfield(wavelength, 2e-6, 0.82, samples=101)
    optimum = beamprop.optimize_spatial(field, 0.82, [0.0], 0.0, x=beamprop.default_plane_grid(10e-6, 101),
                                        apply_waveplate=False)
    assert optimum.spatial_efficiency == 0
    assert beamprop.slm_limited_efficiency(optimum.captured_fraction, 0.0) == 0


def test_slm_limited_efficiency():
    assert beamprop.slm_limited_efficiency(0.62, 0.9) == pytest.approx(0.558)


def test_read_far_field_with_sidecar(tmp_path):
    path = tmp_path / 'farfield.csv'
    rows = []
    for sy in (0.1, -0.1, 0.0):
        for sx in (0.0, 0.1, -0.1):
            rows.append((sx, sy, 1.0 if (sx, sy) == (0.0, 0.0) else 0.5, 0.0, 0.0, 0.25, 0.0, 0.0))
    tables.write_rows(str(path), beamprop.FARFIELD_HEADER, rows)
    (tmp_path / 'farfield.csv.json').write_text('{"wavelength_um": 1.301}', encoding='utf-8')
    field = beamprop.read_farfield(str(path))
    assert field.wavelength == pytest.approx(1.301e-6)
    assert np.allclose(field.sx, [-0.1, 0.0, 0.1])
    assert field.amplitude[0, 1, 1] == 1.0
    assert field.amplitude[1, 0, 2] == 0.25j


def test_read_far_field_needs_a_wavelength(tmp_path):
    path = tmp_path / 'farfield.csv'
    tables.write_rows(str(path), beamprop.FARFIELD_HEADER, [(0.0, 0.0, 1, 0, 0, 0, 0, 0),
                                                             (0.1, 0.0, 1, 0, 0, 0, 0, 0)])
    with pytest.raises(ConfigError):
        beamprop.read_farfield(str(path))
    with pytest.raises(TableFormatError):
        beamprop.read_farfield(str(path), wavelength=wavelength)
