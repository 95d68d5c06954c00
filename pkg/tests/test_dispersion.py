import math

import numpy as np
import pytest

from ffwm import dispersion
from ffwm.base import InterpolationDomainError, NoResonanceError, TableFormatError, WindowError


def test_diamond_index_at_signal(diamond):
    assert dispersion.bulk_index(diamond, 0.615e-6) == pytest.approx(2.41414, rel=1e-5)


def test_diamond_index_long_wavelength(diamond):
    assert dispersion.bulk_index(diamond, 6e-6) == pytest.approx(2.3808, abs=1e-3)


def test_diamond_index_decreases_across_window(diamond):
    wavelength = np.linspace(0.3e-6, 6e-6, 500)
    n = diamond(wavelength)
    assert np.all(n > 1)
    assert np.all(np.diff(n) <= 0)


@pytest.mark.parametrize('wavelength', [0.2e-6, 7e-6])
def test_diamond_index_outside_window(diamond, wavelength):
    with pytest.raises(WindowError):
        dispersion.bulk_index(diamond, wavelength)


def test_material_rejects_pole_inside_window():
    with pytest.raises(ValueError):
        dispersion.MaterialIndex(amplitudes=(1.0,), resonances_um=(0.4,))


def test_curve_outside_range(ring_curve):
    with pytest.raises(InterpolationDomainError):
        ring_curve(0.4e-6)


def test_curve_is_below_bulk(ring_curve, diamond):
    ring_curve.check_below_bulk(diamond)


def test_curve_arrays_are_read_only(ring_curve):
    with pytest.raises(ValueError):
        ring_curve.wavelength[0] = 1e-6


@pytest.mark.parametrize('m, wavelength', [(143, 0.615e-6), (115, 0.750e-6), (28, 2.095e-6)])
def test_reference_resonances(ring_curve, m, wavelength):
    resonance = dispersion.resonant_wavelength(ring_curve, 6e-6, m)
    assert resonance == pytest.approx(wavelength, rel=1e-6)
    assert dispersion.mode_number(ring_curve, 6e-6, resonance) == pytest.approx(m, abs=1e-9)


def test_no_resonance_outside_curve(ring_curve):
    with pytest.raises(NoResonanceError):
        dispersion.resonant_wavelength(ring_curve, 6e-6, 1000)


def test_reference_quartet(reference_quartet):
    assert reference_quartet.sig.m == reference_quartet.A.m + reference_quartet.B.m
    assert reference_quartet.idl.m == 0
    assert reference_quartet.idl.wavelength == pytest.approx(1.2987e-6, rel=1e-4)
    assert reference_quartet.idl.wavelength == pytest.approx(1.301e-6, rel=2.5e-3)
    assert abs(reference_quartet.energy_mismatch) <= 1e-9 * reference_quartet.sig.omega


def test_quartet_rejects_mode_number_mismatch():
    with pytest.raises(ValueError):
        dispersion.make_quartet((143, 0.615e-6), (28, 2.095e-6), (116, 0.750e-6))


def test_solve_fpm_finds_reference_quartet(ring_curve):
    quartets = dispersion.solve_fpm(ring_curve, 6e-6, 143, (0.5e-6, 2.2e-6))
    matches = [q for q in quartets if (q.A.m, q.B.m) == (28, 115)]
    assert len(matches) == 1
    assert matches[0].A.wavelength == pytest.approx(2.095e-6, rel=1e-6)
    assert matches[0].B.wavelength == pytest.approx(0.750e-6, rel=1e-6)
    assert matches[0].idl.wavelength == pytest.approx(1.2987e-6, rel=1e-4)
    idler = [q.idl.wavelength for q in quartets]
    assert idler == sorted(idler)


def test_solve_fpm_matches_brute_force():
    radius = 10e-6
    curve = dispersion.EffectiveIndexCurve.constant(2.0, (0.2e-6, 5e-6))
    low, high = 0.4e-6, 2.0e-6
    quartets = dispersion.solve_fpm(curve, radius, 150, (low, high))

    def resonance(m):
        return 2 * math.pi * radius * 2.0 / m

    expected = set((m_a, 150 - m_a) for m_a in range(1, 150)
                   if low <= resonance(m_a) <= high and low <= resonance(150 - m_a) <= high)
    assert len(expected) == 25
    assert set((q.A.m, q.B.m) for q in quartets) == expected
    for q in quartets:
        assert q.idl.wavelength == pytest.approx(2 * math.pi * radius * 2.0 / (2 * q.A.m), rel=1e-9)
        assert q.sig.m - q.A.m - q.B.m == 0


def test_solve_fpm_empty_window(ring_curve):
    assert dispersion.solve_fpm(ring_curve, 6e-6, 143, (1e-6, 1e-6)) == []


def test_solve_fpm_window_beyond_curve(ring_curve):
    with pytest.raises(InterpolationDomainError):
        dispersion.solve_fpm(ring_curve, 6e-6, 143, (0.4e-6, 2.0e-6))


def test_competing_processes(reference_quartet, ring_curve, diamond):
    processes = dict((p.label, p) for p in
                     dispersion.competing_process_scan(reference_quartet, ring_curve, 6e-6, material=diamond))
    designed = processes['designed']
    assert designed.mismatch == 0
    assert designed.coherence_length == np.inf
    assert processes['designed, reversed circulation'].coherence_length == np.inf
    assert processes['symmetric pumps m_sig + m_A - m_B'].coherence_length == pytest.approx(math.pi * 6e-6 / 56)

    spurious = processes["2 B -> sig' + x"]
    assert spurious.wavelengths[2] == pytest.approx(0.619e-6, rel=1e-3)
    assert spurious.wavelengths[3] == pytest.approx(0.951e-6, rel=2e-3)
    assert 5e-6 < spurious.coherence_length < 50e-6
    assert not spurious.extrapolated

    mixed = processes["A + B -> sig' + x"]
    assert mixed.extrapolated
    assert mixed.frequency_weight < 1


def test_out_of_plane_phase_is_flagged():
    phase, flagged = dispersion.out_of_plane_phase(dispersion.RingGeometry.reference_device(), 2.39, 1.301e-6)
    assert phase == pytest.approx(6.348, abs=1e-3)
    assert flagged


def test_out_of_plane_phase_thin_ring():
    geometry = dispersion.RingGeometry(radius=6e-6, width=0.75e-6, thickness=0.2e-6, reflector_gap=0.87e-6)
    phase, flagged = dispersion.out_of_plane_phase(geometry, 2.39, 1.301e-6)
    assert phase < math.pi
    assert not flagged


def test_free_spectral_range_without_dispersion():
    curve = dispersion.EffectiveIndexCurve.constant(2.0, (0.5e-6, 2e-6))
    assert dispersion.group_index(curve, 1e-6) == pytest.approx(2.0)
    assert dispersion.free_spectral_range(curve, 10e-6, 1e-6) == pytest.approx(1e-12 / (2 * math.pi * 10e-6 * 2.0))


def test_group_index_exceeds_effective_index(ring_curve):
    assert dispersion.group_index(ring_curve, 1.0e-6) > ring_curve(1.0e-6)


def test_load_curve_rejects_bad_header(tmp_path):
    path = tmp_path / 'curve.csv'
    path.write_text('# comment\nwavelength,n\n0.5,2.0\n', encoding='utf-8')
    with pytest.raises(TableFormatError) as info:
        dispersion.load_curve(str(path))
    assert info.value.line == 2


def test_load_curve_rejects_descending_rows(tmp_path):
    path = tmp_path / 'curve.csv'
    path.write_text('lambda_um,n_eff\n1.0,2.0\n0.5,2.1\n', encoding='utf-8')
    with pytest.raises(TableFormatError):
        dispersion.load_curve(str(path))


def test_ring_geometry_validation():
    with pytest.raises(ValueError):
        dispersion.RingGeometry(radius=-6e-6, width=0.75e-6, thickness=0.55e-6, reflector_gap=0.87e-6)
