import pytest

from ffwm import search


def test_golden_section_finds_parabola_peak():
    x, value = search.golden_section_maximum(lambda x: -(x - 1.3) ** 2, 0, 3, tolerance=1e-8)
    assert x == pytest.approx(1.3, abs=1e-6)
    assert value == pytest.approx(0, abs=1e-10)


def test_golden_section_reuses_interior_values():
    calls = []

    def parabola(x):
        calls.append(x)
        return -(x - 0.2) ** 2

    search.golden_section_maximum(parabola, -1, 1, tolerance=1e-6, max_iterations=500)
    # Two initial evaluations, then one per bracket reduction by the inverse golden ratio.
    assert len(calls) < 40


@pytest.mark.parametrize('values, peaks', [([0, 1, 0, 2, 1], [1, 3]),
                                           ([3, 2, 1], [0]),
                                           ([1, 2, 3], [2]),
                                           ([5], [0]),
                                           ([0, float('nan'), 1, 0], [0, 2])])
def test_local_maxima(values, peaks):
    assert search.local_maxima(values) == peaks


def test_plateau_counts_once():
    assert search.local_maxima([0, 1, 1, 0]) == [2]


def test_coordinate_ascent_finds_quadratic_peak():
    point, value = search.coordinate_ascent(lambda p: -((p[0] - 1) ** 2 + 2 * (p[1] + 0.5) ** 2), (0.0, 0.0),
                                            (0.1, 0.1), tolerance=1e-6)
    assert point[0] == pytest.approx(1, abs=1e-3)
    assert point[1] == pytest.approx(-0.5, abs=1e-3)
    assert value == pytest.approx(0, abs=1e-6)


def test_coordinate_ascent_walks_downhill_direction():
    point, _ = search.coordinate_ascent(lambda p: -(p[0] + 7.5) ** 2, (0.0,), (0.5,), tolerance=1e-6)
    assert point[0] == pytest.approx(-7.5, abs=1e-3)
