import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt
import numpy as np

from ffwm import beamprop, see, sweeps


def make_rows():
    rows = []
    for q_bar in (1e4, 1e5):
        for budget in (0.1, 1.0, 10.0):
            rows.append(sweeps.SweepRow(q_bar, 0.48, budget, 1e12, 0.1 * budget / (1 + budget), 0.9, 0.1, 0.0, ''))
    return rows


def test_efficiency_plot_has_a_curve_per_setting():
    figure, axes = see.efficiency_vs_budget(make_rows())
    assert len(axes.lines) == 4
    assert axes.get_xscale() == 'log'
    plt.close(figure)


def test_plot_on_given_axes_returns_nothing():
    figure, axes = plt.subplots()
    assert see.efficiency_vs_budget(make_rows(), axes=axes, plot_beta=False) is None
    assert len(axes.lines) == 2
    plt.close(figure)


def test_saturation_plot_circles_boundary_points():
    results = [sweeps.SaturationResult(q, 1.0, 1e4, 0.95, 0.99, 1e4, at_boundary=True) for q in (1e4, 1e5)]
    results.append(sweeps.SaturationResult(1e5, 0.48, 3.5, 0.91, 0.93, 1e4))
    figure, axes = see.saturation_vs_q(results)
    assert len(axes.lines) == 3
    plt.close(figure)


def test_intensity_map_and_svg(tmp_path):
    x = beamprop.centered_grid(11, 0.2e-6)
    field = np.zeros((3, 11, 11), dtype=complex)
    field[0, 5, 5] = 1
    plane = beamprop.TransversePlaneField(x=x, y=x, z=1e-6, field=field, wavelength=1.301e-6)
    figure, axes = see.intensity_map(plane)
    assert axes.get_title() == 'z = 1 um'
    path = see.save_svg(figure, str(tmp_path / 'map.svg'))
    with open(path) as f:
        text = f.read()
    assert text.startswith('<?xml')
    assert '<dc:date>' not in text
