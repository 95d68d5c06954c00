"""
Plot sweeps, saturation points, dispersion curves, and focal-plane fields on matplotlib Axes.
"""
from __future__ import absolute_import, division, print_function

import collections

import matplotlib.pyplot as plt

try:
    color_cycle = plt.rcParams['axes.prop_cycle'].by_key()['color']  # matplotlib >= 1.5
except KeyError:
    color_cycle = plt.rcParams['axes.color_cycle']  # matplotlib < 1.5
import numpy as np

idler_defaults = {'linestyle': '-',
                  'linewidth': 1,
                  'alpha': 1}

beta_defaults = {'linestyle': '--',
                 'linewidth': 0.7,
                 'alpha': 1}

saturation_defaults = {'linestyle': '-',
                       'marker': 'o',
                       'markersize': 4,
                       'alpha': 1}

boundary_defaults = {'linestyle': 'none',
                     'marker': 'o',
                     'markersize': 7,
                     'markerfacecolor': 'none',
                     'color': 'gray'}

curve_defaults = {'linestyle': '-',
                  'linewidth': 1,
                  'color': color_cycle[0],
                  'label': 'n_eff'}

mode_defaults = {'linestyle': 'none',
                 'marker': 'o',
                 'markersize': 5,
                 'color': color_cycle[1]}

map_defaults = {'cmap': 'viridis',
                'origin': 'lower',
                'interpolation': 'nearest'}

svg_defaults = {'format': 'svg',
                'metadata': {'Date': None},
                'bbox_inches': 'tight'}


def efficiency_vs_budget(rows, axes=None, plot_beta=True, label_axes=True, legend=True, idler_settings=None,
                         beta_settings=None, **subplots_kwds):
    """
    Plot the idler efficiency, and optionally beta, versus pump budget, one curve per (Q, r_ZPL).

    :param rows: iterable of sweeps.SweepRow.
    :param axes: a matplotlib Axes instance; if None, create new Figure and Axes objects using
      `fig, ax = plt.subplots(**subplots_kwds)`, plot using these, and return them.
    :param plot_beta: if True, also plot beta with the same color as the idler curve.
    :param label_axes: if True, give the axes reasonable labels.
    :param legend: if True, draw a legend.
    :param idler_settings: a dict of pyplot.plot keywords; see `idler_defaults` in this module.
    :param beta_settings: a dict of pyplot.plot keywords; see `beta_defaults` in this module.
    :return: if axes is None, return a new Figure and Axes objects; otherwise, return None.
    """
    if axes is None:
        figure, axes = plt.subplots(**subplots_kwds)
    else:
        figure = None
    curves = collections.OrderedDict()
    for row in rows:
        curves.setdefault((row.q_bar, row.zpl_fraction), []).append(row)
    for index, ((q_bar, zpl_fraction), curve) in enumerate(curves.items()):
        color = color_cycle[index % len(color_cycle)]
        budget = np.array([row.budget for row in curve])
        idler_kwds = idler_defaults.copy()
        idler_kwds.update({'color': color, 'label': 'Q = {:.0e}, r = {:g}'.format(q_bar, zpl_fraction)})
        if idler_settings is not None:
            idler_kwds.update(idler_settings)
        axes.plot(budget, [row.idler for row in curve], **idler_kwds)
        if plot_beta:
            beta_kwds = beta_defaults.copy()
            beta_kwds['color'] = color
            if beta_settings is not None:
                beta_kwds.update(beta_settings)
            axes.plot(budget, [row.beta for row in curve], **beta_kwds)
    axes.set_xscale('log')
    if label_axes:
        axes.set_xlabel('pump budget / W')
        axes.set_ylabel('efficiency')
    if legend and curves:
        axes.legend(fontsize='small')
    if figure is not None:
        return figure, axes


def saturation_vs_q(results, axes=None, label_axes=True, legend=True, saturation_settings=None,
                    boundary_settings=None, **subplots_kwds):
    """
    Plot the saturated idler efficiency versus the shared quality factor, one curve per r_ZPL. Points whose maximum
    lies at the end of the budget range are circled.

    :param results: iterable of sweeps.SaturationResult.
    :param axes: a matplotlib Axes instance; if None, create and return a new Figure and Axes.
    :param saturation_settings: a dict of pyplot.plot keywords; see `saturation_defaults` in this module.
    :param boundary_settings: a dict of pyplot.plot keywords; see `boundary_defaults` in this module.
    :return: if axes is None, return a new Figure and Axes objects; otherwise, return None.
    """
    if axes is None:
        figure, axes = plt.subplots(**subplots_kwds)
    else:
        figure = None
    curves = collections.OrderedDict()
    for result in results:
        curves.setdefault(result.zpl_fraction, []).append(result)
    for index, (zpl_fraction, curve) in enumerate(curves.items()):
        curve = sorted(curve, key=lambda result: result.q_bar)
        saturation_kwds = saturation_defaults.copy()
        saturation_kwds.update({'color': color_cycle[index % len(color_cycle)],
                                'label': 'r_ZPL = {:g}'.format(zpl_fraction)})
        if saturation_settings is not None:
            saturation_kwds.update(saturation_settings)
        axes.plot([result.q_bar for result in curve], [result.eta_star for result in curve], **saturation_kwds)
        boundary = [result for result in curve if result.at_boundary]
        if boundary:
            boundary_kwds = boundary_defaults.copy()
            if boundary_settings is not None:
                boundary_kwds.update(boundary_settings)
            axes.plot([result.q_bar for result in boundary], [result.eta_star for result in boundary],
                      **boundary_kwds)
    axes.set_xscale('log')
    if label_axes:
        axes.set_xlabel('Q')
        axes.set_ylabel('saturated idler efficiency')
    if legend and curves:
        axes.legend(fontsize='small')
    if figure is not None:
        return figure, axes


def effective_index(curve, quartet=None, axes=None, num_points=500, label_axes=True, curve_settings=None,
                    mode_settings=None, **subplots_kwds):
    """
    Plot an effective-index curve versus wavelength in micrometres, with the in-plane modes of a quartet marked.

    :param curve: dispersion.EffectiveIndexCurve.
    :param quartet: dispersion.FwmQuartet, or None.
    :param num_points: the number of wavelengths at which to evaluate the curve.
    :return: if axes is None, return a new Figure and Axes objects; otherwise, return None.
    """
    if axes is None:
        figure, axes = plt.subplots(**subplots_kwds)
    else:
        figure = None
    low, high = curve.range
    wavelength = np.linspace(low, high, num_points)
    curve_kwds = curve_defaults.copy()
    if curve_settings is not None:
        curve_kwds.update(curve_settings)
    axes.plot(1e6 * wavelength, curve(wavelength), **curve_kwds)
    if quartet is not None:
        mode_kwds = mode_defaults.copy()
        if mode_settings is not None:
            mode_kwds.update(mode_settings)
        for mode in quartet.modes[:3]:
            axes.plot(1e6 * mode.wavelength, curve(mode.wavelength), **mode_kwds)
            axes.annotate('{} m={}'.format(mode.label, mode.m), (1e6 * mode.wavelength, curve(mode.wavelength)),
                          textcoords='offset points', xytext=(4, 4), fontsize='small')
    if label_axes:
        axes.set_xlabel('wavelength / um')
        axes.set_ylabel('effective index')
    if figure is not None:
        return figure, axes


def intensity_map(plane, axes=None, component=None, colorbar=True, label_axes=True, map_settings=None,
                  **subplots_kwds):
    """
    Plot the intensity of a focal-plane field.

    :param plane: beamprop.TransversePlaneField.
    :param component: 0, 1, or 2 to plot |E_x|^2, |E_y|^2, or |E_z|^2; None plots the total.
    :param map_settings: a dict of pyplot.imshow keywords; see `map_defaults` in this module.
    :return: if axes is None, return a new Figure and Axes objects; otherwise, return None.
    """
    if axes is None:
        figure, axes = plt.subplots(**subplots_kwds)
    else:
        figure = None
    if component is None:
        intensity = plane.intensity()
    else:
        intensity = np.abs(plane.field[component]) ** 2
    map_kwds = map_defaults.copy()
    map_kwds['extent'] = 1e6 * np.array([plane.x[0], plane.x[-1], plane.y[0], plane.y[-1]])
    if map_settings is not None:
        map_kwds.update(map_settings)
    image = axes.imshow(intensity, **map_kwds)
    if colorbar:
        axes.figure.colorbar(image, ax=axes)
    if label_axes:
        axes.set_xlabel('x / um')
        axes.set_ylabel('y / um')
        axes.set_title('z = {:.3g} um'.format(1e6 * plane.z))
    if figure is not None:
        return figure, axes


def save_svg(figure, path, **savefig_kwds):
    """Save a figure as standalone SVG without a timestamp, then close it."""
    kwds = svg_defaults.copy()
    kwds.update(savefig_kwds)
    with plt.rc_context({'svg.hashsalt': 'ffwm'}):
        figure.savefig(path, **kwds)
    plt.close(figure)
    return path
