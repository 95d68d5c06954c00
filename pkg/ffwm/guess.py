"""
Functions for generating initial parameters used by model `guess` methods and by the beam-overlap optimizer.
"""
from __future__ import absolute_import, division, print_function

import numpy as np


def second_moment_waist(radius, intensity):
    """
    Return the waist w of the Gaussian intensity exp(-2 r^2 / w^2) with the same second moment as the given samples,
    using <r^2> = w^2 / 2 for a two-dimensional Gaussian.

    :param radius: distance of each sample from the beam axis, for samples on a uniform transverse grid.
    :param intensity: intensity of each sample.
    :return: float
    """
    radius = np.ravel(radius)
    intensity = np.ravel(intensity)
    total = np.sum(intensity)
    if total <= 0:
        raise ValueError("Intensity must have a positive sum")
    return np.sqrt(2 * np.sum(intensity * radius ** 2) / total)


def polyfit_phase_curvature(radius, field, weights=None):
    """
    Fit phase = offset + curvature * r^2 along a radial cut of a complex field.

    Near the axis the wrapped phase is already smooth, while farther out only the unwrapped phase is; the fit with the
    smaller residual is kept.

    :param radius: increasing distances from the axis along the cut.
    :param field: complex field samples along the cut.
    :param weights: optional polyfit weights; the default weights each sample by its field magnitude.
    :return: (offset, curvature), with curvature in rad/m^2.
    """
    if weights is None:
        weights = np.abs(field)
    squared = radius ** 2
    poly_wrapped, res_wrapped, _, _, _ = np.polyfit(squared, np.angle(field), 1, w=weights, full=True)
    poly_unwrapped, res_unwrapped, _, _, _ = np.polyfit(squared, np.unwrap(np.angle(field)), 1, w=weights, full=True)
    if res_wrapped.size and res_unwrapped.size and res_wrapped[0] < res_unwrapped[0]:
        curvature, offset = poly_wrapped
    else:
        curvature, offset = poly_unwrapped
    return offset, curvature


def gaussian_waist_and_offset(waist, curvature, wavenumber):
    """
    Return the focal waist and waist offset of the Gaussian beam that has the given local spot size and phase
    curvature phase = curvature * r^2 on the observation plane.

    The complex beam parameter q = d - i z_R on the plane satisfies 1 / q = 2 curvature / k + 2 i / (k w^2), where d
    is the distance from the waist to the plane, so the waist lies at offset -d from the plane.

    :param waist: local 1/e field radius in meters.
    :param curvature: phase curvature in rad/m^2.
    :param wavenumber: k in rad/m.
    :return: (w0, offset) in meters.
    """
    inverse_q = 2 * curvature / wavenumber + 2j / (wavenumber * waist ** 2)
    q = 1 / inverse_q
    rayleigh_range = -q.imag
    return np.sqrt(2 * rayleigh_range / wavenumber), -q.real
