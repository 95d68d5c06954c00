"""
Vectorial focusing of the idler far-field by a high-NA objective, polarization conversion by an S-waveplate, and the
overlap of the result with a fundamental Gaussian mode.

A far-field is a complex vector ray strength a(s_x, s_y) sampled on a uniform grid of direction cosines. The focal
field on a transverse plane at axial position z is the Debye-Wolf integral
  E(x, y, z) = -(i k / 2 pi) int int a / s_z exp[i k (s_x x + s_y y + s_z z)] ds_x ds_y,
evaluated by the midpoint rule. The grid is separable, so the double sum becomes two matrix products.
"""
from __future__ import absolute_import, division, print_function

import collections
import io
import json
import logging
import os
from concurrent import futures
from dataclasses import dataclass

import numpy as np

from . import base, guess, search, tables
from .base import IllConditionedIntegralError

logger = logging.getLogger(__name__)

# Rays with a smaller axial direction cosine make the integral ill-conditioned.
min_axial_cosine = 1e-3

FARFIELD_HEADER = ('sx', 'sy', 're_ax', 'im_ax', 're_ay', 'im_ay', 're_az', 'im_az')

PLANE_HEADER = ('x_um', 'y_um', 're_ex', 'im_ex', 're_ey', 'im_ey', 're_ez', 'im_ez')


def centered_grid(number, spacing):
    """Return number samples with the given spacing, exactly symmetric about zero."""
    return spacing * (np.arange(number) - (number - 1) / 2)


def _uniform_spacing(name, values):
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size < 2:
        raise ValueError("{} must be a 1D grid with at least two samples".format(name))
    steps = np.diff(values)
    if np.any(steps <= 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        raise ValueError("{} must be uniformly spaced and increasing".format(name))
    return float(steps[0])


@dataclass(frozen=True, eq=False)
class FarField:
    """
    :param sx: direction cosines along x, a uniform 1D grid.
    :param sy: direction cosines along y, a uniform 1D grid.
    :param amplitude: complex ray strengths with shape (3, sy.size, sx.size); zero outside the unit disc.
    :param wavelength: vacuum wavelength in meters.
    """
    sx: np.ndarray
    sy: np.ndarray
    amplitude: np.ndarray
    wavelength: float

    def __post_init__(self):
        sx = np.asarray(self.sx, dtype=float)
        sy = np.asarray(self.sy, dtype=float)
        amplitude = np.asarray(self.amplitude, dtype=complex)
        _uniform_spacing('FarField.sx', sx)
        _uniform_spacing('FarField.sy', sy)
        if amplitude.shape != (3, sy.size, sx.size):
            raise ValueError("FarField.amplitude must have shape (3, {}, {})".format(sy.size, sx.size))
        if not np.all(np.isfinite(amplitude)):
            raise ValueError("FarField.amplitude must be finite")
        radius_squared = sx[np.newaxis, :] ** 2 + sy[:, np.newaxis] ** 2
        if np.any(np.abs(amplitude[:, radius_squared >= 1]) > 0):
            raise ValueError("FarField has nonzero rays outside the unit disc of direction cosines")
        if not self.wavelength > 0:
            raise ValueError("FarField.wavelength must be positive")
        object.__setattr__(self, 'sx', sx)
        object.__setattr__(self, 'sy', sy)
        object.__setattr__(self, 'amplitude', amplitude)

    @property
    def wavenumber(self):
        return 2 * np.pi / self.wavelength

    @property
    def cell(self):
        """The area of one sample in direction-cosine space."""
        return (self.sx[1] - self.sx[0]) * (self.sy[1] - self.sy[0])

    @property
    def radius(self):
        return np.hypot(self.sx[np.newaxis, :], self.sy[:, np.newaxis])

    @property
    def axial(self):
        """s_z on the grid, zero outside the unit disc."""
        return np.sqrt(np.clip(1 - self.radius ** 2, 0, None))

    @property
    def retained(self):
        """Boolean mask of samples with nonzero ray strength."""
        return np.any(self.amplitude != 0, axis=0)

    def _weighted_sum(self, power_of_axial):
        mask = self.retained
        squared = np.sum(np.abs(self.amplitude) ** 2, axis=0)[mask]
        return float(np.sum(squared / self.axial[mask] ** power_of_axial) * self.cell)

    def power(self):
        """Radiated power, the quadrature of |a|^2 / s_z over direction cosines, which is |a|^2 over solid angle."""
        return self._weighted_sum(1)

    def focal_power(self):
        """The quadrature of |a|^2 / s_z^2, which equals the power of the focal field on any transverse plane."""
        return self._weighted_sum(2)


@dataclass(frozen=True, eq=False)
class TransversePlaneField:
    """
    :param x: uniform 1D grid in meters.
    :param y: uniform 1D grid in meters.
    :param z: axial position of the plane in meters.
    :param field: complex (E_x, E_y, E_z) with shape (3, y.size, x.size).
    :param wavelength: vacuum wavelength in meters.
    """
    x: np.ndarray
    y: np.ndarray
    z: float
    field: np.ndarray
    wavelength: float

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        field = np.asarray(self.field, dtype=complex)
        _uniform_spacing('TransversePlaneField.x', x)
        _uniform_spacing('TransversePlaneField.y', y)
        if field.shape != (3, y.size, x.size):
            raise ValueError("TransversePlaneField.field must have shape (3, {}, {})".format(y.size, x.size))
        if not np.all(np.isfinite(field)):
            raise ValueError("TransversePlaneField.field must be finite")
        object.__setattr__(self, 'x', x)
        object.__setattr__(self, 'y', y)
        object.__setattr__(self, 'field', field)

    @property
    def wavenumber(self):
        return 2 * np.pi / self.wavelength

    @property
    def cell(self):
        return (self.x[1] - self.x[0]) * (self.y[1] - self.y[0])

    @property
    def radius(self):
        return np.hypot(self.x[np.newaxis, :], self.y[:, np.newaxis])

    @property
    def azimuth(self):
        return np.arctan2(self.y[:, np.newaxis], self.x[np.newaxis, :])

    def intensity(self):
        return np.sum(np.abs(self.field) ** 2, axis=0)

    def power(self):
        return float(np.sum(self.intensity()) * self.cell)


@dataclass(frozen=True)
class GaussianBeamSpec:
    """
    :param waist: focal waist w0 in meters.
    :param offset: position of the waist relative to the observation plane in meters.
    :param wavelength: vacuum wavelength in meters.
    """
    waist: float
    offset: float
    wavelength: float

    def __post_init__(self):
        if not self.waist > 0:
            raise ValueError("GaussianBeamSpec.waist must be positive")

    @property
    def rayleigh_range(self):
        return np.pi * self.waist ** 2 / self.wavelength


def gaussian_field(spec, x, y):
    """
    Return the fundamental Gaussian (q0 / q) exp(i k r^2 / 2q) on a plane, where q = d - i z_R and d = -offset is
    the distance from the waist to the plane. The factor q0 / q carries the Gouy phase.
    """
    k = 2 * np.pi / spec.wavelength
    rayleigh_range = spec.rayleigh_range
    q = -spec.offset - 1j * rayleigh_range
    radius_squared = x[np.newaxis, :] ** 2 + y[:, np.newaxis] ** 2
    return (-1j * rayleigh_range / q) * np.exp(1j * k * radius_squared / (2 * q))


def clip_na(field, na):
    """
    Remove the rays outside the numerical aperture.

    :param field: FarField.
    :param na: numerical aperture in (0, 1].
    :return: (clipped FarField, fraction of the power that is kept)
    """
    if not 0 < na <= 1:
        raise ValueError("The numerical aperture must lie in (0, 1]")
    total = field.power()
    if total <= 0:
        raise ValueError("The far-field carries no power")
    amplitude = np.where(field.radius > na, 0, field.amplitude)
    clipped = FarField(sx=field.sx, sy=field.sy, amplitude=amplitude, wavelength=field.wavelength)
    return clipped, clipped.power() / total


def debye_wolf(field, x, y, z):
    """
    Evaluate the focal field of a far-field on a transverse plane.

    :param field: FarField, clipped so that every ray has s_z bounded away from zero.
    :param x: 1D plane grid in meters.
    :param y: 1D plane grid in meters.
    :param z: axial position of the plane in meters, relative to the focus.
    :return: TransversePlaneField
    :raises IllConditionedIntegralError: if a nonzero ray has s_z below min_axial_cosine.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    mask = field.retained
    axial = field.axial
    if np.any(axial[mask] < min_axial_cosine):
        raise IllConditionedIntegralError("The far-field has rays with s_z < {}; clip it to an NA below 1 first"
                                          .format(min_axial_cosine))
    k = field.wavenumber
    safe_axial = np.where(mask, axial, 1)
    weight = np.where(mask, np.exp(1j * k * safe_axial * z) / safe_axial, 0) * field.cell
    along_x = np.exp(1j * k * np.outer(field.sx, x))
    along_y = np.exp(1j * k * np.outer(y, field.sy))
    result = np.array([along_y.dot(component * weight).dot(along_x) for component in field.amplitude])
    return TransversePlaneField(x=x, y=y, z=z, field=-1j * k / (2 * np.pi) * result, wavelength=field.wavelength)


def s_waveplate(plane):
    """
    Apply the S-waveplate Jones matrix [[cos phi, sin phi], [sin phi, -cos phi]] at each azimuth phi, which turns
    radial polarization into uniform x polarization. E_z passes through unchanged.
    """
    phi = plane.azimuth
    cos, sin = np.cos(phi), np.sin(phi)
    ex, ey, ez = plane.field
    converted = np.array([cos * ex + sin * ey, sin * ex - cos * ey, ez])
    return TransversePlaneField(x=plane.x, y=plane.y, z=plane.z, field=converted, wavelength=plane.wavelength)


def gaussian_overlap(plane, spec):
    """
    Return the power coupling |int E_x* E_g dA|^2 / (int |E|^2 dA int |E_g|^2 dA) of the field into an x-polarized
    Gaussian mode. Power in E_y and E_z counts as loss.

    :raises ValueError: if the field has no power.
    """
    reference = gaussian_field(spec, plane.x, plane.y)
    field_power = np.sum(plane.intensity())
    if field_power <= 0:
        raise ValueError("The field has no power")
    projection = np.sum(np.conj(plane.field[0]) * reference)
    return float(abs(projection) ** 2 / (field_power * np.sum(np.abs(reference) ** 2)))


class GaussianBeamModel(base.BeamModel):
    """
    This class models a radial intensity profile as a Gaussian beam, amplitude * exp(-2 r^2 / waist^2).
    """

    def __init__(self, *args, **kwds):

        def gaussian_intensity(radius, amplitude, waist):
            return amplitude * np.exp(-2 * radius ** 2 / waist ** 2)

        super(GaussianBeamModel, self).__init__(func=gaussian_intensity, *args, **kwds)

    def guess(self, data, radius=None, **kwds):
        params = self.make_params()
        waist = guess.second_moment_waist(radius=radius, intensity=data)
        params['amplitude'].set(value=np.max(data), min=0)
        params['waist'].set(value=waist, min=waist / 100, max=100 * waist)
        return params


def fit_beam(plane):
    """
    Fit the intensity of the x component of a plane field with a GaussianBeamModel.

    :return: lmfit.model.ModelResult
    """
    model = GaussianBeamModel()
    intensity = np.abs(plane.field[0]).ravel() ** 2
    radius = plane.radius.ravel()
    params = model.guess(intensity, radius=radius)
    return model.fit(intensity, params, radius=radius)


def seed_gaussian(plane):
    """
    Return a starting GaussianBeamSpec for a plane: the waist on the plane from a Gaussian fit of the x intensity, and
    the phase curvature from a weighted fit of the phase along the positive x axis.
    """
    k = plane.wavenumber
    try:
        local_waist = fit_beam(plane).params['waist'].value
    except (ValueError, TypeError) as error:
        logger.debug("Gaussian fit failed, using the second moment: %s", error)
        local_waist = guess.second_moment_waist(plane.radius, np.abs(plane.field[0]) ** 2)
    half_width = min(plane.x[-1], plane.y[-1])
    local_waist = float(np.clip(local_waist, plane.wavelength / 4, half_width))
    row = plane.field[0][np.argmin(np.abs(plane.y))]
    cut = (plane.x >= 0) & (plane.x <= local_waist)
    curvature = 0.0
    if np.count_nonzero(cut) >= 3 and np.any(np.abs(row[cut]) > 0):
        _, curvature = guess.polyfit_phase_curvature(plane.x[cut], row[cut])
    waist, offset = guess.gaussian_waist_and_offset(local_waist, curvature, k)
    waist = float(np.clip(waist, plane.wavelength / 4, half_width))
    return GaussianBeamSpec(waist=waist, offset=float(offset), wavelength=plane.wavelength)


def fit_overlap(plane, tolerance=1e-4):
    """
    Maximize the Gaussian overlap over waist and waist offset by coordinate ascent on (log w0, offset), starting from
    seed_gaussian.

    :return: (GaussianBeamSpec, overlap)
    """
    seed = seed_gaussian(plane)
    wavelength = plane.wavelength

    def objective(point):
        spec = GaussianBeamSpec(waist=float(np.exp(point[0])), offset=float(point[1]), wavelength=wavelength)
        return gaussian_overlap(plane, spec)

    offset_step = max(0.2 * seed.rayleigh_range, wavelength)
    point, overlap = search.coordinate_ascent(objective, (np.log(seed.waist), seed.offset), steps=(0.05, offset_step),
                                              tolerance=tolerance)
    return GaussianBeamSpec(waist=float(np.exp(point[0])), offset=float(point[1]), wavelength=wavelength), overlap


PlaneResult = collections.namedtuple('PlaneResult', ['z', 'waist', 'offset', 'overlap'])

SpatialOptimum = collections.namedtuple('SpatialOptimum', ['z', 'waist', 'offset', 'overlap', 'spatial_efficiency',
                                                           'captured_fraction', 'planes', 'field'])
SpatialOptimum.__doc__ = """
The best focal plane and fiber mode for a far-field.

:param z: axial position of the best plane in meters.
:param waist: Gaussian waist in meters.
:param offset: waist offset from the plane in meters.
:param overlap: the maximal Gaussian overlap.
:param spatial_efficiency: transmission times overlap.
:param captured_fraction: fraction of the far-field power inside the numerical aperture.
:param planes: PlaneResult for every plane, in the order given.
:param field: the TransversePlaneField at the best plane.
"""


def default_plane_grid(half_width=20e-6, number=257):
    return centered_grid(number, 2 * half_width / (number - 1))


def optimize_spatial(field, na, z_values, transmission, x=None, y=None, apply_waveplate=True, threads=1):
    """
    Find the focal plane and Gaussian mode that best collect the far-field.

    For every plane the far-field is clipped to the numerical aperture, focused with the Debye-Wolf integral, passed
    through the S-waveplate, and the Gaussian overlap is maximized over waist and waist offset. The plane with the
    largest overlap wins, and ties go to the smallest z.

    :param field: FarField.
    :param na: numerical aperture of the objective.
    :param z_values: axial plane positions in meters.
    :param transmission: optical transmission T after the objective.
    :param x: plane grid in meters; defaults to 257 samples over +-20 um.
    :param y: plane grid in meters; defaults to x.
    :param apply_waveplate: if False, skip the S-waveplate for inputs that are already linearly polarized.
    :param threads: number of worker threads for the planes.
    :return: SpatialOptimum
    """
    if not 0 <= transmission <= 1:
        raise ValueError("The transmission must lie in [0, 1]")
    z_values = [float(z) for z in z_values]
    if not z_values:
        raise ValueError("At least one plane position is required")
    if x is None:
        x = default_plane_grid()
    if y is None:
        y = x
    clipped, captured = clip_na(field, na)

    def work(z):
        plane = debye_wolf(clipped, x, y, z)
        if apply_waveplate:
            plane = s_waveplate(plane)
        spec, overlap = fit_overlap(plane)
        logger.debug("z = %.4g um: w0 = %.4g um, offset = %.4g um, overlap = %.5f", 1e6 * z, 1e6 * spec.waist,
                     1e6 * spec.offset, overlap)
        return PlaneResult(z, spec.waist, spec.offset, overlap), plane

    if threads <= 1:
        results = [work(z) for z in z_values]
    else:
        with futures.ThreadPoolExecutor(max_workers=threads) as executor:
            results = list(executor.map(work, z_values))
    best, plane = min(results, key=lambda result: (-result[0].overlap, result[0].z))
    logger.info("Best plane z = %.4g um with overlap %.4f", 1e6 * best.z, best.overlap)
    return SpatialOptimum(z=best.z, waist=best.waist, offset=best.offset, overlap=best.overlap,
                          spatial_efficiency=transmission * best.overlap, captured_fraction=captured,
                          planes=[result[0] for result in results], field=plane)


def slm_limited_efficiency(captured_fraction, transmission):
    """
    Return the spatial efficiency T times the captured fraction, which is reached when a wavefront shaper makes the
    overlap perfect.
    """
    return transmission * captured_fraction


def _disc_grid(extent, samples):
    s = centered_grid(samples, 2 * extent / (samples - 1))
    return s, s[np.newaxis, :], s[:, np.newaxis]


def gaussian_farfield(wavelength, waist, na, samples=201):
    """
    Return the x-polarized far-field whose focal field at z = 0 is the Gaussian exp(-r^2 / waist^2): the ray strength
    is s_z exp(-k^2 waist^2 s^2 / 4), the Fourier pair of the Gaussian after the 1 / s_z weight of the integral.
    """
    s, sx, sy = _disc_grid(na, samples)
    k = 2 * np.pi / wavelength
    radius_squared = sx ** 2 + sy ** 2
    inside = radius_squared <= na ** 2
    axial = np.sqrt(np.clip(1 - radius_squared, 0, None))
    ax = np.where(inside, axial * np.exp(-k ** 2 * waist ** 2 * radius_squared / 4), 0)
    amplitude = np.array([ax, np.zeros_like(ax), np.zeros_like(ax)])
    return FarField(sx=s, sy=s, amplitude=amplitude, wavelength=wavelength)


def radial_farfield(wavelength, na, width=0.5, samples=201):
    """
    Return a radially polarized doughnut far-field with ray strength s exp(-s^2 / width^2) along the meridional unit
    vector (s_z s_x / s, s_z s_y / s, -s), which stands in for the idler of an m = 0 ring mode.
    """
    s, sx, sy = _disc_grid(na, samples)
    radius_squared = sx ** 2 + sy ** 2
    inside = radius_squared <= na ** 2
    axial = np.sqrt(np.clip(1 - radius_squared, 0, None))
    envelope = np.where(inside, np.exp(-radius_squared / width ** 2), 0)
    sx_grid = np.broadcast_to(sx, radius_squared.shape)
    sy_grid = np.broadcast_to(sy, radius_squared.shape)
    amplitude = envelope * np.array([axial * sx_grid, axial * sy_grid, -radius_squared])
    return FarField(sx=s, sy=s, amplitude=amplitude, wavelength=wavelength)


def uniform_farfield(wavelength, cone, samples=201, extent=None):
    """Return an x-polarized far-field with uniform radiant intensity over the cone s <= cone."""
    if extent is None:
        extent = cone
    s, sx, sy = _disc_grid(extent, samples)
    ax = np.where(sx ** 2 + sy ** 2 <= cone ** 2, 1.0, 0.0)
    amplitude = np.array([ax, np.zeros_like(ax), np.zeros_like(ax)])
    return FarField(sx=s, sy=s, amplitude=amplitude, wavelength=wavelength)


def read_farfield(path, wavelength=None):
    """
    Read a far-field CSV with header sx,sy,re_ax,im_ax,re_ay,im_ay,re_az,im_az. Samples may be listed in any order
    but must lie on a uniform grid; missing samples are zero. The wavelength comes from the argument or else from the
    sidecar file `<path>.json` with key `wavelength_um`.
    """
    if wavelength is None:
        sidecar = path + '.json'
        if not os.path.exists(sidecar):
            raise base.ConfigError("no wavelength given and no sidecar file {}".format(sidecar), filename=path)
        with io.open(sidecar, 'r', encoding='utf-8') as f:
            try:
                wavelength = 1e-6 * float(json.load(f)['wavelength_um'])
            except (ValueError, KeyError) as error:
                raise base.ConfigError("sidecar needs a numeric wavelength_um: {}".format(error), filename=sidecar)
    columns = tables.read_columns(path, FARFIELD_HEADER)
    sx = np.unique(columns['sx'])
    sy = np.unique(columns['sy'])
    try:
        _uniform_spacing('sx', sx)
        _uniform_spacing('sy', sy)
    except ValueError as error:
        raise base.TableFormatError(str(error), filename=path)
    amplitude = np.zeros((3, sy.size, sx.size), dtype=complex)
    column = np.searchsorted(sx, columns['sx'])
    row = np.searchsorted(sy, columns['sy'])
    for index, name in enumerate('xyz'):
        amplitude[index, row, column] = columns['re_a' + name] + 1j * columns['im_a' + name]
    try:
        return FarField(sx=sx, sy=sy, amplitude=amplitude, wavelength=wavelength)
    except ValueError as error:
        raise base.TableFormatError(str(error), filename=path)


def write_plane(path, plane):
    """Write a plane field as CSV rows x_um,y_um,re_ex,im_ex,re_ey,im_ey,re_ez,im_ez."""
    ex, ey, ez = plane.field
    rows = []
    for j, y in enumerate(plane.y):
        for i, x in enumerate(plane.x):
            rows.append((1e6 * x, 1e6 * y, ex[j, i].real, ex[j, i].imag, ey[j, i].real, ey[j, i].imag,
                         ez[j, i].real, ez[j, i].imag))
    return tables.write_rows(path, PLANE_HEADER, rows)
