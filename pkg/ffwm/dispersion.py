"""
Material and modal dispersion, whispering-gallery-mode discretization, and the frequency phase-matching solver.

Sign conventions follow the interaction picture of the conversion process: photons that are destroyed carry c = +1
and photons that are created carry c = -1. The signal and pump A are destroyed, pump B and the idler are created. The
propagation direction p = +1 or -1 gives the sense of circulation around the ring. With the signal and pump B
circulating in the positive sense and pump A counter-circulating, the in-plane momentum sum reduces to
m_sig - m_A - m_B, and the idler, which has no azimuthal variation, leaves the plane of the ring.
"""
from __future__ import absolute_import, division, print_function

import collections
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import interpolate, optimize

from . import constants, tables
from .base import InterpolationDomainError, NoResonanceError, TableFormatError, WindowError

logger = logging.getLogger(__name__)

LABELS = ('sig', 'A', 'B', 'idl')

# Interaction signs c for each role.
INTERACTION_SIGN = {'sig': 1, 'A': 1, 'B': -1, 'idl': -1}

# Circulation directions p for each role.
DIRECTION = {'sig': 1, 'A': -1, 'B': 1, 'idl': 1}

# Relative tolerance on energy conservation for a quartet.
frequency_tolerance = 1e-9

# Relative slack allowed when testing whether a wavelength lies on the boundary of a sampled range.
_edge_slack = 1e-12


@dataclass(frozen=True)
class RingGeometry:
    """
    The ring resonator dimensions, all in meters.

    :param radius: ring radius.
    :param width: ring width.
    :param thickness: ring thickness, which sets the out-of-plane optical path of the idler.
    :param reflector_gap: gap between the ring and the reflector below it.
    """
    radius: float
    width: float
    thickness: float
    reflector_gap: float

    def __post_init__(self):
        for name in ('radius', 'width', 'thickness', 'reflector_gap'):
            if not getattr(self, name) > 0:
                raise ValueError("RingGeometry.{} must be positive, not {!r}".format(name, getattr(self, name)))
        if not self.radius > self.width / 2:
            raise ValueError("RingGeometry.radius must exceed half the width")

    @classmethod
    def reference_device(cls):
        """The reference diamond ring: r = 6 um, w = 0.75 um, t = 0.55 um, d = 0.87 um."""
        return cls(radius=6e-6, width=0.75e-6, thickness=0.55e-6, reflector_gap=0.87e-6)


@dataclass(frozen=True)
class MaterialIndex:
    """
    A Sellmeier model n^2 = 1 + sum_i B_i lambda^2 / (lambda^2 - lambda_i^2) of the bulk refractive index.

    :param amplitudes: the dimensionless pole strengths B_i.
    :param resonances_um: the pole wavelengths lambda_i in micrometers.
    :param window: (minimum, maximum) valid wavelength in meters.
    """
    amplitudes: tuple
    resonances_um: tuple
    window: tuple = (0.3e-6, 6e-6)

    def __post_init__(self):
        object.__setattr__(self, 'amplitudes', tuple(float(b) for b in self.amplitudes))
        object.__setattr__(self, 'resonances_um', tuple(float(r) for r in self.resonances_um))
        object.__setattr__(self, 'window', (float(self.window[0]), float(self.window[1])))
        if len(self.amplitudes) != len(self.resonances_um) or not self.amplitudes:
            raise ValueError("MaterialIndex needs the same nonzero number of amplitudes and resonances")
        if not 0 < self.window[0] < self.window[1]:
            raise ValueError("MaterialIndex.window must be an increasing pair of positive wavelengths")
        if any(b <= 0 for b in self.amplitudes):
            raise ValueError("MaterialIndex.amplitudes must be positive")
        # Poles below the window keep n real, above one, and non-increasing inside it.
        if any(1e-6 * r >= self.window[0] for r in self.resonances_um):
            raise ValueError("MaterialIndex.resonances_um must lie below the valid window")

    @classmethod
    def diamond(cls):
        """Return the two-pole diamond model shipped with the package, valid from 0.3 to 6 um."""
        return load_material(tables.package_data('diamond_sellmeier.csv'))

    def __call__(self, wavelength):
        return bulk_index(self, wavelength)


def bulk_index(material, wavelength):
    """
    Return the bulk refractive index of the material at the given vacuum wavelength.

    :param material: a MaterialIndex.
    :param wavelength: float or array[float]; vacuum wavelength in meters.
    :return: float or array[float]
    :raises WindowError: if any wavelength lies outside the material window.
    """
    wavelength = np.asarray(wavelength, dtype=float)
    low, high = material.window
    if np.any(wavelength < low * (1 - _edge_slack)) or np.any(wavelength > high * (1 + _edge_slack)):
        raise WindowError("wavelength outside the valid window {:.4g} um to {:.4g} um of the material model".format(
            1e6 * low, 1e6 * high))
    square_um = (1e6 * wavelength) ** 2
    n_squared = 1 + sum(b * square_um / (square_um - r ** 2)
                        for b, r in zip(material.amplitudes, material.resonances_um))
    n = np.sqrt(n_squared)
    if n.ndim == 0:
        return float(n)
    return n


def load_material(path, window=(0.3e-6, 6e-6)):
    """Read a material file with header `B,lambda_um`, one Sellmeier pole per row."""
    columns = tables.read_columns(path, ('B', 'lambda_um'))
    try:
        return MaterialIndex(amplitudes=tuple(columns['B']), resonances_um=tuple(columns['lambda_um']),
                             window=window)
    except ValueError as error:
        raise TableFormatError(str(error), filename=path)


@dataclass(frozen=True, eq=False)
class EffectiveIndexCurve:
    """
    Sampled effective index of one mode family versus vacuum wavelength, with a monotone interpolant.

    :param wavelength: strictly increasing sample wavelengths in meters.
    :param effective_index: effective index at each sample.
    :param order: 'pchip' for monotone piecewise-cubic interpolation or 'linear'.
    """
    wavelength: np.ndarray
    effective_index: np.ndarray
    order: str = 'pchip'
    _interpolant: object = field(init=False, repr=False, default=None)

    def __post_init__(self):
        wavelength = np.array(self.wavelength, dtype=float)
        effective_index = np.array(self.effective_index, dtype=float)
        if wavelength.ndim != 1 or wavelength.shape != effective_index.shape or wavelength.size < 2:
            raise ValueError("EffectiveIndexCurve needs two matching 1D arrays with at least two samples")
        if np.any(np.diff(wavelength) <= 0):
            raise ValueError("EffectiveIndexCurve wavelengths must be strictly increasing")
        if np.any(effective_index <= 1):
            raise ValueError("EffectiveIndexCurve effective indices must exceed 1")
        if self.order == 'pchip':
            interpolant = interpolate.PchipInterpolator(wavelength, effective_index, extrapolate=False)
        elif self.order == 'linear':
            interpolant = interpolate.interp1d(wavelength, effective_index, kind='linear')
        else:
            raise ValueError("Unknown interpolation order {!r}".format(self.order))
        wavelength.flags.writeable = False
        effective_index.flags.writeable = False
        object.__setattr__(self, 'wavelength', wavelength)
        object.__setattr__(self, 'effective_index', effective_index)
        object.__setattr__(self, '_interpolant', interpolant)

    @classmethod
    def constant(cls, n_eff, wavelength_range):
        """Return a dispersionless curve over the given (minimum, maximum) wavelength range."""
        return cls(wavelength=np.array(wavelength_range, dtype=float), effective_index=np.array([n_eff, n_eff]))

    @property
    def range(self):
        return float(self.wavelength[0]), float(self.wavelength[-1])

    def contains(self, wavelength):
        low, high = self.range
        wavelength = np.asarray(wavelength)
        return bool(np.all(wavelength >= low * (1 - _edge_slack)) and np.all(wavelength <= high * (1 + _edge_slack)))

    def _clip(self, wavelength):
        wavelength = np.asarray(wavelength, dtype=float)
        if not self.contains(wavelength):
            raise InterpolationDomainError("wavelength outside the effective-index curve range {:.6g} um to {:.6g} um"
                                           .format(1e6 * self.range[0], 1e6 * self.range[1]))
        return np.clip(wavelength, *self.range)

    def __call__(self, wavelength):
        n = np.asarray(self._interpolant(self._clip(wavelength)), dtype=float)
        return float(n) if n.ndim == 0 else n

    def derivative(self, wavelength):
        """Return dn_eff/dlambda in 1/m."""
        wavelength = self._clip(wavelength)
        if self.order == 'pchip':
            slope = np.asarray(self._interpolant.derivative()(wavelength), dtype=float)
        else:
            index = np.clip(np.searchsorted(self.wavelength, wavelength) - 1, 0, self.wavelength.size - 2)
            slope = (np.diff(self.effective_index) / np.diff(self.wavelength))[index]
        return float(slope) if np.ndim(slope) == 0 else slope

    def check_below_bulk(self, material):
        """Raise ValueError unless 1 < n_eff < n_bulk at every sample."""
        bulk = bulk_index(material, self.wavelength)
        bad = np.flatnonzero(self.effective_index >= bulk)
        if bad.size:
            raise ValueError("effective index {:.6g} at {:.6g} um is not below the bulk index {:.6g}".format(
                self.effective_index[bad[0]], 1e6 * self.wavelength[bad[0]], bulk[bad[0]]))


def load_curve(path, material=None, order='pchip'):
    """
    Read a dispersion table with header `lambda_um,n_eff` and ascending rows.

    :param path: the CSV file.
    :param material: if given, a MaterialIndex that every sample must lie below.
    :param order: interpolation order tag passed to EffectiveIndexCurve.
    :return: EffectiveIndexCurve
    """
    columns = tables.read_columns(path, ('lambda_um', 'n_eff'))
    try:
        curve = EffectiveIndexCurve(wavelength=1e-6 * columns['lambda_um'], effective_index=columns['n_eff'],
                                    order=order)
        if material is not None:
            curve.check_below_bulk(material)
    except ValueError as error:
        raise TableFormatError(str(error), filename=path)
    return curve


@dataclass(frozen=True)
class CavityMode:
    """
    One optical resonance taking part in the conversion process.

    :param label: one of 'sig', 'A', 'B', 'idl'.
    :param m: azimuthal mode number.
    :param wavelength: vacuum wavelength in meters.
    :param direction: circulation direction p.
    :param sign: interaction sign c.
    :param effective_index: effective index, or None for a mode that is not guided in the plane.
    """
    label: str
    m: int
    wavelength: float
    direction: int = 1
    sign: int = 1
    effective_index: float = None
    omega: float = field(init=False)

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError("CavityMode.label must be one of {}, not {!r}".format(LABELS, self.label))
        if int(self.m) != self.m or self.m < 0:
            raise ValueError("CavityMode.m must be a non-negative integer, not {!r}".format(self.m))
        if not self.wavelength > 0:
            raise ValueError("CavityMode.wavelength must be positive")
        if self.direction not in (-1, 1) or self.sign not in (-1, 1):
            raise ValueError("CavityMode.direction and CavityMode.sign must be -1 or +1")
        object.__setattr__(self, 'm', int(self.m))
        object.__setattr__(self, 'omega', constants.angular_frequency(self.wavelength))

    @classmethod
    def for_role(cls, label, m, wavelength, effective_index=None):
        """Create a mode with the standard direction and sign for its role."""
        return cls(label=label, m=m, wavelength=wavelength, direction=DIRECTION[label],
                   sign=INTERACTION_SIGN[label], effective_index=effective_index)


@dataclass(frozen=True)
class FwmQuartet:
    """The signal, the two pumps, and the idler of one phase-matched conversion process."""
    sig: CavityMode
    A: CavityMode
    B: CavityMode
    idl: CavityMode

    def __post_init__(self):
        for label in LABELS:
            mode = getattr(self, label)
            if mode.label != label:
                raise ValueError("FwmQuartet.{} holds a mode labelled {!r}".format(label, mode.label))
            if mode.sign != INTERACTION_SIGN[label]:
                raise ValueError("FwmQuartet.{} has interaction sign {}".format(label, mode.sign))
        if self.sig.m - self.A.m - self.B.m != 0:
            raise ValueError("FwmQuartet mode numbers violate m_sig = m_A + m_B: {} != {} + {}".format(
                self.sig.m, self.A.m, self.B.m))
        if abs(self.energy_mismatch) > frequency_tolerance * self.sig.omega:
            raise ValueError("FwmQuartet frequencies violate energy conservation by {:.3g} rad/s".format(
                self.energy_mismatch))

    @property
    def modes(self):
        return self.sig, self.A, self.B, self.idl

    @property
    def energy_mismatch(self):
        """Return sum_i c_i omega_i in rad/s."""
        return sum(mode.sign * mode.omega for mode in self.modes)

    @property
    def mean_square_frequency(self):
        """Return the geometric mean of the four angular frequencies squared: sqrt(w_sig w_A w_B w_idl)."""
        return math.sqrt(self.sig.omega * self.A.omega * self.B.omega * self.idl.omega)


def idler_wavelength(signal_wavelength, pump_a_wavelength, pump_b_wavelength):
    """
    Return the idler wavelength fixed by energy conservation, or infinity when no positive-frequency idler exists.
    """
    inverse = 1 / signal_wavelength + 1 / pump_a_wavelength - 1 / pump_b_wavelength
    if inverse <= 0:
        return np.inf
    return 1 / inverse


def make_quartet(signal, pump_a, pump_b):
    """
    Complete a quartet from its three in-plane modes by adding the idler, which has m = 0.

    :param signal: (m, wavelength, effective_index) for the signal.
    :param pump_a: (m, wavelength, effective_index) for pump A.
    :param pump_b: (m, wavelength, effective_index) for pump B.
    :return: FwmQuartet
    """
    sig = CavityMode.for_role('sig', *signal)
    a = CavityMode.for_role('A', *pump_a)
    b = CavityMode.for_role('B', *pump_b)
    idl_wavelength = idler_wavelength(sig.wavelength, a.wavelength, b.wavelength)
    if not np.isfinite(idl_wavelength):
        raise ValueError("These modes produce no positive-frequency idler")
    idl = CavityMode.for_role('idl', 0, idl_wavelength)
    return FwmQuartet(sig=sig, A=a, B=b, idl=idl)


def mode_number(curve, radius, wavelength):
    """
    Return the real azimuthal number m = 2 pi r n_eff / lambda at which the given wavelength would be resonant.

    :param curve: EffectiveIndexCurve.
    :param radius: ring radius in meters.
    :param wavelength: float or array[float]; vacuum wavelength in meters.
    :return: float or array[float]
    :raises InterpolationDomainError: outside the curve range.
    """
    return 2 * np.pi * radius * curve(wavelength) / np.asarray(wavelength, dtype=float)


def resonant_wavelength(curve, radius, m):
    """
    Return the wavelength at which mode_number equals m.

    The mode number decreases monotonically with wavelength, so a sign change between adjacent curve samples brackets
    the unique root, which is then bisected to machine precision.

    :raises NoResonanceError: if m lies outside the range of mode numbers covered by the curve.
    """
    samples = curve.wavelength
    residual = mode_number(curve, radius, samples) - m
    if residual[0] < 0 or residual[-1] > 0:
        raise NoResonanceError("mode number {} is not resonant between {:.6g} um and {:.6g} um".format(
            m, 1e6 * samples[0], 1e6 * samples[-1]))
    exact = np.flatnonzero(residual == 0)
    if exact.size:
        return float(samples[exact[0]])
    upper = int(np.flatnonzero(residual < 0)[0])

    def difference(wavelength):
        return mode_number(curve, radius, wavelength) - m

    return optimize.bisect(difference, samples[upper - 1], samples[upper], xtol=1e-24, maxiter=200)


def solve_fpm(curve, radius, signal, window):
    """
    Enumerate every pump pair (m_A, m_B) with m_A + m_B = m_sig whose resonances both lie inside the window.

    :param curve: EffectiveIndexCurve of the guided mode family.
    :param radius: ring radius in meters.
    :param signal: CavityMode for the signal, or an integer signal mode number.
    :param window: (minimum, maximum) pump wavelength in meters.
    :return: list of FwmQuartet sorted by idler wavelength; empty when nothing qualifies.
    """
    if isinstance(signal, CavityMode):
        m_sig = signal.m
    else:
        m_sig = int(signal)
    if m_sig < 2:
        raise ValueError("The signal mode number must be at least 2")
    low, high = float(window[0]), float(window[1])
    if high <= low:
        return []
    if not curve.contains([low, high]):
        raise InterpolationDomainError("pump window {:.6g} um to {:.6g} um exceeds the curve range".format(
            1e6 * low, 1e6 * high))
    signal_wavelength = resonant_wavelength(curve, radius, m_sig)
    signal_args = (m_sig, signal_wavelength, curve(signal_wavelength))
    # Mode numbers resonant inside the window form a contiguous range because mode_number is monotone.
    m_low = max(1, int(math.ceil(mode_number(curve, radius, high))))
    m_high = min(m_sig - 1, int(math.floor(mode_number(curve, radius, low))))
    resonances = {}
    for m in range(m_low, m_high + 1):
        wavelength = resonant_wavelength(curve, radius, m)
        if low <= wavelength <= high:
            resonances[m] = wavelength
    quartets = []
    for m_a, wavelength_a in sorted(resonances.items()):
        m_b = m_sig - m_a
        if m_b not in resonances:
            continue
        wavelength_b = resonances[m_b]
        if not np.isfinite(idler_wavelength(signal_wavelength, wavelength_a, wavelength_b)):
            continue
        quartets.append(make_quartet(signal_args, (m_a, wavelength_a, curve(wavelength_a)),
                                     (m_b, wavelength_b, curve(wavelength_b))))
    quartets.sort(key=lambda q: (q.idl.wavelength, q.A.m))
    logger.debug("Found %d phase-matched quartets for m_sig = %d", len(quartets), m_sig)
    return quartets


CompetingProcess = collections.namedtuple('CompetingProcess', ['label', 'mismatch', 'coherence_length',
                                                               'frequency_weight', 'extrapolated', 'wavelengths'])
CompetingProcess.__doc__ = """
One four-wave mixing process that competes with the designed conversion.

:param label: short description of the process.
:param mismatch: in-plane wavevector mismatch sum_i c_i p_i n_eff,i k_0,i in rad/m.
:param coherence_length: pi / |mismatch| in meters, infinite when phase matched.
:param frequency_weight: geometric-mean squared frequency of the process relative to the designed one.
:param extrapolated: True if any effective index came from the bulk model outside the curve range.
:param wavelengths: the four vacuum wavelengths in meters, destroyed photons first.
"""


def coherence_length(mismatch):
    if mismatch == 0:
        return np.inf
    return np.pi / abs(mismatch)


def competing_process_scan(quartet, curve, radius, material=None, signal_offset=-1):
    """
    Evaluate the phase mismatch of the processes that compete with the designed conversion.

    The polluting signal-channel photon is taken to be the signal-family resonance with mode number
    m_sig + signal_offset; the fourth wavelength of each spurious process follows from energy conservation. The
    circulation of each created photon is chosen to minimize the mismatch, which gives the most dangerous case.
    Effective indices outside the curve range fall back to the bulk index and the row is marked as extrapolated.

    :param quartet: the designed FwmQuartet.
    :param curve: EffectiveIndexCurve of the guided mode family.
    :param radius: ring radius in meters.
    :param material: MaterialIndex used outside the curve range; defaults to diamond.
    :param signal_offset: offset of the spurious signal resonance from the designed signal mode number.
    :return: list of CompetingProcess.
    """
    if material is None:
        material = MaterialIndex.diamond()
    sig, a, b, idl = quartet.modes
    main_weight = quartet.mean_square_frequency

    def real_mode_number(wavelength):
        if curve.contains(wavelength):
            return mode_number(curve, radius, wavelength), False
        logger.warning("Using the bulk index at %.4g um, outside the effective-index curve", 1e6 * wavelength)
        return 2 * np.pi * radius * bulk_index(material, wavelength) / wavelength, True

    def weight(wavelengths):
        omegas = [constants.angular_frequency(w) for w in wavelengths]
        return math.sqrt(omegas[0] * omegas[1] * omegas[2] * omegas[3]) / main_weight

    processes = []
    in_plane = (sig, a, b)
    main = sum(mode.sign * mode.direction * mode.m for mode in in_plane) / radius
    main_wavelengths = (sig.wavelength, a.wavelength, b.wavelength, idl.wavelength)
    processes.append(CompetingProcess('designed', main, coherence_length(main), 1.0, False, main_wavelengths))
    mirror = sum(-mode.sign * mode.direction * mode.m for mode in in_plane) / radius
    processes.append(CompetingProcess('designed, reversed circulation', mirror, coherence_length(mirror), 1.0, False,
                                      main_wavelengths))
    symmetric = (sig.m + a.m - b.m) / radius
    processes.append(CompetingProcess('symmetric pumps m_sig + m_A - m_B', symmetric, coherence_length(symmetric),
                                      1.0, False, main_wavelengths))

    m_spurious = sig.m + signal_offset
    spurious_wavelength = resonant_wavelength(curve, radius, m_spurious)
    for label, destroyed in (('2 B -> sig\' + x', (b, b)), ('A + B -> sig\' + x', (a, b))):
        inverse = sum(1 / mode.wavelength for mode in destroyed) - 1 / spurious_wavelength
        if inverse <= 0:
            continue
        other_wavelength = 1 / inverse
        other_m, extrapolated = real_mode_number(other_wavelength)
        pump_sum = sum(mode.direction * mode.m for mode in destroyed)
        candidates = [pump_sum - p_sig * m_spurious - p_other * other_m for p_sig in (1, -1) for p_other in (1, -1)]
        mismatch = min(candidates, key=abs) / radius
        wavelengths = (destroyed[0].wavelength, destroyed[1].wavelength, spurious_wavelength, other_wavelength)
        processes.append(CompetingProcess(label, mismatch, coherence_length(mismatch), weight(wavelengths),
                                          extrapolated, wavelengths))
    return processes


def out_of_plane_phase(geometry, index, wavelength):
    """
    Return the phase 2 pi n t / lambda accumulated by the idler crossing the ring thickness, and whether it exceeds pi.

    :param geometry: RingGeometry.
    :param index: refractive index seen by the idler.
    :param wavelength: vacuum wavelength of the idler in meters.
    :return: (phase in radians, flag)
    """
    phase = 2 * np.pi * index * geometry.thickness / wavelength
    flagged = phase > np.pi
    if flagged:
        logger.warning("Out-of-plane phase %.3f rad exceeds pi", phase)
    return phase, flagged


def group_index(curve, wavelength):
    """Return the group index n_eff - lambda dn_eff/dlambda."""
    return curve(wavelength) - wavelength * curve.derivative(wavelength)


def free_spectral_range(curve, radius, wavelength):
    """Return the free spectral range in wavelength, lambda^2 / (2 pi r n_g), in meters."""
    return wavelength ** 2 / (2 * np.pi * radius * group_index(curve, wavelength))
