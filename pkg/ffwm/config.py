"""
Run configuration: one JSON document with a versioned schema, read into frozen dataclasses.

Lengths are written in micrometres with `_um` keys and stored in meters. File paths are relative to the configuration
file, or start with `package:` to name a file shipped in the package data directory. Every error raised while reading
is a ConfigError that names the file and, where possible, the line.
"""
from __future__ import absolute_import, division, print_function

import io
import json
import logging
import os
import re
from dataclasses import dataclass

from . import dispersion, sweeps, tables
from .base import ConfigError
from .cavityqed import DeviceContext, EmitterParams, NonlinearMedium

logger = logging.getLogger(__name__)

schema_version = 1

default_config_name = 'diamond_ring.json'

package_prefix = 'package:'


@dataclass(frozen=True)
class QuartetConfig:
    """Mode numbers and wavelengths in meters of the designed signal and pumps, and the phase-matching window."""
    signal: tuple
    pump_a: tuple
    pump_b: tuple
    window: tuple


@dataclass(frozen=True)
class PumpConfig:
    alpha_a: float = 1.0
    alpha_b: float = 1.0
    power_ratio: float = 1.0
    phase_a: float = 0.0
    phase_b: float = 0.0


@dataclass(frozen=True)
class QualityConfig:
    q_bar: float = 1e5
    q_idler: float = 7.8
    alpha_sig: float = 0.0
    signal_detuning: float = 0.0
    idler_detuning: float = 0.0


@dataclass(frozen=True)
class EfficiencyConfig:
    """
    :param budget: pump budget in watts.
    :param zpl_fraction: r_ZPL; None uses the emitter's Debye-Waller factor times its quantum efficiency.
    :param eta_spatial: spatial efficiency that multiplies the idler efficiency.
    :param eta_idler: if not None, replaces the computed idler efficiency in the total.
    """
    budget: float = 15.2
    zpl_fraction: float = None
    eta_spatial: float = 0.21
    eta_idler: float = None


@dataclass(frozen=True)
class SweepConfig:
    q_values: tuple = (1e3, 1e4, 1e5, 1e6)
    zpl_fractions: tuple = (0.04, 0.24, 0.48, 1.0)
    budget_min: float = 1e-2
    budget_max: float = 1e3
    budget_points: int = 41
    p_max: float = 1e4
    saturation_points: int = 40
    loss_ratio_eta_spatial: float = sweeps.loss_ratio_spatial_efficiency


@dataclass(frozen=True)
class BeamConfig:
    """
    :param farfield: path of a far-field CSV, or None for the synthetic radially polarized doughnut.
    :param wavelength: idler wavelength in meters, used when no sidecar file gives it.
    :param z_values: axial plane positions in meters.
    """
    farfield: str = None
    wavelength: float = 1.301e-6
    na: float = 0.82
    transmission: float = 0.9
    z_values: tuple = (0.0,)
    plane_half_width: float = 20e-6
    plane_points: int = 257
    farfield_points: int = 201
    apply_waveplate: bool = True
    synthetic_width: float = 0.5


@dataclass(frozen=True)
class RunConfig:
    source: str
    geometry: dispersion.RingGeometry
    material_path: str
    dispersion_path: str
    interpolation: str
    quartet: QuartetConfig
    emitter: EmitterParams
    medium: NonlinearMedium
    pumps: PumpConfig
    quality: QualityConfig
    efficiency: EfficiencyConfig
    sweep: SweepConfig
    beam: BeamConfig
    signal_offset: int
    document: dict

    def material(self):
        return dispersion.load_material(self.material_path)

    def curve(self, material=None):
        return dispersion.load_curve(self.dispersion_path, material=material, order=self.interpolation)

    def designed_quartet(self):
        return dispersion.make_quartet(self.quartet.signal, self.quartet.pump_a, self.quartet.pump_b)

    def device_context(self, material=None):
        """Return the DeviceContext of the designed quartet with bulk indices from the material."""
        if material is None:
            material = self.material()
        quartet = self.designed_quartet()
        indices = tuple(dispersion.bulk_index(material, mode.wavelength) for mode in quartet.modes)
        return DeviceContext(quartet=quartet, indices=indices, medium=self.medium, emitter=self.emitter,
                             alpha_a=self.pumps.alpha_a, alpha_b=self.pumps.alpha_b,
                             alpha_sig=self.quality.alpha_sig, q_idler=self.quality.q_idler,
                             signal_detuning=self.quality.signal_detuning, idler_detuning=self.quality.idler_detuning,
                             pump_ratio=self.pumps.power_ratio)

    def zpl_fraction(self):
        if self.efficiency.zpl_fraction is None:
            return self.emitter.zpl_fraction
        return self.efficiency.zpl_fraction

    def to_dict(self):
        """Return the resolved document, with defaults filled in and paths made absolute."""
        return json.loads(json.dumps(self.document))


class _Reader(object):

    def __init__(self, text, filename):
        self.text = text
        self.filename = filename

    def line_of(self, key):
        match = re.search(r'"{}"\s*:'.format(re.escape(key)), self.text)
        if match is None:
            return None
        return self.text.count('\n', 0, match.start()) + 1

    def error(self, message, key=None):
        return ConfigError(message, filename=self.filename, line=None if key is None else self.line_of(key))

    def section(self, document, name, allowed):
        section = document.get(name, {})
        if not isinstance(section, dict):
            raise self.error("{} must be an object".format(name), name)
        unknown = sorted(set(section) - set(allowed))
        if unknown:
            raise self.error("unknown key {}.{}".format(name, unknown[0]), unknown[0])
        return section

    def number(self, section, name, key, default, integer=False):
        value = section.get(key, default)
        if value is None:
            return None
        kinds = (int,) if integer else (int, float)
        if isinstance(value, bool) or not isinstance(value, kinds):
            raise self.error("{}.{} must be {}".format(name, key, 'an integer' if integer else 'a number'), key)
        return value

    def numbers(self, section, name, key, default, length=None):
        values = section.get(key, default)
        if not isinstance(values, (list, tuple)) or not values:
            raise self.error("{}.{} must be a non-empty list of numbers".format(name, key), key)
        if length is not None and len(values) != length:
            raise self.error("{}.{} must have {} entries".format(name, key, length), key)
        for value in values:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise self.error("{}.{} must contain only numbers".format(name, key), key)
        return tuple(values)

    def path(self, value, key):
        if not isinstance(value, str):
            raise self.error("{} must be a file path".format(key), key)
        if value.startswith(package_prefix):
            resolved = tables.package_data(value[len(package_prefix):])
        elif self.filename is not None:
            resolved = os.path.join(os.path.dirname(os.path.abspath(self.filename)), value)
        else:
            resolved = os.path.abspath(value)
        if not os.path.isfile(resolved):
            raise self.error("file not found: {}".format(resolved), key)
        return resolved

    def build(self, name, factory, **kwds):
        try:
            return factory(**kwds)
        except (TypeError, ValueError) as error:
            raise self.error("{}: {}".format(name, error), name)


_top_level_keys = ('schema_version', 'geometry', 'material', 'dispersion', 'quartet', 'emitter', 'medium', 'pumps',
                   'quality', 'efficiency', 'sweep', 'beam', 'noise')


def parse_config(text, filename=None):
    """
    Read a configuration document.

    :param text: the JSON text.
    :param filename: the file the text came from, used for messages and relative paths.
    :return: RunConfig
    :raises ConfigError: for invalid JSON, unknown keys, missing files, or values that fail validation.
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as error:
        raise ConfigError("invalid JSON: {} at column {}".format(error.msg, error.colno), filename=filename,
                          line=error.lineno)
    reader = _Reader(text, filename)
    if not isinstance(document, dict):
        raise reader.error("the configuration must be a JSON object")
    unknown = sorted(set(document) - set(_top_level_keys))
    if unknown:
        raise reader.error("unknown key {}".format(unknown[0]), unknown[0])
    version = document.get('schema_version')
    if version != schema_version:
        raise reader.error("schema_version must be {}, not {!r}".format(schema_version, version), 'schema_version')

    section = reader.section(document, 'geometry', ('radius_um', 'width_um', 'thickness_um', 'reflector_gap_um'))
    geometry_um = dict((key, reader.number(section, 'geometry', key, default)) for key, default in
                       (('radius_um', 6.0), ('width_um', 0.75), ('thickness_um', 0.55), ('reflector_gap_um', 0.87)))
    geometry = reader.build('geometry', dispersion.RingGeometry, radius=1e-6 * geometry_um['radius_um'],
                            width=1e-6 * geometry_um['width_um'], thickness=1e-6 * geometry_um['thickness_um'],
                            reflector_gap=1e-6 * geometry_um['reflector_gap_um'])

    material_path = reader.path(document.get('material', package_prefix + 'diamond_sellmeier.csv'), 'material')
    section = reader.section(document, 'dispersion', ('table', 'interpolation'))
    dispersion_path = reader.path(section.get('table', package_prefix + 'diamond_ring_neff.csv'), 'table')
    interpolation = section.get('interpolation', 'pchip')
    if interpolation not in ('pchip', 'linear'):
        raise reader.error("dispersion.interpolation must be 'pchip' or 'linear'", 'interpolation')

    section = reader.section(document, 'quartet', ('signal', 'pump_a', 'pump_b', 'window_um'))
    modes = {}
    for key, default in (('signal', (143, 0.615)), ('pump_a', (28, 2.095)), ('pump_b', (115, 0.750))):
        m, wavelength_um = reader.numbers(section, 'quartet', key, default, length=2)
        if int(m) != m:
            raise reader.error("quartet.{} needs an integer mode number".format(key), key)
        modes[key] = (int(m), 1e-6 * wavelength_um)
    window_um = reader.numbers(section, 'quartet', 'window_um', (0.5, 2.2), length=2)
    quartet = QuartetConfig(signal=modes['signal'], pump_a=modes['pump_a'], pump_b=modes['pump_b'],
                            window=tuple(1e-6 * w for w in window_um))
    try:
        dispersion.make_quartet(quartet.signal, quartet.pump_a, quartet.pump_b)
    except ValueError as error:
        raise reader.error("quartet: {}".format(error), 'quartet')

    section = reader.section(document, 'emitter', ('lifetime_ns', 'debye_waller', 'quantum_efficiency',
                                                   'zpl_wavelength_um'))
    emitter = reader.build('emitter', EmitterParams,
                           lifetime=1e-9 * reader.number(section, 'emitter', 'lifetime_ns', 4.5),
                           debye_waller=reader.number(section, 'emitter', 'debye_waller', 0.6),
                           quantum_efficiency=reader.number(section, 'emitter', 'quantum_efficiency', 0.8),
                           zpl_wavelength=1e-6 * reader.number(section, 'emitter', 'zpl_wavelength_um', 0.615))

    section = reader.section(document, 'medium', ('n2_m2_per_W', 'mode_volume_um3'))
    medium = reader.build('medium', NonlinearMedium, n2=reader.number(section, 'medium', 'n2_m2_per_W', 8.2e-20),
                          mode_volume=1e-18 * reader.number(section, 'medium', 'mode_volume_um3', 0.73))

    section = reader.section(document, 'pumps', ('alpha_a', 'alpha_b', 'power_ratio', 'phase_a', 'phase_b'))
    pumps = reader.build('pumps', PumpConfig, **dict(
        (key, reader.number(section, 'pumps', key, default)) for key, default in
        (('alpha_a', 1.0), ('alpha_b', 1.0), ('power_ratio', 1.0), ('phase_a', 0.0), ('phase_b', 0.0))))
    for key in ('alpha_a', 'alpha_b'):
        if not getattr(pumps, key) >= 0:
            raise reader.error("pumps.{} must be non-negative".format(key), key)
    if not pumps.power_ratio > 0:
        raise reader.error("pumps.power_ratio must be positive", 'power_ratio')

    section = reader.section(document, 'quality', ('q_bar', 'q_idler', 'alpha_sig', 'signal_detuning_rad_per_s',
                                                   'idler_detuning_rad_per_s'))
    quality = reader.build('quality', QualityConfig,
                           q_bar=reader.number(section, 'quality', 'q_bar', 1e5),
                           q_idler=reader.number(section, 'quality', 'q_idler', 7.8),
                           alpha_sig=reader.number(section, 'quality', 'alpha_sig', 0.0),
                           signal_detuning=reader.number(section, 'quality', 'signal_detuning_rad_per_s', 0.0),
                           idler_detuning=reader.number(section, 'quality', 'idler_detuning_rad_per_s', 0.0))
    if not quality.q_bar > 0:
        raise reader.error("quality.q_bar must be positive", 'q_bar')
    if not quality.q_idler > 0:
        raise reader.error("quality.q_idler must be positive", 'q_idler')
    if not quality.alpha_sig >= 0:
        raise reader.error("quality.alpha_sig must be non-negative", 'alpha_sig')

    section = reader.section(document, 'efficiency', ('budget_W', 'zpl_fraction', 'eta_spatial', 'eta_idler'))
    efficiency = reader.build('efficiency', EfficiencyConfig,
                              budget=reader.number(section, 'efficiency', 'budget_W', 15.2),
                              zpl_fraction=reader.number(section, 'efficiency', 'zpl_fraction', None),
                              eta_spatial=reader.number(section, 'efficiency', 'eta_spatial', 0.21),
                              eta_idler=reader.number(section, 'efficiency', 'eta_idler', None))
    for key, value in (('budget_W', efficiency.budget),):
        if value < 0:
            raise reader.error("efficiency.{} must be non-negative".format(key), key)
    for key, value in (('zpl_fraction', efficiency.zpl_fraction), ('eta_spatial', efficiency.eta_spatial),
                       ('eta_idler', efficiency.eta_idler)):
        if value is not None and not 0 <= value <= 1:
            raise reader.error("efficiency.{} must lie in [0, 1]".format(key), key)

    section = reader.section(document, 'sweep', ('q_values', 'zpl_fractions', 'budget_min_W', 'budget_max_W',
                                                 'budget_points', 'p_max_W', 'saturation_points',
                                                 'loss_ratio_eta_spatial'))
    sweep = SweepConfig(q_values=reader.numbers(section, 'sweep', 'q_values', SweepConfig.q_values),
                        zpl_fractions=reader.numbers(section, 'sweep', 'zpl_fractions', SweepConfig.zpl_fractions),
                        budget_min=reader.number(section, 'sweep', 'budget_min_W', SweepConfig.budget_min),
                        budget_max=reader.number(section, 'sweep', 'budget_max_W', SweepConfig.budget_max),
                        budget_points=reader.number(section, 'sweep', 'budget_points', SweepConfig.budget_points,
                                                    integer=True),
                        p_max=reader.number(section, 'sweep', 'p_max_W', SweepConfig.p_max),
                        saturation_points=reader.number(section, 'sweep', 'saturation_points',
                                                        SweepConfig.saturation_points, integer=True),
                        loss_ratio_eta_spatial=reader.number(section, 'sweep', 'loss_ratio_eta_spatial',
                                                             SweepConfig.loss_ratio_eta_spatial))
    for key, values in (('q_values', sweep.q_values), ('zpl_fractions', sweep.zpl_fractions)):
        if any(b <= a for a, b in zip(values[:-1], values[1:])):
            raise reader.error("sweep.{} must be strictly increasing".format(key), key)
    if sweep.q_values[0] <= 0 or not 0 <= sweep.zpl_fractions[0] <= sweep.zpl_fractions[-1] <= 1:
        raise reader.error("sweep needs positive q_values and zpl_fractions in [0, 1]", 'sweep')
    if not 0 < sweep.budget_min <= sweep.budget_max <= sweep.p_max:
        raise reader.error("sweep needs 0 < budget_min_W <= budget_max_W <= p_max_W", 'sweep')
    if sweep.budget_points < 1 or sweep.saturation_points < 3:
        raise reader.error("sweep needs budget_points >= 1 and saturation_points >= 3", 'sweep')
    if sweep.budget_points == 1 and sweep.budget_min != sweep.budget_max:
        raise reader.error("a single budget point needs budget_min_W == budget_max_W", 'budget_points')
    if not 0 <= sweep.loss_ratio_eta_spatial <= 1:
        raise reader.error("sweep.loss_ratio_eta_spatial must lie in [0, 1]", 'loss_ratio_eta_spatial')

    section = reader.section(document, 'beam', ('farfield', 'wavelength_um', 'na', 'transmission', 'z_um',
                                                'plane_half_width_um', 'plane_points', 'farfield_points',
                                                'apply_waveplate', 'synthetic_width'))
    farfield = section.get('farfield')
    if farfield is not None:
        farfield = reader.path(farfield, 'farfield')
    apply_waveplate = section.get('apply_waveplate', True)
    if not isinstance(apply_waveplate, bool):
        raise reader.error("beam.apply_waveplate must be true or false", 'apply_waveplate')
    beam = BeamConfig(farfield=farfield,
                      wavelength=1e-6 * reader.number(section, 'beam', 'wavelength_um', 1.301),
                      na=reader.number(section, 'beam', 'na', 0.82),
                      transmission=reader.number(section, 'beam', 'transmission', 0.9),
                      z_values=tuple(1e-6 * z for z in reader.numbers(section, 'beam', 'z_um', (0.0,))),
                      plane_half_width=1e-6 * reader.number(section, 'beam', 'plane_half_width_um', 20.0),
                      plane_points=reader.number(section, 'beam', 'plane_points', 257, integer=True),
                      farfield_points=reader.number(section, 'beam', 'farfield_points', 201, integer=True),
                      apply_waveplate=apply_waveplate,
                      synthetic_width=reader.number(section, 'beam', 'synthetic_width', 0.5))
    for key, value in (('wavelength_um', beam.wavelength), ('plane_half_width_um', beam.plane_half_width),
                       ('synthetic_width', beam.synthetic_width)):
        if not value > 0:
            raise reader.error("beam.{} must be positive".format(key), key)
    if not 0 < beam.na < 1:
        raise reader.error("beam.na must lie in (0, 1)", 'na')
    if not 0 <= beam.transmission <= 1:
        raise reader.error("beam.transmission must lie in [0, 1]", 'transmission')
    if beam.plane_points < 3 or beam.farfield_points < 3:
        raise reader.error("beam grids need at least 3 points", 'beam')

    section = reader.section(document, 'noise', ('signal_offset',))
    signal_offset = reader.number(section, 'noise', 'signal_offset', -1, integer=True)
    if signal_offset == 0:
        raise reader.error("noise.signal_offset must not be zero", 'signal_offset')

    resolved = {
        'schema_version': schema_version,
        'geometry': geometry_um,
        'material': material_path,
        'dispersion': {'table': dispersion_path, 'interpolation': interpolation},
        'quartet': dict([(key, [mode[0], 1e6 * mode[1]]) for key, mode in modes.items()] +
                        [('window_um', list(window_um))]),
        'emitter': {'lifetime_ns': 1e9 * emitter.lifetime, 'debye_waller': emitter.debye_waller,
                    'quantum_efficiency': emitter.quantum_efficiency,
                    'zpl_wavelength_um': 1e6 * emitter.zpl_wavelength},
        'medium': {'n2_m2_per_W': medium.n2, 'mode_volume_um3': 1e18 * medium.mode_volume},
        'pumps': {'alpha_a': pumps.alpha_a, 'alpha_b': pumps.alpha_b, 'power_ratio': pumps.power_ratio,
                  'phase_a': pumps.phase_a, 'phase_b': pumps.phase_b},
        'quality': {'q_bar': quality.q_bar, 'q_idler': quality.q_idler, 'alpha_sig': quality.alpha_sig,
                    'signal_detuning_rad_per_s': quality.signal_detuning,
                    'idler_detuning_rad_per_s': quality.idler_detuning},
        'efficiency': {'budget_W': efficiency.budget, 'zpl_fraction': efficiency.zpl_fraction,
                       'eta_spatial': efficiency.eta_spatial, 'eta_idler': efficiency.eta_idler},
        'sweep': {'q_values': list(sweep.q_values), 'zpl_fractions': list(sweep.zpl_fractions),
                  'budget_min_W': sweep.budget_min, 'budget_max_W': sweep.budget_max,
                  'budget_points': sweep.budget_points, 'p_max_W': sweep.p_max,
                  'saturation_points': sweep.saturation_points,
                  'loss_ratio_eta_spatial': sweep.loss_ratio_eta_spatial},
        'beam': {'farfield': farfield, 'wavelength_um': 1e6 * beam.wavelength, 'na': beam.na,
                 'transmission': beam.transmission, 'z_um': [1e6 * z for z in beam.z_values],
                 'plane_half_width_um': 1e6 * beam.plane_half_width, 'plane_points': beam.plane_points,
                 'farfield_points': beam.farfield_points, 'apply_waveplate': beam.apply_waveplate,
                 'synthetic_width': beam.synthetic_width},
        'noise': {'signal_offset': signal_offset},
    }
    return RunConfig(source=filename, geometry=geometry, material_path=material_path,
                     dispersion_path=dispersion_path, interpolation=interpolation, quartet=quartet, emitter=emitter,
                     medium=medium, pumps=pumps, quality=quality, efficiency=efficiency, sweep=sweep, beam=beam,
                     signal_offset=signal_offset, document=resolved)


def load_config(path=None):
    """
    Read a configuration file; with no path, read the example configuration shipped with the package.

    :raises FileNotFoundError: if the file does not exist.
    :raises ConfigError: if the file is invalid.
    """
    if path is None:
        path = tables.package_data(default_config_name)
    with io.open(path, 'r', encoding='utf-8') as f:
        text = f.read()
    logger.debug("Read configuration %s", path)
    return parse_config(text, filename=path)
