"""
Physical constants used throughout the package, collected in one table so that every run manifest can record exactly
which values produced its outputs.
"""
from __future__ import absolute_import, division, print_function

import collections
import hashlib
import json

from scipy.constants import c, hbar, pi

# Re-exported under the names used in the physics modules.
speed_of_light = c
reduced_planck = hbar


def constants_table():
    """
    Return an ordered mapping from constant name to value in SI units.

    :return: collections.OrderedDict[str, float]
    """
    return collections.OrderedDict([('hbar_J_s', float(reduced_planck)),
                                    ('c0_m_per_s', float(speed_of_light)),
                                    ('pi', float(pi))])


def constants_hash():
    """
    Return the sha256 hex digest of the canonical JSON encoding of `constants_table()`.

    :return: str
    """
    encoded = json.dumps(constants_table(), sort_keys=True, separators=(',', ':')).encode('ascii')
    return hashlib.sha256(encoded).hexdigest()


def angular_frequency(wavelength):
    """Return the angular frequency in rad/s of light with the given vacuum wavelength in meters."""
    return 2 * pi * speed_of_light / wavelength
