"""
This module contains the exception hierarchy and base classes shared by the other modules.
"""
from __future__ import absolute_import, division, print_function

import lmfit


class WindowError(ValueError):
    """A wavelength lies outside the validity window of a material model."""


class InterpolationDomainError(ValueError):
    """A wavelength lies outside the sampled range of an effective-index curve."""


class NoResonanceError(ValueError):
    """No wavelength in the curve range has the requested azimuthal mode number."""


class DegenerateSystemError(ArithmeticError):
    """The coupled-amplitude matrix is too close to defective for the eigenvector expansion."""


class DivergentIntegralError(ArithmeticError):
    """A yield integral does not converge because some mode does not decay."""


class NumericalFailure(ArithmeticError):
    """Both the closed-form solution and the time-domain fallback failed."""


class UndefinedQError(ZeroDivisionError):
    """The quality factor is undefined because the dissipated power is zero."""


class IllConditionedIntegralError(ValueError):
    """The far-field contains rays too close to grazing for the focusing integral."""


class ConfigError(ValueError):
    """
    A configuration or input file is invalid.

    The message is prefixed with the file name and, when known, the line number.
    """

    def __init__(self, message, filename=None, line=None):
        self.filename = filename
        self.line = line
        prefix = ''
        if filename is not None:
            prefix = str(filename)
            if line is not None:
                prefix += ':{}'.format(line)
            prefix += ': '
        super(ConfigError, self).__init__(prefix + message)


class TableFormatError(ConfigError):
    """A CSV table could not be parsed."""


class BeamModel(lmfit.model.Model):
    """
    Base class for models of transverse beam profiles. The independent variable is the radial distance from the beam
    axis in meters.
    """

    def guess(self, data, radius, **kwds):
        """Subclasses should implement a guess function that returns reasonable initial values for the fit."""
        return self.make_params()
