"""
Rates, couplings, and the exact solution of the three-amplitude system that describes an emitter coupled to the signal
mode of a ring, which is converted by two classical pumps into a rapidly radiating idler mode.

The amplitudes c = (c_e, c_sig, c_idl) obey dc/dt = -A c with
  A = [[M_e / 2,       i g_e,                     0                         ],
       [i g_e,         M_sig / 2 + i Delta_sig,   i g_nl                    ],
       [0,             i g_nl,                    Gamma_idl / 2 + i Delta_idl]],
where every rate is an angular rate in rad/s. The probability that the excitation leaves through the idler, through
the lossy decay of the emitter, or through signal loss is the time integral of the corresponding rate times |c_j|^2.
These integrals have a closed form in terms of the eigenvalues and eigenvectors of A.
"""
from __future__ import absolute_import, division, print_function

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from . import constants, dispersion
from .base import DegenerateSystemError, DivergentIntegralError, NumericalFailure, UndefinedQError

logger = logging.getLogger(__name__)

ROLES = ('sig', 'A', 'B', 'idl')

# Eigenvector matrices with a larger condition number are treated as defective.
max_condition_number = 1e12

# Eigenvalue gaps below this fraction of the matrix norm trigger the time-domain fallback.
degeneracy_gap = 1e-8

# Bound on the eigenpair residual relative to the matrix norm.
residual_tolerance = 1e-10

# Allowed violation of probability conservation before the closed form is rejected.
conservation_tolerance = 1e-6

default_initial_state = (1, 0, 0)


@dataclass(frozen=True)
class EmitterParams:
    """
    The quantum emitter embedded in the ring.

    :param lifetime: bulk radiative lifetime tau_e in seconds.
    :param debye_waller: fraction of radiative emission into the zero-phonon line.
    :param quantum_efficiency: radiative quantum efficiency.
    :param zpl_wavelength: zero-phonon-line wavelength in meters.
    """
    lifetime: float = 4.5e-9
    debye_waller: float = 0.6
    quantum_efficiency: float = 0.8
    zpl_wavelength: float = 0.615e-6

    def __post_init__(self):
        if not self.lifetime > 0:
            raise ValueError("EmitterParams.lifetime must be positive")
        for name in ('debye_waller', 'quantum_efficiency'):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError("EmitterParams.{} must lie in [0, 1]".format(name))
        if not self.zpl_wavelength > 0:
            raise ValueError("EmitterParams.zpl_wavelength must be positive")

    @property
    def zpl_fraction(self):
        """The probability r_ZPL that a bulk decay is radiative into the zero-phonon line."""
        return self.debye_waller * self.quantum_efficiency

    @classmethod
    def with_zpl_fraction(cls, zpl_fraction, **kwds):
        """Return an emitter whose zero-phonon fraction is carried entirely by the Debye-Waller factor."""
        return cls(debye_waller=zpl_fraction, quantum_efficiency=1, **kwds)


@dataclass(frozen=True)
class ModeRates:
    """
    Linear rates of one mode, all in rad/s.

    :param role: 'sig', 'A', 'B', or 'idl'.
    :param omega: angular frequency.
    :param q_cav: intrinsic cavity quality factor.
    :param alpha: ratio of bus coupling to intrinsic loss.
    :param coupling: rate Gamma into the useful channel.
    :param loss: rate M into lost channels.
    """
    role: str
    omega: float
    q_cav: float
    alpha: float
    coupling: float
    loss: float


def rates_for(role, omega, q_cav, alpha):
    """
    Return the rates of a mode according to its role.

    Pumps are useful when they couple from the bus, so their channel is the bus and their loss is intrinsic. The
    signal has no useful channel: both intrinsic loss and bus coupling remove it. The idler radiates into free space,
    which is its useful channel, with no other loss.

    :param role: 'sig', 'A', 'B', or 'idl'.
    :param omega: angular frequency in rad/s.
    :param q_cav: intrinsic cavity quality factor.
    :param alpha: bus-coupling ratio; ignored for the idler.
    :return: ModeRates
    """
    if not q_cav > 0:
        raise ValueError("q_cav must be positive")
    if not alpha >= 0:
        raise ValueError("alpha must be non-negative")
    cavity_rate = omega / (2 * q_cav)
    if role in ('A', 'B'):
        coupling, loss = alpha * cavity_rate, cavity_rate
    elif role == 'sig':
        coupling, loss = 0.0, (1 + alpha) * cavity_rate
    elif role == 'idl':
        coupling, loss = cavity_rate, 0.0
    else:
        raise ValueError("Unknown mode role {!r}".format(role))
    return ModeRates(role=role, omega=omega, q_cav=q_cav, alpha=alpha, coupling=coupling, loss=loss)


@dataclass(frozen=True)
class PumpDrive:
    """
    Powers in watts injected into the bus for the two pumps, their phases in radians, and their coupling ratios.
    """
    power_a: float
    power_b: float
    phase_a: float = 0.0
    phase_b: float = 0.0
    alpha_a: float = 1.0
    alpha_b: float = 1.0

    def __post_init__(self):
        if not (self.power_a >= 0 and self.power_b >= 0):
            raise ValueError("PumpDrive powers must be non-negative")


@dataclass(frozen=True)
class NonlinearMedium:
    """
    :param n2: nonlinear refractive index in m^2/W.
    :param mode_volume: cavity mode volume in m^3.
    """
    n2: float = 8.2e-20
    mode_volume: float = 7.3e-19

    def __post_init__(self):
        if not (self.n2 > 0 and self.mode_volume > 0):
            raise ValueError("NonlinearMedium.n2 and NonlinearMedium.mode_volume must be positive")


def pump_amplitude(omega, power, q_cav, alpha, phase=0.0):
    """
    Return the classical intracavity amplitude of a pump, whose squared magnitude is the intracavity photon number
      |a|^2 = 4 alpha P Q / (hbar (1 + alpha)^2 omega^2).

    :param omega: pump angular frequency in rad/s.
    :param power: power in the bus in watts.
    :param q_cav: intrinsic cavity quality factor.
    :param alpha: bus-coupling ratio.
    :param phase: pump phase in radians.
    :return: complex
    """
    if power < 0:
        raise ValueError("Pump power must be non-negative")
    magnitude = math.sqrt(4 * alpha * power * q_cav / (constants.reduced_planck * (alpha + 1) ** 2)) / omega
    return -1j * np.exp(1j * phase) * magnitude


def nonlinear_strength(frequencies, indices, medium):
    """
    Return the nonlinear coupling strength 2 hbar w^2 c n2 / (n^2 V), where w^2 and n^2 are the geometric means of the
    products of the four frequencies and the four indices.

    :param frequencies: the four angular frequencies in rad/s.
    :param indices: the four refractive indices.
    :param medium: NonlinearMedium.
    :return: float, in rad/s
    """
    mean_square_frequency = math.sqrt(float(np.prod(frequencies)))
    mean_square_index = math.sqrt(float(np.prod(indices)))
    return (2 * constants.reduced_planck * mean_square_frequency * constants.speed_of_light * medium.n2
            / (mean_square_index * medium.mode_volume))


def nonlinear_coupling(strength, amplitude_a, amplitude_b):
    """Return the complex signal-idler coupling g_nl = strength a_A conj(a_B) in rad/s."""
    return strength * amplitude_a * np.conj(amplitude_b)


def purcell(wavelength, index, q_cav, mode_volume):
    """
    Return the Purcell factor (3 / 4 pi) (lambda / n)^3 Q / V of the signal mode.

    :param wavelength: vacuum wavelength in meters.
    :param index: refractive index at the emitter.
    :param q_cav: cavity quality factor.
    :param mode_volume: mode volume in m^3.
    """
    return 3 / (4 * np.pi) * (wavelength / index) ** 3 * q_cav / mode_volume


def emitter_coupling(purcell_factor, signal_loss, zpl_fraction, lifetime):
    """Return the emitter-cavity coupling g_e = sqrt(F_p M_sig 2 pi r_ZPL / tau_e) / 2 in rad/s."""
    return 0.5 * math.sqrt(purcell_factor * signal_loss * 2 * np.pi * zpl_fraction / lifetime)


def emitter_loss(zpl_fraction, lifetime):
    """Return the rate 2 pi (1 - r_ZPL) / tau_e at which the emitter decays into lost channels."""
    if not 0 <= zpl_fraction <= 1:
        raise ValueError("zpl_fraction must lie in [0, 1]")
    return 2 * np.pi * (1 - zpl_fraction) / lifetime


@dataclass(frozen=True)
class HamiltonianInputs:
    """
    Every entry of the coupled-amplitude matrix, in rad/s.

    The signal-idler coupling is stored as a magnitude: its phase, and that of the emitter coupling, can be absorbed
    into the phases of the signal and idler amplitudes without changing any yield.
    """
    emitter_coupling: float
    nonlinear_coupling: float
    emitter_loss: float
    signal_loss: float
    idler_rate: float
    signal_detuning: float = 0.0
    idler_detuning: float = 0.0

    def __post_init__(self):
        for name in ('emitter_coupling', 'nonlinear_coupling', 'emitter_loss', 'signal_loss', 'idler_rate'):
            value = getattr(self, name)
            if not value >= 0:
                raise ValueError("HamiltonianInputs.{} must be non-negative, not {!r}".format(name, value))


def build_matrix(inputs):
    """Return the 3x3 complex-symmetric matrix A of dc/dt = -A c."""
    g_e = inputs.emitter_coupling
    g_nl = inputs.nonlinear_coupling
    return np.array([[inputs.emitter_loss / 2, 1j * g_e, 0],
                     [1j * g_e, inputs.signal_loss / 2 + 1j * inputs.signal_detuning, 1j * g_nl],
                     [0, 1j * g_nl, inputs.idler_rate / 2 + 1j * inputs.idler_detuning]], dtype=complex)


@dataclass(frozen=True, eq=False)
class EigenSolution:
    """
    The expansion c(t) = sum_j a_j exp(-lambda_j t) v_j.

    :param eigenvalues: array of three complex eigenvalues in rad/s, sorted by real then imaginary part.
    :param eigenvectors: 3x3 complex array whose columns are the unit eigenvectors.
    :param weights: complex 3-vector a solving V a = c(0).
    :param norm: spectral norm of the matrix.
    """
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    weights: np.ndarray
    norm: float

    @property
    def min_gap(self):
        lam = self.eigenvalues
        return min(abs(lam[0] - lam[1]), abs(lam[0] - lam[2]), abs(lam[1] - lam[2]))

    def amplitudes(self, time):
        """Return c(t) as an array with shape (3,) + shape(time)."""
        time = np.asarray(time, dtype=float)
        decay = np.exp(-np.multiply.outer(time, self.eigenvalues))
        return np.moveaxis(np.tensordot(decay * self.weights, self.eigenvectors, axes=([-1], [1])), -1, 0)


def characteristic_polynomial(matrix):
    """
    Return the coefficients of det(x I - A) = x^3 - tr(A) x^2 + m(A) x - det(A), highest power first, computed from
    the matrix entries, where m(A) is the sum of the principal 2x2 minors.
    """
    a = np.asarray(matrix, dtype=complex)
    trace = a[0, 0] + a[1, 1] + a[2, 2]
    minors = ((a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
              + (a[0, 0] * a[2, 2] - a[0, 2] * a[2, 0])
              + (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1]))
    determinant = (a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
                   - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
                   + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0]))
    return np.array([1, -trace, minors, -determinant], dtype=complex)


def _polish(coefficients, root, steps=3):
    # Newton steps on the cubic, keeping a step only if it reduces |p|.
    derivative = np.polyder(coefficients)
    value = np.polyval(coefficients, root)
    for _ in range(steps):
        slope = np.polyval(derivative, root)
        if slope == 0 or value == 0:
            break
        candidate = root - value / slope
        candidate_value = np.polyval(coefficients, candidate)
        if abs(candidate_value) >= abs(value):
            break
        root, value = candidate, candidate_value
    return root


def null_vector(matrix, eigenvalue):
    """
    Return a unit vector v with (A - lambda I) v = 0 as the largest cross product of two rows of A - lambda I; each
    cross product is orthogonal, without conjugation, to both of its rows and therefore to the whole row space. The
    phase is fixed so that the largest component is real and positive.
    """
    reduced = np.asarray(matrix, dtype=complex) - eigenvalue * np.eye(3)
    candidates = [np.cross(reduced[0], reduced[1]), np.cross(reduced[0], reduced[2]), np.cross(reduced[1], reduced[2])]
    vector = max(candidates, key=np.linalg.norm)
    length = np.linalg.norm(vector)
    if length == 0:
        raise DegenerateSystemError("Eigenvalue {} has a two-dimensional eigenspace; perturb the detunings slightly"
                                    .format(eigenvalue))
    vector = vector / length
    largest = vector[np.argmax(np.abs(vector))]
    return vector * (abs(largest) / largest)


def eigensolve(matrix, initial_state=default_initial_state):
    """
    Diagonalize A through its characteristic cubic and expand the initial state in its eigenvectors.

    The matrix is scaled to unit norm, the cubic is solved with numpy.roots and each root is polished by Newton steps,
    and each eigenvector is extracted as a null vector.

    :param matrix: 3x3 complex array.
    :param initial_state: complex 3-vector c(0).
    :return: EigenSolution
    :raises DegenerateSystemError: if the eigenvector matrix is too ill-conditioned or an eigenpair is inaccurate.
    """
    matrix = np.asarray(matrix, dtype=complex)
    norm = np.linalg.norm(matrix, 2)
    if norm == 0:
        raise DegenerateSystemError("The zero matrix has no decaying modes")
    scaled = matrix / norm
    coefficients = characteristic_polynomial(scaled)
    roots = [_polish(coefficients, root) for root in np.roots(coefficients)]
    roots.sort(key=lambda root: (root.real, root.imag))
    vectors = np.column_stack([null_vector(scaled, root) for root in roots])
    condition = np.linalg.cond(vectors)
    if not condition <= max_condition_number:
        raise DegenerateSystemError("Eigenvector matrix condition number {:.3g} exceeds {:.0e}; perturb the detunings "
                                    "slightly".format(condition, max_condition_number))
    eigenvalues = norm * np.array(roots)
    for j in range(3):
        residual = np.linalg.norm(matrix.dot(vectors[:, j]) - eigenvalues[j] * vectors[:, j])
        if residual > residual_tolerance * norm:
            raise DegenerateSystemError("Eigenpair {} has residual {:.3g} times the matrix norm".format(
                j, residual / norm))
    weights = np.linalg.solve(vectors, np.asarray(initial_state, dtype=complex))
    return EigenSolution(eigenvalues=eigenvalues, eigenvectors=vectors, weights=weights, norm=norm)


@dataclass(frozen=True)
class EfficiencyReport:
    """
    Probabilities that the excitation leaves through each channel.

    :param idler: yield into the radiating idler.
    :param beta: probability that the emitter decays into the signal mode rather than into lost channels.
    :param emitter: yield of the lossy emitter decay, equal to 1 - beta.
    :param signal_loss: yield of signal photons lost before conversion.
    :param fallback: True if the yields came from time-domain integration.
    :param flag: empty, or a short note on how the row was computed.
    """
    idler: float
    beta: float
    emitter: float
    signal_loss: float
    fallback: bool = False
    flag: str = ''

    def __post_init__(self):
        for name in ('idler', 'beta', 'emitter', 'signal_loss'):
            value = getattr(self, name)
            if not -conservation_tolerance <= value <= 1 + conservation_tolerance:
                raise ValueError("EfficiencyReport.{} = {!r} is not a probability".format(name, value))
            object.__setattr__(self, name, min(max(float(value), 0.0), 1.0))
        if self.idler > self.beta + conservation_tolerance:
            raise ValueError("EfficiencyReport.idler = {!r} exceeds beta = {!r}".format(self.idler, self.beta))
        object.__setattr__(self, 'idler', min(self.idler, self.beta))

    @property
    def total(self):
        return self.idler + self.emitter + self.signal_loss


def channel_integrals(solution):
    """
    Return the integrals of |c_j(t)|^2 over all time for the three amplitudes, in seconds.

    :raises DivergentIntegralError: if any pair of eigenvalues fails to decay.
    """
    lam = solution.eigenvalues
    denominator = lam[:, np.newaxis] + np.conj(lam)[np.newaxis, :]
    if np.any(denominator.real <= 0):
        raise DivergentIntegralError("Some mode of the coupled system does not decay")
    integrals = []
    for row in range(3):
        u = solution.weights * solution.eigenvectors[row, :]
        integrals.append(float(np.real(np.sum(np.outer(u, np.conj(u)) / denominator))))
    return np.array(integrals)


def efficiencies(solution, idler_rate, emitter_loss, signal_loss):
    """
    Return the channel yields of an eigenexpansion.

    :param solution: EigenSolution of the matrix built from the same rates.
    :param idler_rate: idler radiation rate Gamma_idl in rad/s.
    :param emitter_loss: emitter loss rate M_e in rad/s.
    :param signal_loss: signal loss rate M_sig in rad/s.
    :return: EfficiencyReport
    :raises NumericalFailure: if the yields violate probability conservation.
    """
    emitter_integral, signal_integral, idler_integral = channel_integrals(solution)
    idler = idler_rate * idler_integral
    emitter = emitter_loss * emitter_integral
    lost_signal = signal_loss * signal_integral
    population = float(np.sum(np.abs(solution.eigenvectors.dot(solution.weights)) ** 2))
    if abs(idler + emitter + lost_signal - population) > conservation_tolerance * population:
        raise NumericalFailure("Closed-form yields sum to {!r} instead of {!r}".format(
            idler + emitter + lost_signal, population))
    return EfficiencyReport(idler=idler, beta=1 - emitter, emitter=emitter, signal_loss=lost_signal)


def integrate_yields(matrix, rates, initial_state=default_initial_state, population_floor=1e-14):
    """
    Integrate dc/dt = -A c together with the three yield accumulators dY_j/dt = D_j |c_j|^2 until the remaining
    population falls below the floor, with a stiff implicit integrator in time scaled by the matrix norm.

    :param matrix: 3x3 complex array A.
    :param rates: the channel rates (M_e, M_sig, Gamma_idl) in rad/s.
    :param initial_state: complex 3-vector c(0).
    :param population_floor: the remaining population, relative to the initial one, at which integration stops.
    :return: array of the yields (emitter, signal_loss, idler).
    :raises NumericalFailure: if the integration does not converge.
    """
    matrix = np.asarray(matrix, dtype=complex)
    norm = np.linalg.norm(matrix, 2)
    scaled = matrix / norm
    drain = np.asarray(rates, dtype=float) / norm
    slowest = np.min(np.linalg.eigvals(scaled).real)
    if not slowest > 0:
        raise NumericalFailure("The coupled system has a mode that does not decay")
    generator = -np.block([[scaled.real, -scaled.imag], [scaled.imag, scaled.real]])
    c0 = np.asarray(initial_state, dtype=complex)
    start = np.concatenate((c0.real, c0.imag, np.zeros(3)))
    initial_population = float(np.sum(np.abs(c0) ** 2))
    if initial_population == 0:
        return np.zeros(3)

    def derivative(t, y):
        amplitudes = y[:6]
        return np.concatenate((generator.dot(amplitudes), drain * (amplitudes[:3] ** 2 + amplitudes[3:] ** 2)))

    def jacobian(t, y):
        result = np.zeros((9, 9))
        result[:6, :6] = generator
        result[6:, :3] = np.diag(2 * drain * y[:3])
        result[6:, 3:6] = np.diag(2 * drain * y[3:6])
        return result

    def depleted(t, y):
        return np.sum(y[:6] ** 2) - population_floor * initial_population

    depleted.terminal = True
    depleted.direction = -1
    horizon = 50 / slowest
    solution = integrate.solve_ivp(derivative, (0, horizon), start, method='Radau', jac=jacobian, rtol=1e-10,
                                   atol=1e-13 * initial_population, events=depleted)
    if not solution.success:
        raise NumericalFailure("Time-domain integration failed: {}".format(solution.message))
    return solution.y[6:, -1]


def solve(inputs, initial_state=default_initial_state):
    """
    Return the channel yields for the given rates, from the eigenexpansion when it is reliable and otherwise from
    time-domain integration, in which case the report is flagged.

    :param inputs: HamiltonianInputs.
    :param initial_state: complex 3-vector c(0); the emitter starts excited by default.
    :return: EfficiencyReport
    :raises NumericalFailure: if the time-domain integration also fails or its yields do not sum to the initial
        population.
    """
    matrix = build_matrix(inputs)
    try:
        solution = eigensolve(matrix, initial_state)
        if solution.min_gap < degeneracy_gap * solution.norm:
            raise DegenerateSystemError("Eigenvalue gap {:.3g} rad/s is too small for the eigenexpansion".format(
                solution.min_gap))
        return efficiencies(solution, idler_rate=inputs.idler_rate, emitter_loss=inputs.emitter_loss,
                            signal_loss=inputs.signal_loss)
    except (DegenerateSystemError, DivergentIntegralError, NumericalFailure) as error:
        logger.warning("Falling back to time-domain integration: %s", error)
    emitter, lost_signal, idler = integrate_yields(
        matrix, (inputs.emitter_loss, inputs.signal_loss, inputs.idler_rate), initial_state)
    population = float(np.sum(np.abs(np.asarray(initial_state, dtype=complex)) ** 2))
    if abs(emitter + lost_signal + idler - population) > conservation_tolerance * population:
        raise NumericalFailure("Integrated yields sum to {!r} instead of {!r}".format(
            emitter + lost_signal + idler, population))
    return EfficiencyReport(idler=idler, beta=1 - emitter, emitter=emitter, signal_loss=lost_signal, fallback=True,
                            flag='time-domain fallback')


def adiabatic_idler_efficiency(inputs):
    """
    Return (eta_idler, beta) on resonance when the idler radiates much faster than every other rate, so that it can
    be eliminated: the signal then decays at M_sig + 4 g_nl^2 / Gamma_idl and the emitter-signal pair has a closed
    form.
    """
    g_e, g_nl = inputs.emitter_coupling, inputs.nonlinear_coupling
    conversion = 4 * g_nl ** 2 / inputs.idler_rate
    signal_decay = inputs.signal_loss + conversion
    if g_e == 0 or signal_decay == 0:
        return 0.0, 0.0
    m_e = inputs.emitter_loss
    beta = 4 * g_e ** 2 * signal_decay / ((m_e + signal_decay) * (4 * g_e ** 2 + m_e * signal_decay))
    return beta * conversion / signal_decay, beta


def idler_linewidth(wavelength, q):
    """Return the idler linewidth lambda / Q in meters."""
    return wavelength / q


def q_from_energy(omega, energy, power):
    """
    Return the quality factor omega U / P_d of a mode that stores energy U while dissipating power P_d.

    :raises UndefinedQError: if the dissipated power is zero.
    """
    if power == 0:
        raise UndefinedQError("The quality factor is undefined when no power is dissipated")
    return omega * energy / power


@dataclass(frozen=True)
class DeviceContext:
    """
    Everything about the device that stays fixed while the shared quality factor, the emitter, and the pump budget
    are varied.

    :param quartet: the phase-matched FwmQuartet.
    :param indices: bulk refractive indices of the (sig, A, B, idl) modes.
    :param medium: NonlinearMedium.
    :param emitter: EmitterParams; its zero-phonon fraction is replaced in sweeps.
    :param alpha_a: bus-coupling ratio of pump A.
    :param alpha_b: bus-coupling ratio of pump B.
    :param alpha_sig: bus-coupling ratio of the signal.
    :param q_idler: quality factor of the idler, which is fixed by its free-space radiation.
    :param signal_detuning: signal detuning in rad/s.
    :param idler_detuning: idler detuning in rad/s.
    :param pump_ratio: P_A / P_B when a budget is split.
    """
    quartet: dispersion.FwmQuartet
    indices: tuple
    medium: NonlinearMedium = field(default_factory=NonlinearMedium)
    emitter: EmitterParams = field(default_factory=EmitterParams)
    alpha_a: float = 1.0
    alpha_b: float = 1.0
    alpha_sig: float = 0.0
    q_idler: float = 7.8
    signal_detuning: float = 0.0
    idler_detuning: float = 0.0
    pump_ratio: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, 'indices', tuple(float(n) for n in self.indices))
        if len(self.indices) != 4 or any(n <= 0 for n in self.indices):
            raise ValueError("DeviceContext.indices needs four positive indices")
        if not self.q_idler > 0:
            raise ValueError("DeviceContext.q_idler must be positive")
        if not self.pump_ratio > 0:
            raise ValueError("DeviceContext.pump_ratio must be positive")
        for name in ('alpha_a', 'alpha_b', 'alpha_sig'):
            if not getattr(self, name) >= 0:
                raise ValueError("DeviceContext.{} must be non-negative".format(name))

    @classmethod
    def reference_device(cls, material=None, **kwds):
        """
        The 6 um diamond ring with signal m = 143 at 615 nm and pumps m = 28 at 2095 nm and m = 115 at 750 nm, using
        bulk indices for every mode.
        """
        if material is None:
            material = dispersion.MaterialIndex.diamond()
        quartet = dispersion.make_quartet((143, 0.615e-6), (28, 2.095e-6), (115, 0.750e-6))
        indices = tuple(dispersion.bulk_index(material, mode.wavelength) for mode in quartet.modes)
        return cls(quartet=quartet, indices=indices, **kwds)

    @property
    def frequencies(self):
        return tuple(mode.omega for mode in self.quartet.modes)

    @property
    def strength(self):
        return nonlinear_strength(self.frequencies, self.indices, self.medium)


@dataclass(frozen=True)
class Evaluation:
    """One evaluated operating point: the matrix entries, the complex g_nl before the gauge choice, and the yields."""
    inputs: HamiltonianInputs
    complex_coupling: complex
    purcell_factor: float
    report: EfficiencyReport


def hamiltonian_inputs(context, q_bar, zpl_fraction, drive):
    """
    Return the matrix entries and the complex nonlinear coupling for one operating point.

    :param context: DeviceContext.
    :param q_bar: quality factor shared by the signal and both pumps.
    :param zpl_fraction: r_ZPL of the emitter.
    :param drive: PumpDrive.
    :return: (HamiltonianInputs, complex g_nl, Purcell factor)
    """
    sig, a, b, idl = context.quartet.modes
    signal = rates_for('sig', sig.omega, q_bar, context.alpha_sig)
    idler = rates_for('idl', idl.omega, context.q_idler, 1.0)
    amplitude_a = pump_amplitude(a.omega, drive.power_a, q_bar, drive.alpha_a, drive.phase_a)
    amplitude_b = pump_amplitude(b.omega, drive.power_b, q_bar, drive.alpha_b, drive.phase_b)
    coupling = nonlinear_coupling(context.strength, amplitude_a, amplitude_b)
    purcell_factor = purcell(sig.wavelength, context.indices[0], q_bar, context.medium.mode_volume)
    lifetime = context.emitter.lifetime
    inputs = HamiltonianInputs(emitter_coupling=emitter_coupling(purcell_factor, signal.loss, zpl_fraction, lifetime),
                               nonlinear_coupling=abs(coupling),
                               emitter_loss=emitter_loss(zpl_fraction, lifetime),
                               signal_loss=signal.loss,
                               idler_rate=idler.coupling,
                               signal_detuning=context.signal_detuning,
                               idler_detuning=context.idler_detuning)
    return inputs, coupling, purcell_factor


def evaluate(context, q_bar, zpl_fraction, drive):
    """Return the Evaluation of one operating point of the device."""
    inputs, coupling, purcell_factor = hamiltonian_inputs(context, q_bar, zpl_fraction, drive)
    return Evaluation(inputs=inputs, complex_coupling=complex(coupling), purcell_factor=purcell_factor,
                      report=solve(inputs))
