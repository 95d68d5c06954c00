"""
Pump-budget sweeps and saturation-point searches over the shared cavity quality factor and the emitter zero-phonon
fraction.
"""
from __future__ import absolute_import, division, print_function

import collections
import logging
import math
from concurrent import futures
from dataclasses import dataclass, field

import numpy as np

from . import search
from .base import NumericalFailure
from .cavityqed import DeviceContext, PumpDrive, evaluate

logger = logging.getLogger(__name__)

# Column names of a sweep table.
ROW_HEADER = ('Q_cav', 'r_ZPL', 'P_budget_W', 'g_nl', 'eta_idler', 'beta', 'eta_emitter', 'eta_signal_loss', 'flag')

SATURATION_HEADER = ('Q_cav', 'r_ZPL', 'P_star_W', 'eta_star', 'beta_star', 'loss_ratio', 'at_boundary')

# End-to-end spatial efficiency used when the loss at a saturation point is split between the emitter and the rest.
loss_ratio_spatial_efficiency = 0.66

SweepRow = collections.namedtuple('SweepRow', ['q_bar', 'zpl_fraction', 'budget', 'coupling', 'idler', 'beta',
                                               'emitter', 'signal_loss', 'flag'])


def split_budget(budget, ratio=1.0):
    """
    Split a pump budget 2 sqrt(P_A P_B) into the two pump powers with P_A / P_B = ratio.

    :param budget: pump budget in watts.
    :param ratio: the power ratio P_A / P_B; the default gives the symmetric split.
    :return: (P_A, P_B) in watts.
    """
    if budget < 0:
        raise ValueError("The pump budget must be non-negative")
    root = math.sqrt(ratio)
    return budget * root / 2, budget / (2 * root)


def drive_for(context, budget):
    power_a, power_b = split_budget(budget, context.pump_ratio)
    return PumpDrive(power_a=power_a, power_b=power_b, alpha_a=context.alpha_a, alpha_b=context.alpha_b)


def evaluate_point(context, q_bar, zpl_fraction, budget):
    """
    Evaluate one grid point; a numerical failure becomes a flagged row of NaNs instead of an exception.

    :return: SweepRow
    """
    try:
        result = evaluate(context, q_bar, zpl_fraction, drive_for(context, budget))
    except NumericalFailure as error:
        logger.error("Q = %g, r_ZPL = %g, P = %g W failed: %s", q_bar, zpl_fraction, budget, error)
        nan = float('nan')
        return SweepRow(q_bar, zpl_fraction, budget, nan, nan, nan, nan, nan, 'numerical failure')
    report = result.report
    return SweepRow(q_bar, zpl_fraction, budget, result.inputs.nonlinear_coupling, report.idler, report.beta,
                    report.emitter, report.signal_loss, report.flag)


def _strictly_increasing(name, values):
    values = tuple(float(v) for v in values)
    if not values:
        raise ValueError("SweepSpec.{} must not be empty".format(name))
    if any(b <= a for a, b in zip(values[:-1], values[1:])):
        raise ValueError("SweepSpec.{} must be strictly increasing".format(name))
    return values


@dataclass(frozen=True)
class SweepSpec:
    """
    A rectangular grid over shared quality factor, zero-phonon fraction, and pump budget in watts.
    """
    q_values: tuple
    zpl_fractions: tuple
    budgets: tuple
    p_max: float = 1e4
    context: DeviceContext = field(default_factory=DeviceContext.reference_device)

    def __post_init__(self):
        for name in ('q_values', 'zpl_fractions', 'budgets'):
            object.__setattr__(self, name, _strictly_increasing(name, getattr(self, name)))
        if any(q <= 0 for q in self.q_values):
            raise ValueError("SweepSpec.q_values must be positive")
        if any(not 0 <= r <= 1 for r in self.zpl_fractions):
            raise ValueError("SweepSpec.zpl_fractions must lie in [0, 1]")
        if self.budgets[0] < 0 or self.budgets[-1] > self.p_max:
            raise ValueError("SweepSpec.budgets must lie in [0, p_max]")

    @staticmethod
    def logarithmic_budgets(minimum, maximum, number):
        return tuple(np.logspace(np.log10(minimum), np.log10(maximum), number))

    @property
    def points(self):
        """Grid points in lexicographic order of (Q, r_ZPL, budget)."""
        return [(q, r, p) for q in self.q_values for r in self.zpl_fractions for p in self.budgets]


def sweep(spec, threads=1):
    """
    Evaluate every grid point of the spec.

    Points are independent and may run on a thread pool; rows are always returned in grid order.

    :param spec: SweepSpec.
    :param threads: number of worker threads; 1 evaluates serially.
    :return: list of SweepRow.
    """
    points = spec.points
    logger.info("Sweeping %d points on %d thread(s)", len(points), threads)

    def work(point):
        return evaluate_point(spec.context, *point)

    if threads <= 1:
        return [work(point) for point in points]
    with futures.ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(work, points))


@dataclass(frozen=True)
class SaturationResult:
    """
    The pump budget that maximizes the idler efficiency at one (Q, r_ZPL).

    :param at_boundary: True if the maximum lies at an end of the searched budget range.
    """
    q_bar: float
    zpl_fraction: float
    p_star: float
    eta_star: float
    beta_star: float
    p_max: float
    at_boundary: bool = False

    def __post_init__(self):
        if self.eta_star > self.beta_star:
            raise ValueError("SaturationResult.eta_star exceeds beta_star")
        if self.p_star > self.p_max * (1 + 1e-12):
            raise ValueError("SaturationResult.p_star exceeds p_max")


def find_saturation(q_bar, zpl_fraction, context, p_max=1e4, p_min=1e-3, points=40, tolerance=1e-3):
    """
    Find the pump budget that maximizes the idler efficiency.

    The budget is scanned on a logarithmic grid, and every interior local maximum of the grid is refined by
    golden-section search in log budget; the best refined point wins. A maximum at either end of the grid is reported
    with the boundary flag.

    :param q_bar: shared quality factor of the signal and pumps.
    :param zpl_fraction: r_ZPL of the emitter.
    :param context: DeviceContext.
    :param p_max: largest budget considered, in watts.
    :param p_min: smallest budget considered, in watts.
    :param points: number of grid points.
    :param tolerance: relative precision of the refined budget.
    :return: SaturationResult
    """
    cache = {}

    def row_at(log_budget):
        if log_budget not in cache:
            cache[log_budget] = evaluate_point(context, q_bar, zpl_fraction, math.exp(log_budget))
        return cache[log_budget]

    def idler_at(log_budget):
        value = row_at(log_budget).idler
        return -np.inf if np.isnan(value) else value

    grid = np.linspace(math.log(p_min), math.log(p_max), points)
    values = np.array([idler_at(x) for x in grid])
    peaks = search.local_maxima(values)
    if len(peaks) > 1:
        logger.info("Grid at Q = %g, r_ZPL = %g has %d local maxima; refining each", q_bar, zpl_fraction, len(peaks))
    best = int(np.argmax(values))
    best_log, best_value = grid[best], values[best]
    for peak in peaks:
        if 0 < peak < points - 1:
            x, value = search.golden_section_maximum(idler_at, grid[peak - 1], grid[peak + 1], tolerance=tolerance)
            if value > best_value:
                best_log, best_value = x, value
    at_boundary = best_log in (grid[0], grid[-1])
    if at_boundary:
        logger.warning("Efficiency at Q = %g, r_ZPL = %g peaks at the end of the budget range, %g W", q_bar,
                       zpl_fraction, math.exp(best_log))
    else:
        neighbors = (idler_at(best_log + math.log(1.01)), idler_at(best_log - math.log(1.01)))
        if max(neighbors) > best_value:
            logger.warning("Refined budget at Q = %g, r_ZPL = %g is not a local maximum", q_bar, zpl_fraction)
    row = row_at(best_log)
    return SaturationResult(q_bar=q_bar, zpl_fraction=zpl_fraction, p_star=math.exp(best_log), eta_star=row.idler,
                            beta_star=row.beta, p_max=p_max, at_boundary=at_boundary)


def saturation_grid(q_values, zpl_fractions, context, p_max=1e4, threads=1, **kwds):
    """Return one SaturationResult per (Q, r_ZPL), in lexicographic order, optionally on a thread pool."""
    pairs = [(q, r) for q in q_values for r in zpl_fractions]

    def work(pair):
        return find_saturation(pair[0], pair[1], context, p_max=p_max, **kwds)

    if threads <= 1:
        return [work(pair) for pair in pairs]
    with futures.ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(work, pairs))


def loss_ratio(beta, eta):
    """
    Return the share (1 - beta) / (1 - eta) of the total loss that is due to the emitter.

    :raises ValueError: if eta >= 1.
    """
    if eta >= 1:
        raise ValueError("The loss ratio is undefined for a total efficiency of 1 or more")
    return (1 - beta) / (1 - eta)


def saturation_loss_ratio(result, spatial_efficiency=loss_ratio_spatial_efficiency):
    """
    Return the loss ratio at a saturation point, taking the total efficiency as spatial_efficiency * eta_star.

    :param result: SaturationResult.
    :param spatial_efficiency: eta_spatial of the collection optics.
    :return: float, or None if the total efficiency is 1.
    """
    total = total_efficiency(result.eta_star, spatial_efficiency)
    if total >= 1:
        return None
    return loss_ratio(result.beta_star, total)


def total_efficiency(idler_efficiency, spatial_efficiency):
    """Return the end-to-end efficiency eta_spatial * eta_idler."""
    for name, value in (('idler_efficiency', idler_efficiency), ('spatial_efficiency', spatial_efficiency)):
        if not 0 <= value <= 1:
            raise ValueError("{} must lie in [0, 1]".format(name))
    return spatial_efficiency * idler_efficiency
