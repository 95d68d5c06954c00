"""
One-dimensional searches for the maxima of smooth unimodal objectives.
"""
from __future__ import absolute_import, division, print_function

import math

import numpy as np

inverse_golden_ratio = 2 / (1 + math.sqrt(5))


def golden_section_maximum(function, low, high, tolerance=1e-4, max_iterations=200):
    """
    Locate the maximum of a unimodal function on [low, high] by golden-section search, reusing one interior value per
    iteration.

    :param function: callable of one float.
    :param low: lower end of the bracket.
    :param high: upper end of the bracket.
    :param tolerance: absolute width of the final bracket.
    :param max_iterations: iteration cap.
    :return: (x, function(x)) for the better of the two final interior points.
    """
    x1 = high - inverse_golden_ratio * (high - low)
    x2 = low + inverse_golden_ratio * (high - low)
    f1 = function(x1)
    f2 = function(x2)
    for _ in range(max_iterations):
        if abs(high - low) <= tolerance:
            break
        if f1 > f2:
            high, x2, f2 = x2, x1, f1
            x1 = high - inverse_golden_ratio * (high - low)
            f1 = function(x1)
        else:
            low, x1, f1 = x1, x2, f2
            x2 = low + inverse_golden_ratio * (high - low)
            f2 = function(x2)
    if f1 > f2:
        return x1, f1
    return x2, f2


def local_maxima(values):
    """
    Return the indices of the local maxima of a sampled curve, including an end point that exceeds its neighbor.
    NaN samples are never maxima.
    """
    values = np.where(np.isnan(values), -np.inf, np.asarray(values, dtype=float))
    if values.size == 1:
        return [0]
    peaks = []
    for index in range(values.size):
        left = values[index - 1] if index > 0 else -np.inf
        right = values[index + 1] if index < values.size - 1 else -np.inf
        if np.isfinite(values[index]) and values[index] >= left and values[index] > right:
            peaks.append(index)
    return peaks


def coordinate_ascent(function, start, steps, tolerance=1e-4, max_sweeps=30):
    """
    Maximize a smooth function of several variables one coordinate at a time. Each coordinate is bracketed by
    stepping uphill from the current point, doubling the step, and then refined by golden-section search.

    :param function: callable of a 1D array.
    :param start: initial point.
    :param steps: initial bracketing step for each coordinate.
    :param tolerance: stop when no coordinate moves by more than this fraction of its step.
    :param max_sweeps: cap on the number of passes over the coordinates.
    :return: (point, value)
    """
    point = np.array(start, dtype=float)
    value = function(point)
    for _ in range(max_sweeps):
        largest_move = 0.0
        for index, step in enumerate(steps):
            def along(x):
                trial = point.copy()
                trial[index] = x
                return function(trial)

            low, high = _bracket(along, point[index], value, step)
            x, candidate = golden_section_maximum(along, low, high, tolerance=tolerance * step)
            if candidate > value:
                largest_move = max(largest_move, abs(x - point[index]) / step)
                point[index] = x
                value = candidate
        if largest_move <= tolerance:
            break
    return point, value


def _bracket(function, x, value, step, max_expansions=40):
    # Walk uphill with a doubling step until the function drops, and return an interval containing the maximum.
    if function(x + step) < value:
        if function(x - step) < value:
            return x - step, x + step
        step = -step
    previous, current = x, x + step
    current_value = function(current)
    for _ in range(max_expansions):
        step *= 2
        following = current + step
        following_value = function(following)
        if following_value < current_value:
            return min(previous, following), max(previous, following)
        previous, current, current_value = current, following, following_value
    return min(previous, current), max(previous, current)
