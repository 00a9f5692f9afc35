# encoding: utf-8
# This file is part of pivotsched.
#
# Copyright 2026 The pivotsched developers.
#
# pivotsched is free software: you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License version 3,
# as published by the Free Software Foundation.
#
# pivotsched is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Lesser General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public License
# along with pivotsched.  If not, see <http://www.gnu.org/licenses/>.

"""
Crop water use.

This module contains the Feddes root-water-uptake model, the partitioning of
potential evapotranspiration into evaporation and transpiration, and the
seasonal yield deficiency model.

Rates are in SI units: evapotranspiration rates in m/s, root water uptake in
m3/m3/s. Root water uptake is a withdrawal and is returned with a negative
sign, ready to be added to the right-hand side of the soil water balance.
"""

import collections
import logging

import numpy as np

from pivotsched import storage
from pivotsched.errors import ParameterError
from pivotsched.errors import RangeError
from pivotsched.errors import ShapeError
from pivotsched.errors import ValidationError

__all__ = (
    'CropCalendar',
    'CropModel',
    'EtBreakdown',
    'FeddesParams',
    'et_chain',
    'load_crop_calendar',
    'root_layer_weights',
    'rootzone_stress',
    'sink',
    'stress_factor',
    'yield_deficiency',
)


_logger = logging.getLogger("pivotsched.crop")

#: Extinction coefficient of the evaporation term.
EXTINCTION = 0.623

SECONDS_PER_DAY = 86400.0


class FeddesParams(collections.namedtuple('FeddesParams', 'h1 h2 h3 h4')):

    """
    Breakpoints of the Feddes water stress function [m].

    Uptake is zero above ``h1`` (anaerobiosis) and below ``h4`` (wilting
    point) and it is unrestricted between ``h2`` and ``h3``. The defaults
    describe grass.
    """

    __slots__ = ()

    def __new__(cls, h1=-0.1, h2=-0.25, h3=-3.1, h4=-80.0):
        """Create and validate the breakpoints."""
        self = super(FeddesParams, cls).__new__(
            cls, float(h1), float(h2), float(h3), float(h4))
        if not 0 >= self.h1 > self.h2 > self.h3 > self.h4:
            raise ParameterError(
                "expected 0 >= h1 > h2 > h3 > h4, got {!r}".format(
                    tuple(self)))
        return self


EtBreakdown = collections.namedtuple('EtBreakdown', 'ETp EV Tp ETa')
EtBreakdown.__doc__ = """
Partition of the potential evapotranspiration [m/s].

:attr ETp: potential evapotranspiration
:attr EV: potential evaporation
:attr Tp: potential transpiration, ``ETp - EV``
:attr ETa: actual evapotranspiration
"""


class CropCalendar(object):

    """
    Daily crop parameters over a growing season.

    Values are piecewise constant within a day. Days are counted from the
    start of the season, the first row of the calendar being day zero.

    :attr Kc: crop coefficient [-]
    :attr Ky: crop sensitivity (yield response) factor [-]
    :attr LAI: leaf area index [-]
    :attr L: rooting depth [m]
    """

    def __init__(self, Kc, Ky, LAI, L):
        """Initialize and validate the calendar."""
        self.Kc = np.asarray(Kc, dtype=float).ravel()
        self.Ky = np.asarray(Ky, dtype=float).ravel()
        self.LAI = np.asarray(LAI, dtype=float).ravel()
        self.L = np.asarray(L, dtype=float).ravel()
        lengths = {len(self.Kc), len(self.Ky), len(self.LAI), len(self.L)}
        if len(lengths) != 1:
            raise ParameterError("calendar series differ in length")
        if not len(self.Kc):
            raise ParameterError("calendar is empty")
        if np.any(self.Kc <= 0):
            raise ParameterError("Kc must be positive")
        if np.any(self.L <= 0):
            raise ParameterError("rooting depth L must be positive")
        if np.any(self.Ky < 0):
            raise ParameterError("Ky must be nonnegative")
        if np.any(self.LAI < 0):
            raise ParameterError("LAI must be nonnegative")

    @classmethod
    def constant(cls, days, Kc=1.0, Ky=1.0, LAI=3.0, L=0.3):
        """Create a calendar with the same values every day."""
        return cls([Kc] * days, [Ky] * days, [LAI] * days, [L] * days)

    @property
    def season_length(self):
        """Number of days in the season."""
        return len(self.Kc)

    def __repr__(self):
        return "<CropCalendar days={}>".format(self.season_length)

    def index(self, day, clamp=False):
        """
        Get the row index of a (possibly fractional) season day.

        :param clamp:
            If True, days past the season map to the last row and negative
            days to the first one. Otherwise they raise :class:`RangeError`.
        """
        index = np.floor(np.asarray(day, dtype=float)).astype(int)
        if clamp:
            return np.clip(index, 0, self.season_length - 1)
        if np.any(index < 0) or np.any(index >= self.season_length):
            raise RangeError("day {!r} outside of the {}-day season".format(
                day, self.season_length))
        return index


def stress_factor(h, f):
    """
    Compute the Feddes water stress factor ``alpha(h)``.

    :param h:
        Pressure head [m], scalar or array
    :param f:
        :class:`FeddesParams`
    :returns:
        Stress factor in [0, 1]
    """
    h = np.asarray(h, dtype=float)
    wet = (f.h1 - h) / (f.h1 - f.h2)
    dry = (h - f.h4) / (f.h3 - f.h4)
    alpha = np.clip(np.minimum(wet, dry), 0.0, 1.0)
    return alpha[()] if alpha.ndim == 0 else alpha


def rootzone_stress(h, f):
    """Get the root-zone aggregate stress, the mean of ``alpha`` over ``h``."""
    return float(np.mean(stress_factor(h, f)))


def et_chain(PET, day, cal, alpha=1.0, clamp=False):
    """
    Partition the reference evapotranspiration of a day.

    :param PET:
        Reference evapotranspiration [m/s], nonnegative
    :param day:
        Season day
    :param cal:
        :class:`CropCalendar`
    :param alpha:
        Stress factor used for the actual evapotranspiration
    :returns:
        :class:`EtBreakdown`
    :raises RangeError:
        If ``day`` is outside of the season (unless ``clamp`` is set).
    """
    if np.any(np.asarray(PET) < 0):
        raise ParameterError("PET must be nonnegative")
    index = cal.index(day, clamp)
    etp = cal.Kc[index] * PET
    ev = etp * np.exp(-EXTINCTION * cal.LAI[index])
    return EtBreakdown(etp, ev, etp - ev, alpha * etp)


def root_layer_weights(L, dz, nz, weights=None):
    """
    Get the share of transpiration taken from each soil layer.

    :param L:
        Rooting depth [m]
    :param dz:
        Layer thickness [m]
    :param nz:
        Number of layers, layer zero being at the surface
    :param weights:
        Optional per-layer weights. Weights of layers below the rooting depth
        are dropped and the rest is normalized to one. By default uptake is
        uniform over the rooting depth.
    :returns:
        Array of ``nz`` weights summing to one
    """
    tops = np.arange(nz) * dz
    overlap = np.clip(np.minimum(L, tops + dz) - tops, 0.0, None)
    if weights is None:
        share = overlap / min(L, nz * dz)
    else:
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (nz,) or np.any(weights < 0):
            raise ParameterError(
                "root weights must be {} nonnegative values".format(nz))
        share = np.where(overlap > 0, weights, 0.0)
        total = share.sum()
        if total <= 0:
            raise ParameterError("root weights vanish over the root zone")
        share = share / total
    return share


def sink(h_node, node, day, cal, f, grid, PET, weights=None, clamp=False):
    """
    Compute the root water uptake of a single node [m3/m3/s].

    ``S = -alpha(h) * Smax`` where ``Smax = Tp * w_k / dz`` for the layer
    ``k`` of the node and ``w_k`` its share of the root zone. With uniform
    weights this is ``Tp / L`` in every root-zone layer. Nodes below the
    rooting depth have no uptake.

    :param grid:
        Grid with ``dz``, ``nz`` and ``index_of()``
    """
    _, _, k = grid.index_of(node)
    index = cal.index(day, clamp)
    share = root_layer_weights(cal.L[index], grid.dz, grid.nz, weights)[k]
    tp = et_chain(PET, day, cal, clamp=clamp).Tp
    return -float(stress_factor(h_node, f)) * tp * share / grid.dz


def yield_deficiency(alpha_series, Ky_series, step_days=None):
    """
    Compute the seasonal yield deficiency ``1 - Ya / Yp``.

    :param alpha_series:
        Root-zone stress factor of each step
    :param Ky_series:
        Crop sensitivity factor of each step
    :param step_days:
        Optional duration of each step in days. When given every term is
        weighted by it, so that the sum does not depend on sampling.
    :returns:
        ``sum(Ky * (1 - alpha) [* step_days])``
    :raises ShapeError:
        If the series differ in length.
    """
    alpha = np.asarray(alpha_series, dtype=float).ravel()
    ky = np.asarray(Ky_series, dtype=float).ravel()
    if alpha.shape != ky.shape:
        raise ShapeError("stress series has {} steps, Ky series {}".format(
            alpha.size, ky.size))
    terms = ky * (1.0 - alpha)
    if step_days is not None:
        step_days = np.asarray(step_days, dtype=float).ravel()
        if step_days.shape != alpha.shape:
            raise ShapeError("step durations do not match the series")
        terms = terms * step_days
    return float(np.sum(terms))


class CropModel(object):

    """
    Crop context of a field simulation.

    The model binds a calendar, stress breakpoints and root distribution and
    computes the uptake of every node of a grid. Simulation time zero maps
    to season day ``start_day``. Past the end of the season the last day of
    the calendar is held.
    """

    def __init__(self, calendar, feddes=None, weights=None, start_day=0.0):
        self.calendar = calendar
        self.feddes = feddes if feddes is not None else FeddesParams()
        self.weights = weights
        self.start_day = float(start_day)

    def __repr__(self):
        return "<CropModel {!r} {!r}>".format(self.calendar, self.feddes)

    def day_of(self, t):
        """Get the season day of simulation time ``t`` [s]."""
        return self.start_day + t / SECONDS_PER_DAY

    def next_change(self, t):
        """Get the time [s] at which the calendar moves to the next day."""
        day = np.floor(self.day_of(t) + 1e-9) + 1.0
        return (day - self.start_day) * SECONDS_PER_DAY

    def ky_at(self, t):
        """Get the crop sensitivity factor at simulation time(s) ``t``."""
        index = self.calendar.index(self.day_of(np.asarray(t)), clamp=True)
        return self.calendar.Ky[index]

    def uptake(self, h, t, PET, dz):
        """
        Compute the uptake of every node.

        :param h:
            Pressure heads, array whose last axis is the layer axis
        :param t:
            Simulation time [s]
        :param PET:
            Reference evapotranspiration [m/s]
        :param dz:
            Layer thickness [m]
        :returns:
            Array like ``h`` of (nonpositive) uptake rates [1/s]
        """
        day = self.day_of(t)
        index = self.calendar.index(day, clamp=True)
        tp = et_chain(PET, day, self.calendar, clamp=True).Tp
        if tp == 0:
            return np.zeros_like(h)
        share = root_layer_weights(
            self.calendar.L[index], dz, h.shape[-1], self.weights)
        return -stress_factor(h, self.feddes) * (tp * share / dz)


def load_crop_calendar(path):
    """
    Load a crop calendar from a CSV file.

    The file has the columns ``day, Kc, Ky, LAI, L`` with one row per day
    and consecutive days.

    :raises ParseError, SchemaError, ValidationError:
        If the file is malformed.
    """
    columns = ('day', 'Kc', 'Ky', 'LAI', 'L')
    frame = storage.read_table(path, required=columns)
    if frame.empty:
        raise ValidationError("crop calendar has no rows", path)
    days = storage.numeric_column(frame, 'day', path)
    steps = np.diff(days)
    if np.any(steps != 1):
        bad = int(np.flatnonzero(steps != 1)[0]) + 1
        raise ValidationError("days must be consecutive", path,
                              storage.line_of(frame, bad))
    series = [storage.numeric_column(frame, name, path, nonnegative=True)
              for name in columns[1:]]
    try:
        calendar = CropCalendar(*series)
    except ParameterError as exc:
        raise ValidationError(str(exc), path)
    _logger.debug("Loaded %d-day crop calendar from %s",
                  calendar.season_length, path)
    return calendar
