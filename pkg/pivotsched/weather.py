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
Daily weather series.

Weather files hold one row per day with the rain and the reference
evapotranspiration in mm/day: ``day, rain_mm, pet_mm`` plus the optional
long-term prediction ``rain_lt_mm, pet_lt_mm``. When the long-term columns
are absent the long-term prediction is the season mean of the accurate one.

Models read weather through ``sample(t)`` and ``next_change(t)`` where ``t``
is the time in seconds since the start of the season. Forcing is constant
within a day and past the end of the season the last day is held.
"""

import logging
import math

import numpy as np
import pandas as pd

from pivotsched import storage
from pivotsched.errors import RangeError
from pivotsched.errors import ValidationError
from pivotsched.field import WeatherSample

__all__ = (
    'MM_PER_DAY',
    'ForecastView',
    'WeatherSeries',
    'forecast_view',
    'load_weather',
    'save_weather',
)


_logger = logging.getLogger("pivotsched.weather")

#: One mm/day in m/s
MM_PER_DAY = 1e-3 / 86400.0

SECONDS_PER_DAY = 86400.0

_COLUMNS = ('day', 'rain_mm', 'pet_mm')
_LONG_TERM_COLUMNS = ('rain_lt_mm', 'pet_lt_mm')


def _frozen(values):
    values = np.array(values, dtype=float)
    values.setflags(write=False)
    return values


class _DailyForcing(object):

    """Forcing held constant over each day of a season."""

    def __init__(self, rain, PET):
        self.rain = _frozen(rain)
        self.PET = _frozen(PET)

    @property
    def season_length(self):
        """Number of days of the season."""
        return self.rain.size

    def day_of(self, t):
        """Get the day index of time ``t``, clamped to the season."""
        day = int(math.floor(t / SECONDS_PER_DAY + 1e-9))
        return min(max(day, 0), self.season_length - 1)

    def sample(self, t):
        """Get the :class:`~pivotsched.field.WeatherSample` at time ``t``."""
        day = self.day_of(t)
        return WeatherSample(self.rain[day], self.PET[day])

    def next_change(self, t):
        """Get the next day boundary, or infinity past the season."""
        day = math.floor(t / SECONDS_PER_DAY + 1e-9) + 1
        if day >= self.season_length:
            return math.inf
        return max(day, 1) * SECONDS_PER_DAY


class WeatherSeries(_DailyForcing):

    """
    Accurate and long-term weather over a season.

    Values are kept in mm/day as read. The m/s values used by the models are
    exposed as :attr:`rain` and :attr:`PET` (accurate) and :attr:`rain_lt`
    and :attr:`PET_lt` (long-term).

    :attr first_day:
        Label of the first day as found in the file
    :attr has_long_term:
        Flag indicating that the long-term series was given explicitly
    """

    def __init__(self, rain_mm, pet_mm, rain_lt_mm=None, pet_lt_mm=None,
                 first_day=0):
        self.rain_mm = _frozen(rain_mm)
        self.pet_mm = _frozen(pet_mm)
        if self.rain_mm.shape != self.pet_mm.shape or not self.rain_mm.size:
            raise ValidationError("rain and PET series must be nonempty and"
                                  " of the same length")
        self.has_long_term = rain_lt_mm is not None or pet_lt_mm is not None
        if rain_lt_mm is None:
            rain_lt_mm = np.full(self.rain_mm.size, self.rain_mm.mean())
        if pet_lt_mm is None:
            pet_lt_mm = np.full(self.pet_mm.size, self.pet_mm.mean())
        self.rain_lt_mm = _frozen(rain_lt_mm)
        self.pet_lt_mm = _frozen(pet_lt_mm)
        if (self.rain_lt_mm.shape != self.rain_mm.shape
                or self.pet_lt_mm.shape != self.rain_mm.shape):
            raise ValidationError("long-term series differ in length")
        for name in ('rain_mm', 'pet_mm', 'rain_lt_mm', 'pet_lt_mm'):
            if np.any(getattr(self, name) < 0):
                raise ValidationError("{} must be nonnegative".format(name))
        self.first_day = int(first_day)
        super(WeatherSeries, self).__init__(
            self.rain_mm * MM_PER_DAY, self.pet_mm * MM_PER_DAY)
        self.rain_lt = _frozen(self.rain_lt_mm * MM_PER_DAY)
        self.PET_lt = _frozen(self.pet_lt_mm * MM_PER_DAY)

    @classmethod
    def constant(cls, days, rain_mm=0.0, pet_mm=0.0):
        """Create a series with the same weather every day."""
        return cls([rain_mm] * days, [pet_mm] * days)

    def __repr__(self):
        return "<WeatherSeries days={} long_term={}>".format(
            self.season_length, self.has_long_term)

    def checksum(self):
        """Get a digest of the numeric content of the series."""
        payload = b''.join(values.tobytes() for values in (
            self.rain_mm, self.pet_mm, self.rain_lt_mm, self.pet_lt_mm))
        return storage.config_digest(payload)


class ForecastView(_DailyForcing):

    """
    Weather seen by the scheduler at one point of the season.

    Days from :attr:`t_now` to ``t_now + Ts`` come from the accurate series,
    later days from the long-term one. Days before :attr:`t_now` are the
    measured (accurate) values. The arrays of the view are read-only.
    """

    def __init__(self, series, t_now, Ts):
        start = int(math.floor(t_now))
        splice = min(start + int(math.ceil(Ts)), series.season_length)
        rain = np.array(series.rain_lt)
        PET = np.array(series.PET_lt)
        rain[:splice] = series.rain[:splice]
        PET[:splice] = series.PET[:splice]
        super(ForecastView, self).__init__(rain, PET)
        self.t_now = t_now
        self.Ts = Ts
        self.splice = splice

    def __repr__(self):
        return "<ForecastView t_now={} splice={}>".format(
            self.t_now, self.splice)


def forecast_view(series, t_now, Ts):
    """
    Get the forcing the scheduler plans with.

    :param series:
        :class:`WeatherSeries`
    :param t_now:
        Current season day
    :param Ts:
        Number of days of accurate forecast
    :returns:
        :class:`ForecastView`
    :raises RangeError:
        If ``t_now`` is outside of the season.
    """
    if not 0 <= t_now < series.season_length:
        raise RangeError("day {!r} outside of the {}-day season".format(
            t_now, series.season_length))
    if Ts < 0:
        raise RangeError("forecast horizon must not be negative")
    return ForecastView(series, t_now, Ts)


def load_weather(path):
    """
    Load a weather file.

    :raises ParseError:
        If the file cannot be parsed.
    :raises SchemaError:
        If the ``day``, ``rain_mm`` or ``pet_mm`` column is missing.
    :raises ValidationError:
        If the file has no rows, a value is negative or days are not
        consecutive.
    """
    frame = storage.read_table(path, required=_COLUMNS)
    if frame.empty:
        raise ValidationError("weather file has no rows", path)
    days = storage.numeric_column(frame, 'day', path)
    gaps = np.flatnonzero(np.diff(days) != 1)
    if gaps.size:
        raise ValidationError("days must be consecutive", path,
                              storage.line_of(frame, gaps[0] + 1))
    values = {}
    for name in _COLUMNS[1:] + _LONG_TERM_COLUMNS:
        if name in frame.columns:
            values[name] = storage.numeric_column(
                frame, name, path, nonnegative=True)
    series = WeatherSeries(
        values['rain_mm'], values['pet_mm'], values.get('rain_lt_mm'),
        values.get('pet_lt_mm'), first_day=int(days[0]))
    _logger.debug("Loaded %r from %s", series, path)
    return series


def save_weather(path, series, provenance=()):
    """Save a weather series in the format read by :func:`load_weather`."""
    frame = pd.DataFrame({
        'day': np.arange(series.season_length) + series.first_day,
        'rain_mm': series.rain_mm,
        'pet_mm': series.pet_mm,
    })
    if series.has_long_term:
        frame['rain_lt_mm'] = series.rain_lt_mm
        frame['pet_lt_mm'] = series.pet_lt_mm
    storage.write_table(path, frame, provenance)
