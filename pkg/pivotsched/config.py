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
Scenario bundles.

A scenario bundle is one INI file naming the grid, the pivot, the solver
settings, the soil map, the crop calendar, the weather series, the scheduler
configuration and the reduction protocol of a run. Relative paths are
resolved against the directory of the INI file and every referenced file is
checked before anything is loaded.

.. code-block:: ini

    [grid]
    radius = 50
    nr = 3

    [soil]
    map = soil_loam.csv

    [crop]
    calendar = grass.csv
    output_layers = 2

    [weather]
    series = weather_dry.csv
"""

import collections
import configparser
import logging
import os
import re

import numpy as np

from pivotsched import crop as cropmodel
from pivotsched import hydraulics
from pivotsched import storage
from pivotsched import weather as weatherio
from pivotsched.errors import ParameterError
from pivotsched.errors import ParseError
from pivotsched.errors import SchemaError
from pivotsched.errors import ValidationError
from pivotsched.field import CylGrid
from pivotsched.field import FieldModel
from pivotsched.field import PivotConfig
from pivotsched.field import Schedule
from pivotsched.scheduler import HorizonSpec
from pivotsched.scheduler import Scheduler
from pivotsched.scheduler import SchedulerWeights
from pivotsched.scheduler import ZoneSpec
from pivotsched.scheduler import root_zone_nodes

__all__ = (
    'SCENARIOS',
    'ReductionSettings',
    'ScenarioBundle',
    'SolverSettings',
    'scenario_path',
)


_logger = logging.getLogger("pivotsched.config")

#: Numbers of the shipped scenario bundles
SCENARIOS = (1, 2, 3)

HOUR = 3600.0
DAY = 86400.0

_SECTIONS = {
    'grid': ('radius', 'depth', 'nr', 'ntheta', 'nz'),
    'pivot': ('rotation_period_h', 'u_lb', 'u_ub'),
    'solver': ('dh_max', 'dt_min', 'c_floor', 'bottom', 'dt_out_h'),
    'soil': ('map',),
    'crop': ('calendar', 'h1', 'h2', 'h3', 'h4', 'root_weights',
             'output_layers'),
    'weather': ('series',),
    'zone': ('lower', 'upper', 'conservative_lower', 'conservative_upper'),
    'weights': ('q_yield', 'q_water', 'q_time', 'q_upper', 'q_lower'),
    'horizon': ('n1', 'n2', 'n3', 't_lb_h', 't_ub_d', 'event_h', 'ts_days',
                'multistart', 'season_days'),
    'reduction': ('threshold', 'snapshot_head', 'snapshot_input',
                  'snapshot_days', 'sample_h', 'standardize'),
    'initial': ('head',),
}

_SECTION_RE = re.compile(r"^\s*\[(?P<name>[^\]]+)\]")


SolverSettings = collections.namedtuple(
    'SolverSettings', 'dh_max dt_min c_floor bottom dt_out')
SolverSettings.__doc__ = """
Settings of the explicit integrator.

:attr dh_max: largest head change of one sub-step [m]
:attr dt_min: smallest sub-step before giving up [s]
:attr c_floor: smallest soil water capacity [1/m]
:attr bottom: bottom boundary, ``'free'`` or ``'sealed'``
:attr dt_out: sampling interval of trajectories [s]
"""

ReductionSettings = collections.namedtuple(
    'ReductionSettings', 'threshold snapshot_head snapshot_input horizon'
    ' dt_sample standardize')
ReductionSettings.__doc__ = """
Snapshot protocol and clustering threshold of the model reduction.

:attr threshold: largest average-linkage distance of a merge
:attr snapshot_head: uniform initial head of the snapshot run [m]
:attr snapshot_input: rate of every sprinkler during the snapshot run [m/s]
:attr horizon: length of the snapshot run [s]
:attr dt_sample: snapshot sampling interval [s]
:attr standardize: flag for per-node standardization of snapshots
"""


def scenario_path(number):
    """
    Get the path of a shipped scenario bundle.

    :param number:
        One of :data:`SCENARIOS`
    :raises ParameterError:
        If there is no such scenario.
    """
    if number not in SCENARIOS:
        raise ParameterError(
            "unknown scenario {!r}, expected one of {}".format(
                number, ', '.join(str(n) for n in SCENARIOS)))
    return os.path.join(os.path.dirname(os.path.abspath(__file__)),
                        'scenarios', 'scenario{}.ini'.format(number))


class _Reader(object):

    """Typed access to the options of a parsed bundle."""

    def __init__(self, path, text, parser):
        self.path = path
        self.text = text
        self.parser = parser

    def line_of(self, section, key):
        """Find the line of ``key`` in ``section``, if present."""
        current = None
        pattern = re.compile(r"^\s*{}\s*[=:]".format(re.escape(key)))
        for number, line in enumerate(self.text.splitlines(), 1):
            match = _SECTION_RE.match(line)
            if match:
                current = match.group('name').strip()
            elif current == section and pattern.match(line):
                return number
        return None

    def has(self, section, key):
        return self.parser.has_option(section, key)

    def raw(self, section, key, default=None):
        if not self.has(section, key):
            if default is None:
                raise SchemaError("missing [{}] {}".format(section, key),
                                  self.path)
            return default
        return self.parser.get(section, key).strip()

    def invalid(self, section, key, message):
        return ValidationError("[{}] {}: {}".format(section, key, message),
                               self.path, self.line_of(section, key))

    def number(self, section, key, default, kind=float):
        value = self.raw(section, key, repr(default))
        try:
            return kind(value)
        except ValueError:
            raise self.invalid(section, key, "expected {}, got {!r}".format(
                'an integer' if kind is int else 'a number', value))

    def flag(self, section, key, default):
        if not self.has(section, key):
            return default
        try:
            return self.parser.getboolean(section, key)
        except ValueError:
            raise self.invalid(section, key, "expected yes or no")

    def choice(self, section, key, choices):
        value = self.raw(section, key, choices[0])
        if value not in choices:
            raise self.invalid(section, key, "expected one of {}".format(
                ', '.join(choices)))
        return value

    def file(self, section, key):
        value = self.raw(section, key)
        path = os.path.join(os.path.dirname(self.path), value)
        if not os.path.isfile(path):
            raise self.invalid(section, key, "no such file {!r}".format(path))
        return os.path.normpath(path)

    def numbers(self, section, key):
        value = self.raw(section, key)
        try:
            return [float(item) for item in value.split(',')]
        except ValueError:
            raise self.invalid(section, key, "expected a list of numbers")

    def layers(self, section, key, nz):
        value = self.raw(section, key, '2')
        if value.lower() == 'all':
            return list(range(nz))
        try:
            layers = [int(item) - 1 for item in value.split(',')]
        except ValueError:
            raise self.invalid(section, key,
                               "expected 'all' or a list of layer numbers")
        if any(not 0 <= k < nz for k in layers):
            raise self.invalid(section, key,
                               "layers are numbered 1 to {}".format(nz))
        return sorted(set(layers))

    def build(self, section, key, factory, *args):
        """Call ``factory`` and report parameter errors against ``key``."""
        try:
            return factory(*args)
        except ParameterError as exc:
            raise self.invalid(section, key, str(exc))


def _parse(path, text):
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text, source=path)
    except configparser.ParsingError as exc:
        line = exc.errors[0][0] if exc.errors else None
        raise ParseError("malformed line", path, line)
    except configparser.Error as exc:
        raise ParseError(exc.message.splitlines()[0], path,
                         getattr(exc, 'lineno', None))
    for section in parser.sections():
        if section not in _SECTIONS:
            _logger.warning("%s: ignoring unknown section [%s]",
                            path, section)
            continue
        for key in parser.options(section):
            if key not in _SECTIONS[section]:
                _logger.warning("%s: ignoring unknown key [%s] %s",
                                path, section, key)
    return parser


class ScenarioBundle(object):

    """
    Everything a run needs, loaded from one INI file.

    :attr path: absolute path of the INI file
    :attr digest: provenance hash of the INI text
    :attr grid: :class:`~pivotsched.field.CylGrid`
    :attr pivot: :class:`~pivotsched.field.PivotConfig`
    :attr solver: :class:`SolverSettings`
    :attr soil: :class:`~pivotsched.hydraulics.SoilMap`
    :attr calendar: :class:`~pivotsched.crop.CropCalendar`
    :attr feddes: :class:`~pivotsched.crop.FeddesParams`
    :attr root_weights: per-layer root weights or None for uniform uptake
    :attr output_layers: zero-based layers of the root-zone outputs
    :attr weather: :class:`~pivotsched.weather.WeatherSeries`
    :attr zone: :class:`~pivotsched.scheduler.ZoneSpec`
    :attr weights: :class:`~pivotsched.scheduler.SchedulerWeights`
    :attr horizon: :class:`~pivotsched.scheduler.HorizonSpec`
    :attr ts_days: length of the accurate forecast [days]
    :attr season_days: length of the closed-loop run [days]
    :attr reduction: :class:`ReductionSettings`
    :attr initial_head: uniform initial head [m]
    """

    def __init__(self, path, digest, **fields):
        self.path = path
        self.digest = digest
        for name, value in fields.items():
            setattr(self, name, value)

    def __repr__(self):
        return "<ScenarioBundle {} digest={}>".format(
            os.path.basename(self.path), self.digest)

    @classmethod
    def from_file(cls, path):
        """
        Load a scenario bundle.

        :raises ParseError:
            If the INI file or one of the referenced files is malformed.
        :raises SchemaError:
            If a required key or column is missing.
        :raises ValidationError:
            If a value is outside of its domain or a referenced file does
            not exist.
        """
        path = os.path.abspath(path)
        try:
            with open(path, 'rt', encoding='utf-8') as stream:
                text = stream.read()
        except OSError as exc:
            raise ParseError("cannot read bundle: {}".format(
                exc.strerror), path)
        reader = _Reader(path, text, _parse(path, text))
        # Resolve every file before loading any of them
        soil_path = reader.file('soil', 'map')
        calendar_path = reader.file('crop', 'calendar')
        weather_path = reader.file('weather', 'series')
        grid = reader.build('grid', 'nr', CylGrid,
                            reader.number('grid', 'radius', 50.0),
                            reader.number('grid', 'depth', 0.3),
                            reader.number('grid', 'nr', 3, int),
                            reader.number('grid', 'ntheta', 16, int),
                            reader.number('grid', 'nz', 4, int))
        rotation = reader.number('pivot', 'rotation_period_h', 8.0) * HOUR
        pivot = reader.build('pivot', 'u_ub', PivotConfig, rotation, grid.nr,
                             reader.number('pivot', 'u_lb', 0.0),
                             reader.number('pivot', 'u_ub', 2.5e-6))
        solver = SolverSettings(
            reader.number('solver', 'dh_max', 0.05),
            reader.number('solver', 'dt_min', 1e-3),
            reader.number('solver', 'c_floor', hydraulics.DEFAULT_C_FLOOR),
            reader.choice('solver', 'bottom', ('free', 'sealed')),
            reader.number('solver', 'dt_out_h', 1.0) * HOUR)
        if not (solver.dh_max > 0 and solver.dt_min > 0 and
                solver.dt_out > 0 and solver.c_floor > 0):
            raise ValidationError("[solver] values must be positive", path)
        feddes = reader.build('crop', 'h1', cropmodel.FeddesParams,
                              reader.number('crop', 'h1', -0.1),
                              reader.number('crop', 'h2', -0.25),
                              reader.number('crop', 'h3', -3.1),
                              reader.number('crop', 'h4', -80.0))
        root_weights = None
        if reader.raw('crop', 'root_weights', 'uniform') != 'uniform':
            root_weights = reader.numbers('crop', 'root_weights')
            reader.build('crop', 'root_weights', cropmodel.root_layer_weights,
                         grid.Z, grid.dz, grid.nz, root_weights)
        output_layers = reader.layers('crop', 'output_layers', grid.nz)
        zone = reader.build('zone', 'lower', ZoneSpec,
                            reader.number('zone', 'lower', -3.1),
                            reader.number('zone', 'upper', -0.25),
                            reader.number('zone', 'conservative_lower', -2.8),
                            reader.number('zone', 'conservative_upper', -1.0))
        weights = reader.build('weights', 'q_yield', SchedulerWeights, *[
            reader.number('weights', key, default) for key, default in (
                ('q_yield', 1.0), ('q_water', 1.0), ('q_time', 1.0),
                ('q_upper', 1.0), ('q_lower', 100.0))])
        horizon = reader.build(
            'horizon', 't_lb_h', HorizonSpec,
            reader.number('horizon', 'n1', 8, int),
            reader.number('horizon', 'n2', 48, int),
            reader.number('horizon', 'n3', 8, int),
            reader.number('horizon', 't_lb_h', 0.5) * HOUR,
            reader.number('horizon', 't_ub_d', 16.0) * DAY,
            reader.number('horizon', 'event_h', rotation / HOUR) * HOUR,
            reader.number('horizon', 'multistart', 8, int))
        ts_days = reader.number('horizon', 'ts_days', 7.0)
        if not ts_days > 0:
            raise reader.invalid('horizon', 'ts_days', "must be positive")
        reduction = ReductionSettings(
            reader.number('reduction', 'threshold', 1.0),
            reader.number('reduction', 'snapshot_head', -4.0),
            reader.number('reduction', 'snapshot_input', 2e-6),
            reader.number('reduction', 'snapshot_days', 2.0) * DAY,
            reader.number('reduction', 'sample_h', 1.0) * HOUR,
            reader.flag('reduction', 'standardize', False))
        if not (reduction.threshold > 0 and reduction.horizon > 0 and
                reduction.dt_sample > 0):
            raise ValidationError(
                "[reduction] threshold, snapshot_days and sample_h must be"
                " positive", path)
        if not pivot.u_lb <= reduction.snapshot_input <= pivot.u_ub:
            raise reader.invalid('reduction', 'snapshot_input',
                                 "outside of the pivot bounds")
        initial_head = reader.number('initial', 'head', -2.0)
        # Referenced files
        soil = hydraulics.load_soil_map(soil_path, grid.n)
        calendar = cropmodel.load_crop_calendar(calendar_path)
        series = weatherio.load_weather(weather_path)
        season_days = reader.number(
            'horizon', 'season_days', calendar.season_length, int)
        if season_days < 1:
            raise reader.invalid('horizon', 'season_days', "must be positive")
        bundle = cls(
            path, storage.config_digest(text), grid=grid, pivot=pivot,
            solver=solver, soil=soil, calendar=calendar, feddes=feddes,
            root_weights=root_weights, output_layers=output_layers,
            weather=series, zone=zone, weights=weights, horizon=horizon,
            ts_days=ts_days, season_days=season_days, reduction=reduction,
            initial_head=initial_head)
        _logger.info("Loaded %r: %r, %d-day season", bundle, grid,
                     season_days)
        return bundle

    def provenance(self, command=None):
        """Get the provenance comment lines of output files."""
        lines = [('config', self.digest),
                 ('bundle', os.path.basename(self.path))]
        if command is not None:
            lines.append(('command', command))
        return tuple(lines)

    def crop_model(self):
        """Get the :class:`~pivotsched.crop.CropModel` of the bundle."""
        return cropmodel.CropModel(self.calendar, self.feddes,
                                   self.root_weights)

    def field_model(self, with_crop=True):
        """Get the full-order :class:`~pivotsched.field.FieldModel`."""
        return FieldModel(
            self.grid, self.soil, self.pivot,
            self.crop_model() if with_crop else None, self.solver.bottom,
            self.solver.dh_max, self.solver.dt_min, self.solver.c_floor)

    def output_nodes(self):
        """Get the ids of the root-zone output nodes."""
        return root_zone_nodes(self.grid, self.output_layers)

    def initial_state(self, head=None):
        """Get a uniform initial state, by default at :attr:`initial_head`."""
        head = self.initial_head if head is None else head
        return np.full(self.grid.n, float(head))

    def snapshot_schedule(self):
        """Get the constant irrigation of the snapshot run."""
        return Schedule.constant(
            np.full(self.pivot.n_sprinklers, self.reduction.snapshot_input))

    def scheduler(self, model):
        """Get a :class:`~pivotsched.scheduler.Scheduler` over ``model``."""
        return Scheduler(model, self.output_nodes(), self.horizon,
                         self.weights, self.zone, self.crop_model())
