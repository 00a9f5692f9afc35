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
Soil water dynamics of a center-pivot irrigated field.

The field is a cylinder of radius ``R`` and depth ``Z`` discretized into
``Nr x Ntheta x Nz`` finite volumes. Node ``(i, j, k)`` is centered at radius
``(i + 1/2) dr``, angle ``j dtheta`` and depth ``(k + 1/2) dz``; layer zero is
at the surface. Node ids enumerate nodes with ``k`` varying fastest, so a
state vector reshaped to ``(Nr, Ntheta, Nz)`` is indexed by ``[i, j, k]``.

Water moves between neighbouring volumes according to the mixed form of the
Richards equation written for pressure head. The surface receives rain and
the water of the pivot, the bottom drains freely (or is sealed) and both the
inner and the outer radial faces are closed. Time integration is explicit
Euler with sub-steps limited by the largest admissible head change and by
the diffusive stability bound of the explicit scheme. Sub-steps never cross a
pivot sector switch, a day boundary or a change of sprinkler commands.

Times are in seconds, heads in meters and rates in m/s.
"""

import collections
import logging
import math

import numpy as np

from pivotsched import hydraulics
from pivotsched import storage
from pivotsched.errors import NumericError
from pivotsched.errors import ParameterError
from pivotsched.errors import ShapeError
from pivotsched.errors import StiffnessError
from pivotsched.errors import ValidationError

__all__ = (
    'CylGrid',
    'Evaluation',
    'ExplicitModel',
    'FieldModel',
    'FieldState',
    'PivotConfig',
    'PivotMask',
    'Schedule',
    'Trajectory',
    'WaterBalance',
    'WeatherSample',
    'build_grid',
    'load_schedule',
    'pivot_input_mask',
)


_logger = logging.getLogger("pivotsched.field")

#: Default limit of the head change in one sub-step [m]
DEFAULT_DH_MAX = 0.05

#: Default smallest admissible sub-step [s]
DEFAULT_DT_MIN = 1e-3

# Slack used when locating a time inside a periodic cell.
_EPS = 1e-9


class CylGrid(object):

    """
    Geometry and node numbering of the cylindrical grid.

    :attr R: field radius [m]
    :attr Z: soil depth [m]
    :attr nr: number of rings
    :attr ntheta: number of azimuthal sectors
    :attr nz: number of layers
    :attr dr: ring width [m]
    :attr dtheta: sector angle [rad]
    :attr dz: layer thickness [m]
    :attr r: radii of the node centers [m]
    :attr theta: angles of the node centers [rad]
    :attr z: depths of the node centers [m]
    """

    def __init__(self, R, Z, nr, ntheta, nz):
        if not (R > 0 and Z > 0):
            raise ParameterError(
                "radius and depth must be positive, got R={!r}, Z={!r}".format(
                    R, Z))
        if not (int(nr) == nr and int(ntheta) == ntheta and int(nz) == nz):
            raise ParameterError("node counts must be integers")
        if nr < 1 or ntheta < 1 or nz < 2:
            raise ParameterError(
                "need at least 1 ring, 1 sector and 2 layers,"
                " got ({}, {}, {})".format(nr, ntheta, nz))
        self.R = float(R)
        self.Z = float(Z)
        self.nr = int(nr)
        self.ntheta = int(ntheta)
        self.nz = int(nz)
        self.dr = self.R / self.nr
        self.dtheta = 2.0 * math.pi / self.ntheta
        self.dz = self.Z / self.nz
        self.r = (np.arange(self.nr) + 0.5) * self.dr
        self.theta = np.arange(self.ntheta) * self.dtheta
        self.z = (np.arange(self.nz) + 0.5) * self.dz

    def __repr__(self):
        return "<CylGrid R={} Z={} shape={}>".format(
            self.R, self.Z, self.shape)

    @property
    def shape(self):
        """Shape of the node array, ``(nr, ntheta, nz)``."""
        return (self.nr, self.ntheta, self.nz)

    @property
    def n(self):
        """Total number of nodes."""
        return self.nr * self.ntheta * self.nz

    def node_id(self, i, j, k):
        """Get the id of node ``(i, j, k)``."""
        if not (0 <= i < self.nr and 0 <= j < self.ntheta
                and 0 <= k < self.nz):
            raise ParameterError("node ({}, {}, {}) outside of grid {}".format(
                i, j, k, self.shape))
        return (i * self.ntheta + j) * self.nz + k

    def index_of(self, node):
        """Get the ``(i, j, k)`` indices of a node id."""
        if not 0 <= node < self.n:
            raise ParameterError("node id {} outside of grid with {} nodes"
                                 .format(node, self.n))
        rest, k = divmod(int(node), self.nz)
        i, j = divmod(rest, self.ntheta)
        return i, j, k

    def volumes(self):
        """Get the volume of every node as an array of grid shape [m3]."""
        ring = self.r * self.dr * self.dtheta * self.dz
        return np.broadcast_to(ring[:, None, None], self.shape).copy()

    def surface_areas(self):
        """Get the top area of every column, shape ``(nr, ntheta)`` [m2]."""
        ring = self.r * self.dr * self.dtheta
        return np.broadcast_to(ring[:, None], self.shape[:2]).copy()

    def layer_nodes(self, k):
        """Get the ids of all nodes of layer ``k``."""
        ids = np.arange(self.n).reshape(self.shape)
        return ids[:, :, k].ravel()

    def ring_layer_nodes(self, i, k):
        """Get the ids of the nodes of ring ``i`` in layer ``k``."""
        ids = np.arange(self.n).reshape(self.shape)
        return ids[i, :, k].ravel()


def build_grid(R, Z, nr, ntheta, nz):
    """
    Build a cylindrical grid.

    :raises ParameterError:
        If a dimension is not positive or a node count is too small.
    """
    grid = CylGrid(R, Z, nr, ntheta, nz)
    _logger.debug("Built %r with %d nodes", grid, grid.n)
    return grid


class FieldState(object):

    """
    Pressure heads of every node of a grid [m].

    The head vector is read-only. Non-finite heads raise
    :class:`~pivotsched.errors.NumericError` naming the first bad node.
    """

    __slots__ = ('x',)

    def __init__(self, x, grid=None):
        x = np.array(x, dtype=float).ravel()
        if grid is not None and x.size != grid.n:
            raise ShapeError("state has {} entries, grid has {} nodes".format(
                x.size, grid.n))
        check_finite(x)
        x.setflags(write=False)
        self.x = x

    @classmethod
    def uniform(cls, grid, head):
        """Create a state with the same head at every node."""
        return cls(np.full(grid.n, float(head)), grid)

    def __len__(self):
        return self.x.size

    def __repr__(self):
        return "<FieldState n={} min={:.4g} max={:.4g}>".format(
            self.x.size, self.x.min(), self.x.max())


def check_finite(x):
    """Raise :class:`NumericError` if ``x`` has a non-finite entry."""
    bad = np.flatnonzero(~np.isfinite(x))
    if bad.size:
        raise NumericError("non-finite head {!r} at node {}".format(
            x.flat[bad[0]], bad[0]), node=int(bad[0]))


class PivotConfig(collections.namedtuple(
        'PivotConfig', 'rotation_period n_sprinklers u_lb u_ub phase')):

    """
    Center pivot machine.

    :attr rotation_period:
        Time of one revolution [s]
    :attr n_sprinklers:
        Number of sprinklers, one per ring
    :attr u_lb, u_ub:
        Bounds of the sprinkler rates [m/s]
    :attr phase:
        Time at which the pivot is over sector zero [s]

    The pivot dwells ``rotation_period / Ntheta`` over each sector and turns
    all the time. Sprinklers only emit water while an event is scheduled.
    """

    __slots__ = ()

    def __new__(cls, rotation_period, n_sprinklers, u_lb=0.0, u_ub=np.inf,
                phase=0.0):
        self = super(PivotConfig, cls).__new__(
            cls, float(rotation_period), int(n_sprinklers), float(u_lb),
            float(u_ub), float(phase))
        if not self.rotation_period > 0:
            raise ParameterError("rotation period must be positive")
        if self.n_sprinklers < 1:
            raise ParameterError("pivot needs at least one sprinkler")
        if not 0 <= self.u_lb <= self.u_ub:
            raise ParameterError(
                "expected 0 <= u_lb <= u_ub, got {!r}, {!r}".format(
                    self.u_lb, self.u_ub))
        return self

    def dwell(self, ntheta):
        """Get the time spent over one sector [s]."""
        return self.rotation_period / ntheta

    def sector_at(self, t, ntheta):
        """Get the index of the sector under the pivot at time ``t``."""
        dwell = self.dwell(ntheta)
        turned = math.fmod(t - self.phase, self.rotation_period)
        if turned < 0:
            turned += self.rotation_period
        return int(math.floor(turned / dwell + _EPS)) % ntheta

    def next_switch(self, t, ntheta):
        """Get the first time after ``t`` at which the pivot changes sector."""
        dwell = self.dwell(ntheta)
        count = math.floor((t - self.phase) / dwell + _EPS)
        return self.phase + (count + 1) * dwell


PivotMask = collections.namedtuple('PivotMask', 'sector active lower upper')
PivotMask.__doc__ = """
Input constraint imposed by the pivot at one time.

:attr sector: index of the sector under the pivot
:attr active: ids of the surface nodes under the pivot
:attr lower: per-column lower rate bounds, shape ``(nr, ntheta)``
:attr upper: per-column upper rate bounds, shape ``(nr, ntheta)``
"""


def pivot_input_mask(t, grid, pivot):
    """
    Get the surface nodes watered at time ``t`` and their rate bounds.

    Columns of the sector under the pivot get the bounds ``[u_lb, u_ub]``
    of their ring sprinkler, every other column gets ``[0, 0]``.

    :returns:
        :class:`PivotMask`
    """
    sector = pivot.sector_at(t, grid.ntheta)
    lower = np.zeros(grid.shape[:2])
    upper = np.zeros(grid.shape[:2])
    lower[:, sector] = pivot.u_lb
    upper[:, sector] = pivot.u_ub
    active = np.array([grid.node_id(i, sector, 0) for i in range(grid.nr)])
    return PivotMask(sector, active, lower, upper)


class WeatherSample(collections.namedtuple('WeatherSample', 'rain PET')):

    """
    Weather forcing [m/s].

    A sample also acts as a constant weather series, see :meth:`sample` and
    :meth:`next_change`.
    """

    __slots__ = ()

    def __new__(cls, rain=0.0, PET=0.0):
        self = super(WeatherSample, cls).__new__(cls, float(rain), float(PET))
        if not (self.rain >= 0 and self.PET >= 0):
            raise ParameterError("rain and PET must be nonnegative")
        return self

    def sample(self, t):
        """Get the forcing at time ``t``, always this sample."""
        return self

    def next_change(self, t):
        """Get the next time the forcing changes, never."""
        return math.inf


class Schedule(object):

    """
    Piecewise-constant sprinkler commands.

    A schedule is a list of non-overlapping events. During an event each
    ring sprinkler has its own rate, outside of events the sprinklers are off.
    """

    def __init__(self, n_sprinklers):
        self.n_sprinklers = int(n_sprinklers)
        self._events = []

    @classmethod
    def constant(cls, rates):
        """Create a schedule with the same rates at all times."""
        rates = np.atleast_1d(np.asarray(rates, dtype=float))
        schedule = cls(rates.size)
        schedule.add(-math.inf, math.inf, rates)
        return schedule

    def __repr__(self):
        return "<Schedule events={}>".format(len(self._events))

    @property
    def events(self):
        """Tuple of ``(start, end, rates)`` triplets, sorted by start."""
        return tuple(self._events)

    def add(self, start, duration, rates):
        """
        Add an event.

        :param start:
            Start time [s]
        :param duration:
            Duration [s], positive, infinite for an event that never ends
        :param rates:
            Sprinkler rates [m/s], one per ring
        :raises ParameterError:
            If the event overlaps another one or the rates are invalid.
        """
        rates = np.atleast_1d(np.array(rates, dtype=float))
        if rates.shape != (self.n_sprinklers,):
            raise ShapeError("expected {} sprinkler rates, got {}".format(
                self.n_sprinklers, rates.size))
        if np.any(rates < 0) or not np.all(np.isfinite(rates)):
            raise ParameterError("sprinkler rates must be finite and >= 0")
        if not duration > 0:
            raise ParameterError("event duration must be positive")
        end = math.inf if duration == math.inf else start + duration
        for other_start, other_end, _ in self._events:
            if start < other_end and other_start < end:
                raise ParameterError("event [{}, {}) overlaps [{}, {})".format(
                    start, end, other_start, other_end))
        rates.setflags(write=False)
        self._events.append((start, end, rates))
        self._events.sort(key=lambda event: event[0])
        return self

    def commands_at(self, t):
        """Get the rates in effect at time ``t`` or None if no event is on."""
        for start, end, rates in self._events:
            if start <= t < end:
                return rates
        return None

    def next_change(self, t):
        """Get the first event start or end after ``t``."""
        upcoming = [edge for start, end, _ in self._events
                    for edge in (start, end) if edge > t]
        return min(upcoming) if upcoming else math.inf


def load_schedule(path, n_sprinklers):
    """
    Load sprinkler events from a CSV file.

    The columns are ``start_h`` and ``duration_h`` followed by either one
    ``rate`` column applied to every sprinkler or one ``rate_<i>`` column per
    ring ``i`` [m/s].

    :raises ParseError, SchemaError, ValidationError:
        If the file is malformed or events overlap.
    """
    frame = storage.read_table(path, required=('start_h', 'duration_h'))
    per_ring = ['rate_{}'.format(i) for i in range(n_sprinklers)]
    if 'rate' in frame.columns:
        rates = np.repeat(
            storage.numeric_column(frame, 'rate', path, nonnegative=True)[
                :, None], n_sprinklers, axis=1)
    elif all(name in frame.columns for name in per_ring):
        rates = np.column_stack([
            storage.numeric_column(frame, name, path, nonnegative=True)
            for name in per_ring])
    else:
        raise storage.missing_columns(path, ['rate'], frame.columns)
    starts = storage.numeric_column(frame, 'start_h', path) * 3600.0
    durations = storage.numeric_column(
        frame, 'duration_h', path, nonnegative=True) * 3600.0
    schedule = Schedule(n_sprinklers)
    for index, (start, duration) in enumerate(zip(starts, durations)):
        try:
            schedule.add(start, duration, rates[index])
        except ParameterError as exc:
            raise ValidationError(str(exc), path,
                                  storage.line_of(frame, index))
    return schedule


WaterBalance = collections.namedtuple(
    'WaterBalance', 'inflow outflow uptake')
WaterBalance.__doc__ = """
Water exchanged by the field [m3, or m3/s for a single evaluation].

:attr inflow: water entering through the surface
:attr outflow: water drained through the bottom
:attr uptake: water extracted by roots
"""

Evaluation = collections.namedtuple(
    'Evaluation', 'rate head_rate storage_rate dt_stable budget')
Evaluation.__doc__ = """
Result of one right-hand side evaluation.

:attr rate: time derivative of the model state
:attr head_rate: time derivative of the physical heads
:attr storage_rate: time derivative of the water stored in every physical
    node [1/s]
:attr dt_stable: largest stable explicit sub-step [s]
:attr budget: :class:`WaterBalance` of rates [m3/s]
"""

Trajectory = collections.namedtuple('Trajectory', 'times states balance')
Trajectory.__doc__ = """
Sampled simulation result.

:attr times: sample times [s], length N
:attr states: array of shape (N, n), one state per row
:attr balance: :class:`WaterBalance` accumulated over the run [m3]
"""


class ExplicitModel(object):

    """
    Base of models integrated with sub-stepped explicit Euler.

    Subclasses implement :meth:`evaluate` and may restrict sub-steps with
    :meth:`next_break`.
    """

    def __init__(self, dh_max=DEFAULT_DH_MAX, dt_min=DEFAULT_DT_MIN):
        if not dh_max > 0:
            raise ParameterError("dh_max must be positive")
        if not dt_min > 0:
            raise ParameterError("dt_min must be positive")
        self.dh_max = float(dh_max)
        self.dt_min = float(dt_min)

    def evaluate(self, state, t, u, d):
        """
        Evaluate the right-hand side.

        :param u:
            Sprinkler rates or None when sprinklers are off
        :param d:
            :class:`WeatherSample`
        :returns:
            :class:`Evaluation`
        """
        raise NotImplementedError

    def next_break(self, t, u):
        """Get the next time a sub-step must stop at."""
        return math.inf

    def rhs(self, state, u, d, t):
        """Get the time derivative of ``state``."""
        return self.evaluate(state, t, u, d).rate

    def increment(self, state, evaluation, dt):
        """Get the state ``dt`` seconds after ``state``, explicit Euler."""
        return state + dt * evaluation.rate

    def flux_budget(self, state, u, d, t):
        """Get the :class:`WaterBalance` of rates at ``state``."""
        return self.evaluate(state, t, u, d).budget

    def advance(self, state, t, dt, schedule, weather):
        """
        Integrate from ``t`` to ``t + dt``.

        :param schedule:
            :class:`Schedule`
        :param weather:
            Object with ``sample(t)`` and ``next_change(t)`` methods
        :returns:
            Pair of the new state and the :class:`WaterBalance` of the
            interval
        :raises StiffnessError:
            If the sub-step falls below ``dt_min``.
        """
        if not dt > 0:
            raise ParameterError("time step must be positive")
        state = np.asarray(state, dtype=float)
        t_end = t + dt
        totals = np.zeros(3)
        substeps = 0
        while t < t_end:
            u = schedule.commands_at(t)
            bound = min(t_end, self.next_break(t, u),
                        schedule.next_change(t), weather.next_change(t))
            evaluation = self.evaluate(state, t, u, weather.sample(t))
            peak = np.max(np.abs(evaluation.head_rate))
            dt_sub = min(bound - t, evaluation.dt_stable)
            if peak > 0:
                dt_sub = min(dt_sub, self.dh_max / peak)
            if dt_sub < bound - t and dt_sub < self.dt_min:
                raise StiffnessError(
                    "sub-step {:.3g} s below {:.3g} s at t={:.6g} s".format(
                        dt_sub, self.dt_min, t), time=t, dt=dt_sub)
            state = self.increment(state, evaluation, dt_sub)
            totals += dt_sub * np.asarray(evaluation.budget)
            t = bound if dt_sub == bound - t else t + dt_sub
            substeps += 1
        check_finite(state)
        _logger.debug("Advanced to t=%.6g s in %d sub-step(s)", t_end,
                      substeps)
        return state, WaterBalance(*totals)

    def step(self, state, u, d, t, dt):
        """
        Advance with fixed sprinkler rates and weather.

        :param u:
            Sprinkler rates [m/s] or None for no irrigation
        :param d:
            :class:`WeatherSample`
        """
        schedule = Schedule.constant(u) if u is not None else Schedule(1)
        return self.advance(state, t, dt, schedule, d)[0]

    def simulate(self, x0, schedule, weather, horizon, dt_out, t0=0.0):
        """
        Simulate and sample every ``dt_out`` seconds.

        The last sample is at ``t0 + horizon`` even if ``horizon`` is not a
        multiple of ``dt_out``.

        :returns:
            :class:`Trajectory`
        """
        if not horizon > 0:
            raise ParameterError("horizon must be positive")
        if not dt_out > 0:
            raise ParameterError("output interval must be positive")
        count = int(math.ceil(horizon / dt_out - _EPS))
        offsets = np.minimum(np.arange(count + 1) * dt_out, horizon)
        times = t0 + offsets
        state = np.asarray(x0, dtype=float).copy()
        check_finite(state)
        states = [state]
        totals = np.zeros(3)
        for start, end in zip(times[:-1], times[1:]):
            state, balance = self.advance(
                state, start, end - start, schedule, weather)
            states.append(state)
            totals += balance
        return Trajectory(times, np.array(states), WaterBalance(*totals))


class FieldModel(ExplicitModel):

    """
    Full-order model of the field.

    :param grid:
        :class:`CylGrid`
    :param soil:
        :class:`~pivotsched.hydraulics.SoilParams` for a uniform field or a
        :class:`~pivotsched.hydraulics.SoilMap` covering every node
    :param pivot:
        :class:`PivotConfig` with one sprinkler per ring
    :param crop:
        Optional :class:`~pivotsched.crop.CropModel` providing root uptake
    :param bottom:
        Either ``'free'`` (unit-gradient drainage) or ``'sealed'``
    :param c_floor:
        Smallest soil water capacity used [1/m]
    """

    def __init__(self, grid, soil, pivot, crop=None, bottom='free',
                 dh_max=DEFAULT_DH_MAX, dt_min=DEFAULT_DT_MIN,
                 c_floor=hydraulics.DEFAULT_C_FLOOR):
        super(FieldModel, self).__init__(dh_max, dt_min)
        if isinstance(soil, hydraulics.SoilParams):
            soil = hydraulics.SoilMap.uniform(soil, grid.n)
        if len(soil) != grid.n:
            raise ShapeError("soil map covers {} nodes, grid has {}".format(
                len(soil), grid.n))
        if pivot.n_sprinklers != grid.nr:
            raise ParameterError(
                "pivot has {} sprinklers for {} rings".format(
                    pivot.n_sprinklers, grid.nr))
        if bottom not in ('free', 'sealed'):
            raise ParameterError(
                "bottom must be 'free' or 'sealed', got {!r}".format(bottom))
        if not c_floor > 0:
            raise ParameterError("c_floor must be positive")
        self.grid = grid
        self.soil = soil
        self.pivot = pivot
        self.crop = crop
        self.bottom = bottom
        self.c_floor = float(c_floor)
        self._soil = soil.reshape(grid.shape)
        self._volume = grid.volumes()
        self._area = grid.surface_areas()
        # Face conductances per unit hydraulic conductivity [m]
        index = np.arange(1, grid.nr)
        self._g_radial = (index * grid.dtheta * grid.dz)[:, None, None]
        self._g_azimuthal = (grid.dr * grid.dz / (grid.r * grid.dtheta))[
            :, None, None]
        self._g_vertical = self._area[:, :, None] / grid.dz

    def __repr__(self):
        return "<FieldModel {!r} bottom={}>".format(self.grid, self.bottom)

    @property
    def n(self):
        """Number of states."""
        return self.grid.n

    def lift(self, state):
        """Get the physical heads of a model state, the state itself."""
        return np.asarray(state, dtype=float)

    reduce = lift

    def next_break(self, t, u):
        """Stop at sector switches while irrigating and at day boundaries."""
        bound = math.inf
        if u is not None:
            bound = self.pivot.next_switch(t, self.grid.ntheta)
        if self.crop is not None:
            bound = min(bound, self.crop.next_change(t))
        return bound

    def surface_flux(self, t, u, d):
        """
        Get the water flux entering every column [m/s].

        :param u:
            Sprinkler rates, one per ring, or None when sprinklers are off.
            Rates are clipped to the bounds of the pivot mask.
        :returns:
            Array of shape ``(nr, ntheta)``
        """
        flux = np.full(self.grid.shape[:2], d.rain)
        if u is not None:
            u = np.atleast_1d(np.asarray(u, dtype=float))
            if u.shape != (self.grid.nr,):
                raise ShapeError("expected {} sprinkler rates, got {}".format(
                    self.grid.nr, u.size))
            mask = pivot_input_mask(t, self.grid, self.pivot)
            flux += np.clip(u[:, None], mask.lower, mask.upper)
        return flux

    def evaluate(self, x, t, u, d):
        """
        Evaluate the discretized Richards equation.

        :raises NumericError:
            If a head is not finite.
        """
        x = np.asarray(x, dtype=float)
        if x.shape != (self.grid.n,):
            raise ShapeError("state has shape {}, expected ({},)".format(
                x.shape, self.grid.n))
        check_finite(x)
        grid = self.grid
        h = x.reshape(grid.shape)
        K = hydraulics.hydraulic_conductivity(h, self._soil)
        c = hydraulics.capillary_capacity(h, self._soil, self.c_floor)
        net = np.zeros(grid.shape)
        conductance = np.zeros(grid.shape)
        if grid.nr > 1:
            kg = 0.5 * (K[1:] + K[:-1]) * self._g_radial
            q = kg * (h[1:] - h[:-1])
            net[:-1] += q
            net[1:] -= q
            conductance[:-1] += kg
            conductance[1:] += kg
        if grid.ntheta > 1:
            kg = 0.5 * (K + np.roll(K, -1, axis=1)) * self._g_azimuthal
            q = kg * (np.roll(h, -1, axis=1) - h)
            net += q - np.roll(q, 1, axis=1)
            conductance += kg + np.roll(kg, 1, axis=1)
        # downward flow between layers k and k + 1
        kg = 0.5 * (K[:, :, 1:] + K[:, :, :-1]) * self._g_vertical
        q = kg * (grid.dz - (h[:, :, 1:] - h[:, :, :-1]))
        net[:, :, :-1] -= q
        net[:, :, 1:] += q
        conductance[:, :, :-1] += kg
        conductance[:, :, 1:] += kg
        inflow = self.surface_flux(t, u, d) * self._area
        net[:, :, 0] += inflow
        if self.bottom == 'free':
            outflow = K[:, :, -1] * self._area
            net[:, :, -1] -= outflow
        else:
            outflow = np.zeros_like(inflow)
        if self.crop is not None:
            sink = self.crop.uptake(h, t, d.PET, grid.dz)
        else:
            sink = np.zeros(grid.shape)
        storage_rate = net / self._volume + sink
        rate = (storage_rate / c).ravel()
        dt_stable = float(np.min(c * self._volume / conductance))
        budget = WaterBalance(float(inflow.sum()), float(outflow.sum()),
                              float(-np.sum(sink * self._volume)))
        return Evaluation(rate, rate, storage_rate.ravel(), dt_stable, budget)

    def increment(self, x, evaluation, dt):
        """
        Get the heads ``dt`` seconds after ``x``.

        The stored water of every node moves by ``dt`` times its storage
        rate and the heads follow from the inverse retention curve, so the
        field storage changes by exactly the integrated flux budget.
        """
        x = np.asarray(x, dtype=float)
        h = x.reshape(self.grid.shape)
        dw = dt * evaluation.storage_rate.reshape(self.grid.shape)
        w = hydraulics.stored_water(h, self._soil, self.c_floor) + dw
        h_new = hydraulics.head_at_stored_water(w, self._soil, self.c_floor)
        return np.where(dw == 0, h, h_new).ravel()

    def water_storage(self, x):
        """Get the water stored in the field [m3]."""
        w = hydraulics.stored_water(
            np.asarray(x, dtype=float).reshape(self.grid.shape), self._soil,
            self.c_floor)
        return float(np.sum(w * self._volume))
