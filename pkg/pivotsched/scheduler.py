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
Irrigation scheduling with a variable inter-event time.

Every decision plans a horizon of three segments:

1. an irrigation event of fixed duration (one pivot revolution by default)
   with the sprinkler rates ``u1``,
2. a dry spell of ``T`` seconds, ``T_lb <= T <= T_ub``, sampled at a fixed
   number of points,
3. a second event with the rates ``u3``.

The cost rewards a long dry spell and penalizes yield deficiency, water and
root-zone heads outside of the conservative zone. Slack variables of the
zone constraints are eliminated analytically. The problem is solved as a
bilevel search: a golden-section search over ``T`` seeded by a coarse grid,
with a bounded quasi-Newton search over the rates at every ``T``.

The receding-horizon loop applies the first event of every decision to the
full-order model and re-plans at the next event or after ``Ts`` days,
whichever comes first.
"""

import collections
import logging
import math

import numpy as np
import pandas as pd
from scipy.optimize import minimize

from pivotsched import crop as cropmodel
from pivotsched.errors import ComputationError
from pivotsched.errors import ParameterError
from pivotsched.errors import SchedulingError
from pivotsched.field import Schedule
from pivotsched.weather import forecast_view

__all__ = (
    'ClosedLoopLog',
    'ClosedLoopRecord',
    'CostBreakdown',
    'DaysToZone',
    'HorizonSpec',
    'Rollout',
    'ScheduleDecision',
    'Scheduler',
    'SchedulerWeights',
    'ZoneSpec',
    'days_to_zone',
    'eliminate_slacks',
    'horizon_cost',
    'knee_estimate',
    'receding_horizon_run',
    'root_zone_nodes',
)


_logger = logging.getLogger("pivotsched.scheduler")

SECONDS_PER_DAY = 86400.0

#: Longest simulated drying period of :func:`days_to_zone` [days]
DAYS_TO_ZONE_CAP = 90.0

#: Normalized step of the finite-difference gradient
FD_STEP = 1e-4

# Cost of a rollout that failed to integrate.
_FAILED = 1e30


class ZoneSpec(collections.namedtuple(
        'ZoneSpec', 'lower upper conservative_lower conservative_upper')):

    """
    Target band of the root-zone pressure head [m].

    The actual band ``[lower, upper]`` is the stress-free zone of the crop.
    The scheduler tracks the conservative band, which lies strictly inside.
    """

    __slots__ = ()

    def __new__(cls, lower=-3.1, upper=-0.25, conservative_lower=-2.8,
                conservative_upper=-1.0):
        self = super(ZoneSpec, cls).__new__(
            cls, float(lower), float(upper), float(conservative_lower),
            float(conservative_upper))
        if not self.lower < self.upper:
            raise ParameterError("zone lower bound must be below upper bound")
        if not (self.lower < self.conservative_lower
                < self.conservative_upper < self.upper):
            raise ParameterError(
                "conservative zone must lie strictly inside the zone")
        return self


class SchedulerWeights(collections.namedtuple(
        'SchedulerWeights', 'q_yield q_water q_time q_upper q_lower')):

    """Nonnegative weights of the terms of the scheduling cost."""

    __slots__ = ()

    def __new__(cls, q_yield=1.0, q_water=1.0, q_time=1.0, q_upper=1.0,
                q_lower=100.0):
        self = super(SchedulerWeights, cls).__new__(
            cls, float(q_yield), float(q_water), float(q_time),
            float(q_upper), float(q_lower))
        if any(not weight >= 0 for weight in self):
            raise ParameterError("cost weights must be nonnegative")
        return self


class HorizonSpec(collections.namedtuple(
        'HorizonSpec', 'n1 n2 n3 t_lb t_ub event multistart')):

    """
    Shape of the planning horizon.

    :attr n1, n2, n3: number of samples of each segment
    :attr t_lb, t_ub: bounds of the inter-event time [s]
    :attr event: duration of an irrigation event [s]
    :attr multistart: number of inter-event times of the seeding grid
    """

    __slots__ = ()

    def __new__(cls, n1=8, n2=48, n3=8, t_lb=1800.0,
                t_ub=16 * SECONDS_PER_DAY, event=8 * 3600.0, multistart=8):
        self = super(HorizonSpec, cls).__new__(
            cls, int(n1), int(n2), int(n3), float(t_lb), float(t_ub),
            float(event), int(multistart))
        if min(self.n1, self.n2, self.n3) < 1:
            raise ParameterError("every segment needs at least one sample")
        if not 0 < self.t_lb < self.t_ub:
            raise ParameterError("expected 0 < t_lb < t_ub")
        if not self.event > 0:
            raise ParameterError("event duration must be positive")
        if self.multistart < 2:
            raise ParameterError("multistart grid needs two points or more")
        return self

    @property
    def N(self):
        """Total number of samples."""
        return self.n1 + self.n2 + self.n3


CostBreakdown = collections.namedtuple(
    'CostBreakdown', 'yield_cost water_cost time_cost upper_cost lower_cost'
    ' total')
CostBreakdown.__doc__ = """Terms of the scheduling cost and their sum."""

Rollout = collections.namedtuple(
    'Rollout', 'times outputs stress ky step_days state')
Rollout.__doc__ = """
Predicted horizon.

:attr times: sample times [s]
:attr outputs: root-zone heads, one row per sample
:attr stress: root-zone stress factor per sample
:attr ky: crop sensitivity factor per sample
:attr step_days: duration of every sample interval [days]
:attr state: model state at the end of the rollout
"""


class ScheduleDecision(collections.namedtuple(
        'ScheduleDecision',
        'u1 u3 T slack_upper slack_lower cost deficiency')):

    """
    Decision of one scheduling problem.

    :attr u1, u3: sprinkler rates of the first and second event [m/s]
    :attr T: time between the events [s]
    :attr slack_upper, slack_lower: zone slacks, one row per sample
    :attr cost: :class:`CostBreakdown`
    :attr deficiency: predicted yield deficiency over the horizon
    """

    __slots__ = ()

    @property
    def applies_water(self):
        """Flag indicating that the first event applies water."""
        return bool(np.any(self.u1 > 0))


ClosedLoopRecord = collections.namedtuple(
    'ClosedLoopRecord',
    'event_index t_start_s u_rates T_chosen_s water_m3 deficiency_increment'
    ' min_rootzone_head irrigated')


def root_zone_nodes(grid, layers):
    """Get the sorted ids of the nodes of the given (zero-based) layers."""
    if not len(layers):
        raise ParameterError("root zone needs at least one layer")
    for k in layers:
        if not 0 <= k < grid.nz:
            raise ParameterError("layer {} outside of 0..{}".format(
                k, grid.nz - 1))
    return np.sort(np.concatenate([grid.layer_nodes(k) for k in layers]))


def eliminate_slacks(outputs, zone):
    """
    Get the smallest nonnegative slacks that satisfy the zone constraints.

    :returns:
        Pair ``(upper, lower)`` of arrays shaped like ``outputs``
    """
    outputs = np.asarray(outputs, dtype=float)
    upper = np.maximum(0.0, outputs - zone.conservative_upper)
    lower = np.maximum(0.0, zone.conservative_lower - outputs)
    return upper, lower


def horizon_cost(rollout, decision, weights, zone, spec, u_ub):
    """
    Compute the scheduling cost of a predicted horizon.

    ``Q_y d^2 + Q_u (N1 sum u1 + N3 sum u3) / u_ub - Q_T N2 T / T_ub
    + sum(Q_upper e_upper^2 + Q_lower e_lower^2)`` where ``d`` is the yield
    deficiency of the horizon.

    :returns:
        :class:`CostBreakdown`
    """
    deficiency = cropmodel.yield_deficiency(
        rollout.stress, rollout.ky, rollout.step_days)
    upper, lower = eliminate_slacks(rollout.outputs, zone)
    water = (spec.n1 * np.sum(decision.u1)
             + spec.n3 * np.sum(decision.u3)) / u_ub
    terms = (
        weights.q_yield * deficiency ** 2,
        weights.q_water * water,
        -weights.q_time * spec.n2 * decision.T / spec.t_ub,
        weights.q_upper * float(np.sum(upper ** 2)),
        weights.q_lower * float(np.sum(lower ** 2)),
    )
    return CostBreakdown(*(terms + (float(sum(terms)),)))


_Segment = collections.namedtuple(
    '_Segment', 'times outputs stress ky step_days state')


class _HorizonCache(object):

    """Segments of the rollouts of one scheduling problem."""

    def __init__(self, scheduler, xi0, weather, t0):
        self.scheduler = scheduler
        self.xi0 = xi0
        self.weather = weather
        self.t0 = t0
        self._first = {}
        self._second = {}
        self._costs = {}

    def rollout(self, u1, T, u3):
        scheduler = self.scheduler
        spec = scheduler.spec
        key1 = u1.tobytes()
        first = self._first.get(key1)
        if first is None:
            first = self._first[key1] = scheduler._segment(
                self.xi0, self.t0, spec.event, spec.n1, u1, self.weather)
        key2 = (key1, T)
        second = self._second.get(key2)
        if second is None:
            second = self._second[key2] = scheduler._segment(
                first.state, self.t0 + spec.event, T, spec.n2, None,
                self.weather)
        third = scheduler._segment(
            second.state, self.t0 + spec.event + T, spec.event, spec.n3, u3,
            self.weather)
        parts = (first, second, third)
        return Rollout(*[np.concatenate([getattr(part, field)
                                         for part in parts])
                         for field in _Segment._fields[:-1]]
                       + [third.state])

    def cost(self, v, T):
        key = (v.tobytes(), T)
        if key not in self._costs:
            decision = self.scheduler._decision(v, T)
            try:
                rollout = self.rollout(decision.u1, T, decision.u3)
            except ComputationError as exc:
                _logger.debug("Rollout at T=%g s failed: %s", T, exc)
                self._costs[key] = _FAILED
            else:
                self._costs[key] = self.scheduler.horizon_cost(
                    rollout, decision).total
        return self._costs[key]


class Scheduler(object):

    """
    Planner of irrigation events over a (reduced) field model.

    :param model:
        :class:`~pivotsched.reduction.ReducedModel` or
        :class:`~pivotsched.field.FieldModel` used for predictions
    :param output_nodes:
        Ids of the root-zone nodes whose heads are constrained
    :param spec:
        :class:`HorizonSpec`
    :param weights:
        :class:`SchedulerWeights`
    :param zone:
        :class:`ZoneSpec`
    :param crop:
        :class:`~pivotsched.crop.CropModel` used for the yield term,
        by default the crop of the field model
    """

    def __init__(self, model, output_nodes, spec=None, weights=None,
                 zone=None, crop=None):
        self.model = model
        field = getattr(model, 'full', model)
        self.pivot = field.pivot
        self.crop = crop if crop is not None else field.crop
        self.output_nodes = np.asarray(output_nodes, dtype=int)
        self.spec = spec if spec is not None else HorizonSpec()
        self.weights = weights if weights is not None else SchedulerWeights()
        self.zone = zone if zone is not None else ZoneSpec()
        if not 0 < self.pivot.u_ub < math.inf:
            raise ParameterError("scheduling needs a finite positive u_ub")
        if not self.output_nodes.size:
            raise ParameterError("scheduling needs at least one output node")

    def __repr__(self):
        return "<Scheduler {!r} outputs={}>".format(
            self.model, self.output_nodes.size)

    @property
    def n_sprinklers(self):
        """Number of sprinkler rates per event."""
        return self.pivot.n_sprinklers

    def outputs(self, state):
        """Get the root-zone heads of a model state."""
        return self.model.lift(state)[..., self.output_nodes]

    def stress(self, outputs):
        """Get the root-zone stress factor of every row of ``outputs``."""
        outputs = np.atleast_2d(outputs)
        if self.crop is None:
            return np.ones(outputs.shape[0])
        return np.mean(
            cropmodel.stress_factor(outputs, self.crop.feddes), axis=1)

    def ky(self, times):
        """Get the crop sensitivity factor at the given times."""
        if self.crop is None:
            return np.zeros(np.size(times))
        return np.atleast_1d(self.crop.ky_at(np.asarray(times)))

    def _segment(self, state, start, duration, count, rates, weather):
        schedule = Schedule(self.n_sprinklers)
        if rates is not None:
            schedule.add(start, duration, rates)
        times = start + duration * np.arange(1, count + 1) / count
        previous = start
        states = []
        for time in times:
            state, _ = self.model.advance(
                state, previous, time - previous, schedule, weather)
            states.append(state)
            previous = time
        outputs = self.outputs(np.array(states))
        return _Segment(times, outputs, self.stress(outputs), self.ky(times),
                        np.diff(np.concatenate([[start], times]))
                        / SECONDS_PER_DAY, state)

    def _decision(self, v, T, rollout=None):
        n = self.n_sprinklers
        rates = np.clip(v * self.pivot.u_ub, self.pivot.u_lb, self.pivot.u_ub)
        decision = ScheduleDecision(rates[:n], rates[n:], float(T), None,
                                    None, None, None)
        if rollout is None:
            return decision
        upper, lower = eliminate_slacks(rollout.outputs, self.zone)
        cost = self.horizon_cost(rollout, decision)
        deficiency = cropmodel.yield_deficiency(
            rollout.stress, rollout.ky, rollout.step_days)
        return decision._replace(slack_upper=upper, slack_lower=lower,
                                 cost=cost, deficiency=deficiency)

    def rollout_horizon(self, xi0, decision, weather, t0=0.0):
        """
        Predict the horizon of a decision.

        :param xi0:
            Model state at ``t0``
        :param decision:
            :class:`ScheduleDecision`, only ``u1``, ``u3`` and ``T`` are used
        :param weather:
            Forcing with ``sample(t)`` and ``next_change(t)`` methods
        :returns:
            :class:`Rollout` with ``N1 + N2 + N3`` samples
        """
        self._check_bounds(decision)
        cache = _HorizonCache(self, np.asarray(xi0, dtype=float), weather, t0)
        return cache.rollout(np.asarray(decision.u1, dtype=float),
                             float(decision.T),
                             np.asarray(decision.u3, dtype=float))

    def horizon_cost(self, rollout, decision):
        """Get the :class:`CostBreakdown` of a rollout."""
        return horizon_cost(rollout, decision, self.weights, self.zone,
                            self.spec, self.pivot.u_ub)

    def _check_bounds(self, decision):
        for rates in (decision.u1, decision.u3):
            rates = np.asarray(rates, dtype=float)
            if rates.shape != (self.n_sprinklers,):
                raise ParameterError("expected {} sprinkler rates".format(
                    self.n_sprinklers))
            if (np.any(rates < self.pivot.u_lb)
                    or np.any(rates > self.pivot.u_ub)):
                raise ParameterError("sprinkler rates outside of bounds")
        if not self.spec.t_lb <= decision.T <= self.spec.t_ub:
            raise ParameterError("inter-event time outside of bounds")

    def optimize_rates(self, cache, T, start):
        """
        Find the best normalized rates at a fixed inter-event time.

        :returns:
            Pair of the rates (as fractions of ``u_ub``) and their cost
        """
        lower = self.pivot.u_lb / self.pivot.u_ub
        start = np.clip(start, lower, 1.0)
        bounds = [(lower, 1.0)] * start.size

        def objective(v):
            return cache.cost(np.asarray(v, dtype=float), T)

        def gradient(v):
            v = np.asarray(v, dtype=float)
            base = objective(v)
            grad = np.zeros_like(v)
            for index in range(v.size):
                step = FD_STEP if v[index] + FD_STEP <= 1.0 else -FD_STEP
                shifted = v.copy()
                shifted[index] += step
                grad[index] = (objective(shifted) - base) / step
            return grad

        if objective(start) >= _FAILED:
            return start, _FAILED
        result = minimize(objective, start, jac=gradient, method='L-BFGS-B',
                          bounds=bounds, options={'ftol': 1e-4})
        best = np.clip(result.x, lower, 1.0)
        # snap values at the bounds
        best = np.where(best - lower < 1e-6, lower, best)
        best = np.where(1.0 - best < 1e-6, 1.0, best)
        candidates = [(objective(best), 0, best), (objective(start), 1, start)]
        cost, _, best = min(candidates, key=lambda item: item[:2])
        _logger.debug("T=%.6g s: cost %.6g after %d iteration(s)",
                      T, cost, result.nit)
        return best, cost

    def solve_event(self, xi0, weather, t0=0.0, warm_start=None):
        """
        Solve the scheduling problem of one event.

        :param xi0:
            Model state at ``t0``
        :param weather:
            Forcing the prediction uses, typically a
            :class:`~pivotsched.weather.ForecastView`
        :param warm_start:
            Optional :class:`ScheduleDecision` whose rates seed the search
        :returns:
            :class:`ScheduleDecision`
        :raises SchedulingError:
            If no rollout could be integrated.
        """
        xi0 = np.asarray(xi0, dtype=float)
        if not np.all(np.isfinite(xi0)):
            raise ParameterError("initial state must be finite")
        spec = self.spec
        cache = _HorizonCache(self, xi0, weather, t0)
        if warm_start is not None:
            start = np.concatenate([warm_start.u1, warm_start.u3]) / (
                self.pivot.u_ub)
        else:
            start = np.zeros(2 * self.n_sprinklers)
        evaluated = {}

        def search(T):
            T = float(T)
            if T not in evaluated:
                evaluated[T] = self.optimize_rates(cache, T, start)
            return evaluated[T][1]

        seeds = np.linspace(spec.t_lb, spec.t_ub, spec.multistart)
        costs = [search(T) for T in seeds]
        best = int(np.argmin(costs))
        if costs[best] >= _FAILED:
            raise SchedulingError(
                "no rollout could be integrated at t={:.6g} s".format(t0))
        start = evaluated[float(seeds[best])][0]
        _golden_section(search, seeds[max(best - 1, 0)],
                        seeds[min(best + 1, seeds.size - 1)],
                        tol=(spec.t_ub - spec.t_lb) * 1e-3)
        T, (v, cost) = min(evaluated.items(), key=lambda item: item[1][1])
        decision = self._decision(v, T)
        decision = self._decision(
            v, T, cache.rollout(decision.u1, T, decision.u3))
        _logger.debug("Evaluated %d inter-event time(s)", len(evaluated))
        _logger.info("Decision at t=%.6g s: T=%.4g h, u1=%s, cost=%.6g",
                     t0, T / 3600.0, np.array2string(decision.u1),
                     decision.cost.total)
        return decision


def _golden_section(f, a, b, tol, max_iter=30):
    """Shrink ``[a, b]`` around a minimum of ``f``, return the best point."""
    if b - a <= tol:
        return a
    ratio = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - ratio * (b - a)
    d = a + ratio * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if abs(b - a) < tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - ratio * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + ratio * (b - a)
            fd = f(d)
    return c if fc < fd else d


DaysToZone = collections.namedtuple('DaysToZone', 'days capped')
DaysToZone.__doc__ = """
Drying time after an irrigation event.

:attr days: days until the root zone leaves the conservative zone
:attr capped: flag indicating that the zone was never left
"""


def days_to_zone(model, x0, u_amount, zone, output_nodes, weather,
                 event=None, cap_days=DAYS_TO_ZONE_CAP, dt_check=3600.0):
    """
    Get the time the root zone takes to dry out after one event.

    The field is irrigated with ``u_amount`` at every sprinkler during one
    event and then left to dry. The result is the first time at which the
    mean head of the output nodes falls below the conservative lower bound,
    linearly interpolated between checks.

    :param model:
        Field or reduced model, ``x0`` being its state
    :returns:
        :class:`DaysToZone`
    :raises ParameterError:
        If ``u_amount`` is outside of the pivot bounds.
    """
    field = getattr(model, 'full', model)
    pivot = field.pivot
    if not pivot.u_lb <= u_amount <= pivot.u_ub and u_amount != 0:
        raise ParameterError("amount {!r} outside of [{!r}, {!r}]".format(
            u_amount, pivot.u_lb, pivot.u_ub))
    event = pivot.rotation_period if event is None else event
    schedule = Schedule(pivot.n_sprinklers)
    if u_amount > 0:
        schedule.add(0.0, event, np.full(pivot.n_sprinklers, u_amount))
    output_nodes = np.asarray(output_nodes, dtype=int)
    threshold = zone.conservative_lower

    def level(state):
        return float(np.mean(model.lift(state)[output_nodes]))

    state = np.asarray(x0, dtype=float)
    previous = level(state)
    if previous < threshold:
        return DaysToZone(0.0, False)
    cap = cap_days * SECONDS_PER_DAY
    t = 0.0
    while t < cap:
        dt = min(dt_check, cap - t)
        state, _ = model.advance(state, t, dt, schedule, weather)
        current = level(state)
        if current < threshold:
            fraction = (previous - threshold) / (previous - current)
            return DaysToZone((t + fraction * dt) / SECONDS_PER_DAY, False)
        previous = current
        t += dt
    _logger.warning("Root zone stays above %g m for %g days at u=%g m/s",
                    threshold, cap_days, u_amount)
    return DaysToZone(float(cap_days), True)


def knee_estimate(amounts, days):
    """
    Locate the knee of a saturating days-to-zone curve.

    :returns:
        The first amount after which the marginal gain of days per unit of
        water drops below a quarter of the initial marginal gain, or None
    """
    amounts = np.asarray(amounts, dtype=float)
    days = np.asarray(days, dtype=float)
    if amounts.size < 3:
        return None
    gains = np.diff(days) / np.diff(amounts)
    if not gains[0] > 0:
        return None
    below = np.flatnonzero(gains[1:] < 0.25 * gains[0])
    return float(amounts[below[0] + 1]) if below.size else None


class ClosedLoopLog(object):

    """
    Record of a receding-horizon run.

    :attr records: one :class:`ClosedLoopRecord` per decision
    :attr decisions: the :class:`ScheduleDecision` of every record
    :attr times: sample times of the plant [s]
    :attr outputs: root-zone heads of the plant, one row per sample
    :attr stress, ky, step_days: yield-model inputs of every sample
    :attr state: plant state at the end of the run
    """

    def __init__(self):
        self.records = []
        self.decisions = []
        self._series = collections.defaultdict(list)
        self.state = None

    def __len__(self):
        return len(self.records)

    def __repr__(self):
        return "<ClosedLoopLog decisions={} events={}>".format(
            len(self), len(self.event_times))

    def append(self, record, decision, times, outputs, stress, ky,
               step_days):
        """Add a decision and the plant samples of its interval."""
        self.records.append(record)
        self.decisions.append(decision)
        for name, values in (('times', times), ('outputs', outputs),
                             ('stress', stress), ('ky', ky),
                             ('step_days', step_days)):
            self._series[name].append(values)

    def _joined(self, name):
        parts = self._series[name]
        return np.concatenate(parts) if parts else np.zeros(0)

    times = property(lambda self: self._joined('times'))
    outputs = property(lambda self: self._joined('outputs'))
    stress = property(lambda self: self._joined('stress'))
    ky = property(lambda self: self._joined('ky'))
    step_days = property(lambda self: self._joined('step_days'))

    @property
    def event_times(self):
        """Start times of the decisions that applied water [s]."""
        return np.array([r.t_start_s for r in self.records if r.irrigated])

    @property
    def water(self):
        """Total irrigation water [m3]."""
        return float(sum(r.water_m3 for r in self.records))

    @property
    def deficiency(self):
        """Total yield deficiency of the run."""
        return float(sum(r.deficiency_increment for r in self.records))

    def to_frame(self):
        """Get the records as a :class:`pandas.DataFrame`."""
        rows = [r._replace(u_rates=';'.join(repr(float(u))
                                            for u in r.u_rates))
                for r in self.records]
        return pd.DataFrame(rows, columns=ClosedLoopRecord._fields)

    def zone_summary(self, zone):
        """
        Summarize how well the zone was maintained.

        :returns:
            Ordered mapping with the fraction of root-zone samples above the
            actual and the conservative lower bound, the number of events and
            the mean, standard deviation and coefficient of variation of the
            spacing between events [days]
        """
        outputs = self.outputs
        spacing = np.diff(self.event_times) / SECONDS_PER_DAY
        mean = float(spacing.mean()) if spacing.size else math.nan
        std = float(spacing.std()) if spacing.size else math.nan
        return collections.OrderedDict([
            ('above_lower', float(np.mean(outputs >= zone.lower))),
            ('above_conservative_lower',
             float(np.mean(outputs >= zone.conservative_lower))),
            ('events', int(self.event_times.size)),
            ('water_m3', self.water),
            ('deficiency', self.deficiency),
            ('spacing_mean_days', mean),
            ('spacing_std_days', std),
            ('spacing_cv', std / mean if spacing.size and mean > 0
             else math.nan),
        ])


def receding_horizon_run(plant, scheduler, series, x0, Ts, season_days=None,
                         dt_out=3600.0):
    """
    Run the closed loop over a season.

    At every decision time the scheduler plans with the forecast view of the
    weather, the first event is applied to the plant (the full-order model
    driven by the accurate weather) and the next decision is taken at the
    next planned event or ``Ts`` days later, whichever comes first.

    The next planned event starts ``event + T`` after the decision, where
    ``event`` is the length of the applied event, so the re-solve time is
    ``t + event + T`` rather than ``t + T``: T counts from the end of the
    applied event. Decisions never come sooner than one event apart.

    :param plant:
        :class:`~pivotsched.field.FieldModel`
    :param scheduler:
        :class:`Scheduler`, predicting with the reduced model of ``plant``
    :param series:
        :class:`~pivotsched.weather.WeatherSeries`
    :param Ts:
        Length of the accurate forecast [days], positive
    :param season_days:
        Length of the run, by default the length of the weather series
    :returns:
        :class:`ClosedLoopLog`
    """
    if not Ts > 0:
        raise ParameterError("Ts must be positive")
    season_days = series.season_length if season_days is None else (
        season_days)
    end = season_days * SECONDS_PER_DAY
    event = scheduler.spec.event
    wetted = plant.grid.surface_areas()[:, 0]
    log = ClosedLoopLog()
    state = np.asarray(x0, dtype=float)
    t = 0.0
    decision = None
    while t < end:
        view = forecast_view(series, t / SECONDS_PER_DAY, Ts)
        decision = scheduler.solve_event(
            scheduler.model.reduce(state), view, t, warm_start=decision)
        t_next = min(t + event + decision.T,
                     t + max(Ts * SECONDS_PER_DAY, event), end)
        schedule = Schedule(plant.pivot.n_sprinklers)
        applied = min(event, t_next - t)
        irrigated = decision.applies_water
        if irrigated:
            schedule.add(t, applied, decision.u1)
        trajectory = plant.simulate(state, schedule, series, t_next - t,
                                    dt_out, t0=t)
        state = trajectory.states[-1]
        times = trajectory.times[1:]
        outputs = trajectory.states[1:, scheduler.output_nodes]
        stress = scheduler.stress(outputs)
        ky = scheduler.ky(times)
        step_days = np.diff(trajectory.times) / SECONDS_PER_DAY
        increment = cropmodel.yield_deficiency(stress, ky, step_days)
        water = applied * float(np.sum(decision.u1 * wetted)) if (
            irrigated) else 0.0
        record = ClosedLoopRecord(
            len(log), t, tuple(decision.u1), decision.T, water, increment,
            float(outputs.min()), irrigated)
        log.append(record, decision, times, outputs, stress, ky, step_days)
        if float(outputs.min()) < scheduler.zone.lower:
            _logger.warning("Root zone left the zone before t=%.6g s", t_next)
        _logger.info("Decision %d at day %.3f: water %.4g m3, next at"
                     " day %.3f", record.event_index, t / SECONDS_PER_DAY,
                     water, t_next / SECONDS_PER_DAY)
        t = t_next
    log.state = state
    return log
