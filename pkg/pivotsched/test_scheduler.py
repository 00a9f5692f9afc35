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

"""Tests for the irrigation scheduler."""

import itertools
import math
import unittest
from unittest import mock

import numpy as np

from pivotsched import hydraulics
from pivotsched.crop import CropCalendar
from pivotsched.crop import CropModel
from pivotsched.errors import ParameterError
from pivotsched.field import FieldModel
from pivotsched.field import PivotConfig
from pivotsched.field import Schedule
from pivotsched.field import WeatherSample
from pivotsched.field import build_grid
from pivotsched.scheduler import ClosedLoopLog
from pivotsched.scheduler import ClosedLoopRecord
from pivotsched.scheduler import HorizonSpec
from pivotsched.scheduler import Rollout
from pivotsched.scheduler import ScheduleDecision
from pivotsched.scheduler import Scheduler
from pivotsched.scheduler import SchedulerWeights
from pivotsched.scheduler import ZoneSpec
from pivotsched.scheduler import days_to_zone
from pivotsched.scheduler import eliminate_slacks
from pivotsched.scheduler import horizon_cost
from pivotsched.scheduler import knee_estimate
from pivotsched.scheduler import receding_horizon_run
from pivotsched.scheduler import root_zone_nodes
from pivotsched.weather import WeatherSeries

HOUR = 3600.0
DAY = 86400.0
LOAM = hydraulics.SOILS['loam']


def _column(bottom='free', crop=None):
    """Get a single soil column watered by a two-hour pivot."""
    grid = build_grid(1.0, 0.4, 1, 1, 4)
    pivot = PivotConfig(2 * HOUR, 1, 0.0, 2.5e-6)
    return FieldModel(grid, LOAM, pivot, crop, bottom=bottom)


def _hydrostatic(grid, top=-1.5):
    return np.broadcast_to(top + grid.z, grid.shape).ravel().copy()


class CostTests(unittest.TestCase):

    """Tests for the scheduling cost."""

    def setUp(self):
        """Common initialization method."""
        self.zone = ZoneSpec()
        self.spec = HorizonSpec(n1=2, n2=3, n3=2, t_lb=HOUR, t_ub=10 * DAY,
                                event=2 * HOUR)

    def test_slacks_are_minimal(self):
        """Eliminated slacks are the smallest feasible ones."""
        candidates = np.linspace(0.0, 5.0, 50001)
        for y in (-4.0, -2.8, -2.0, -1.0, -0.5, 0.3):
            upper, lower = eliminate_slacks([y], self.zone)
            feasible_upper = candidates[
                y - candidates <= self.zone.conservative_upper]
            feasible_lower = candidates[
                y + candidates >= self.zone.conservative_lower]
            self.assertAlmostEqual(upper[0], feasible_upper.min(), delta=1e-4)
            self.assertAlmostEqual(lower[0], feasible_lower.min(), delta=1e-4)

    def test_slacks_match_enumeration(self):
        """Eliminated slacks minimize the penalty over every active set."""
        rng = np.random.default_rng(5)
        spec = HorizonSpec(n1=1, n2=1, n3=1, t_lb=HOUR, t_ub=DAY)
        decision = ScheduleDecision(np.zeros(1), np.zeros(1), HOUR,
                                    None, None, None, None)
        for _ in range(50):
            cl = rng.uniform(-3.0, -1.5)
            zone = ZoneSpec(conservative_lower=cl,
                            conservative_upper=rng.uniform(cl + 0.1, -0.3))
            weights = SchedulerWeights(q_upper=rng.uniform(0.01, 10.0),
                                       q_lower=rng.uniform(0.01, 100.0))
            y = rng.uniform(-4.0, 0.5, 3)
            best = math.inf
            for active in itertools.product((False, True), repeat=6):
                upper = np.where(active[:3], y - zone.conservative_upper, 0.0)
                lower = np.where(active[3:], zone.conservative_lower - y, 0.0)
                if (np.any(upper < 0) or np.any(lower < 0)
                        or np.any(y - upper > zone.conservative_upper + 1e-12)
                        or np.any(y + lower
                                  < zone.conservative_lower - 1e-12)):
                    continue
                best = min(best, weights.q_upper * np.sum(upper ** 2) +
                           weights.q_lower * np.sum(lower ** 2))
            rollout = Rollout(np.arange(3.0), y[:, None], np.ones(3),
                              np.zeros(3), np.ones(3), None)
            cost = horizon_cost(rollout, decision, weights, zone, spec,
                                2.5e-6)
            self.assertAlmostEqual(cost.upper_cost + cost.lower_cost, best,
                                   delta=1e-10)

    def test_cost_terms(self):
        """Water costs, a long dry spell pays and the zone is enforced."""
        outputs = np.full((7, 2), -2.0)
        outputs[3, 0] = -0.5
        rollout = Rollout(np.arange(7.0), outputs, np.ones(7), np.ones(7),
                          np.ones(7), None)
        decision = ScheduleDecision(np.array([2.5e-6]), np.zeros(1), 5 * DAY,
                                    None, None, None, None)
        cost = horizon_cost(rollout, decision, SchedulerWeights(), self.zone,
                            self.spec, 2.5e-6)
        self.assertEqual(cost.yield_cost, 0.0)
        self.assertAlmostEqual(cost.water_cost, 2.0)
        self.assertAlmostEqual(cost.time_cost, -1.5)
        self.assertAlmostEqual(cost.upper_cost, 0.25)
        self.assertEqual(cost.lower_cost, 0.0)
        self.assertAlmostEqual(cost.total, 0.75)

    def test_yield_term(self):
        """Stress is penalized through the squared yield deficiency."""
        rollout = Rollout(np.arange(2.0), np.full((2, 1), -2.0),
                          np.array([0.5, 1.0]), np.array([2.0, 2.0]),
                          np.array([1.0, 1.0]), None)
        decision = ScheduleDecision(np.zeros(1), np.zeros(1), HOUR,
                                    None, None, None, None)
        cost = horizon_cost(rollout, decision, SchedulerWeights(q_yield=3.0),
                            self.zone, self.spec, 2.5e-6)
        self.assertAlmostEqual(cost.yield_cost, 3.0)

    def test_invalid_settings(self):
        """Zones, weights and horizons are validated."""
        with self.assertRaises(ParameterError):
            ZoneSpec(conservative_lower=-3.5)
        with self.assertRaises(ParameterError):
            SchedulerWeights(q_water=-1.0)
        with self.assertRaises(ParameterError):
            HorizonSpec(t_lb=DAY, t_ub=HOUR)
        with self.assertRaises(ParameterError):
            HorizonSpec(multistart=1)
        self.assertEqual(HorizonSpec().N, 64)


class SchedulerTests(unittest.TestCase):

    """Tests for the Scheduler class."""

    def setUp(self):
        """Common initialization method."""
        self.spec = HorizonSpec(n1=2, n2=2, n3=2, t_lb=HOUR, t_ub=DAY,
                                event=2 * HOUR, multistart=3)

    def test_root_zone_nodes(self):
        """Root-zone nodes are the nodes of the output layers."""
        grid = build_grid(1.0, 0.4, 2, 3, 4)
        nodes = root_zone_nodes(grid, [0, 1])
        self.assertEqual(nodes.size, 12)
        self.assertEqual(nodes[:2].tolist(), [0, 1])
        with self.assertRaises(ParameterError):
            root_zone_nodes(grid, [4])
        with self.assertRaises(ParameterError):
            root_zone_nodes(grid, [])

    def test_equilibrium(self):
        """A field at rest inside the zone is left alone."""
        model = _column(bottom='sealed')
        scheduler = Scheduler(model, root_zone_nodes(model.grid, [0, 1]),
                              self.spec)
        decision = scheduler.solve_event(_hydrostatic(model.grid),
                                         WeatherSample())
        np.testing.assert_array_equal(decision.u1, [0.0])
        np.testing.assert_array_equal(decision.u3, [0.0])
        self.assertEqual(decision.T, DAY)
        self.assertFalse(decision.applies_water)
        self.assertEqual(decision.deficiency, 0.0)
        self.assertAlmostEqual(decision.cost.total, -2.0)

    def test_dry_field_is_watered(self):
        """A field below the zone gets water and beats doing nothing."""
        model = _column()
        scheduler = Scheduler(model, root_zone_nodes(model.grid, [0, 1]),
                              self.spec)
        x0 = np.full(model.grid.n, -3.5)
        decision = scheduler.solve_event(x0, WeatherSample())
        self.assertTrue(decision.applies_water)
        self.assertTrue(np.all(decision.u1 <= 2.5e-6))
        self.assertTrue(self.spec.t_lb <= decision.T <= self.spec.t_ub)
        for T in np.linspace(self.spec.t_lb, self.spec.t_ub, 3):
            idle = ScheduleDecision(np.zeros(1), np.zeros(1), T,
                                    None, None, None, None)
            rollout = scheduler.rollout_horizon(x0, idle, WeatherSample())
            self.assertLess(decision.cost.total,
                            scheduler.horizon_cost(rollout, idle).total)
        rollout = scheduler.rollout_horizon(x0, decision, WeatherSample())
        self.assertEqual(rollout.outputs.shape, (self.spec.N, 2))
        np.testing.assert_array_equal(
            decision.slack_lower, eliminate_slacks(rollout.outputs,
                                                   scheduler.zone)[1])

    def _grid_best(self, scheduler, x0, rates, times):
        best = math.inf
        for u1, u3, T in itertools.product(rates, rates, times):
            decision = ScheduleDecision(np.array([u1]), np.array([u3]), T,
                                        None, None, None, None)
            rollout = scheduler.rollout_horizon(x0, decision,
                                                WeatherSample())
            best = min(best, scheduler.horizon_cost(rollout, decision).total)
        return best

    def test_beats_dense_grid(self):
        """The solution is no worse than a grid of rates and times."""
        model = _column()
        spec = self.spec._replace(multistart=5)
        scheduler = Scheduler(model, root_zone_nodes(model.grid, [0, 1]),
                              spec)
        x0 = np.full(model.grid.n, -3.5)
        decision = scheduler.solve_event(x0, WeatherSample())
        best = self._grid_best(scheduler, x0, np.linspace(0.0, 2.5e-6, 5),
                               np.linspace(spec.t_lb, spec.t_ub, 5))
        self.assertLessEqual(decision.cost.total, best + 1e-9 * abs(best))

    def test_rates_beat_grid(self):
        """At a fixed inter-event time the rates beat a fine rate grid."""
        model = _column()
        spec = self.spec._replace(t_lb=DAY - 60.0, multistart=2)
        scheduler = Scheduler(model, root_zone_nodes(model.grid, [0, 1]),
                              spec)
        x0 = np.full(model.grid.n, -3.5)
        decision = scheduler.solve_event(x0, WeatherSample())
        best = self._grid_best(scheduler, x0, np.linspace(0.0, 2.5e-6, 11),
                               [decision.T])
        self.assertLessEqual(decision.cost.total, best + 1e-9 * abs(best))

    def test_water_weight(self):
        """A heavier water weight never buys more water."""
        model = _column()
        x0 = np.full(model.grid.n, -3.5)
        water = []
        for q_water in (0.1, 10.0):
            scheduler = Scheduler(model, root_zone_nodes(model.grid, [0, 1]),
                                  self.spec, SchedulerWeights(q_water=q_water))
            decision = scheduler.solve_event(x0, WeatherSample())
            water.append(self.spec.n1 * np.sum(decision.u1) +
                         self.spec.n3 * np.sum(decision.u3))
        self.assertGreater(water[0], 0.0)
        self.assertLessEqual(water[1], water[0] + 1e-15)

    def test_rollout_bounds(self):
        """Decisions outside of the bounds are rejected."""
        model = _column()
        scheduler = Scheduler(model, [0], self.spec)
        decision = ScheduleDecision(np.array([1e-5]), np.zeros(1), HOUR,
                                    None, None, None, None)
        with self.assertRaises(ParameterError):
            scheduler.rollout_horizon(np.full(4, -2.0), decision,
                                      WeatherSample())
        with self.assertRaises(ParameterError):
            scheduler.rollout_horizon(
                np.full(4, -2.0), decision._replace(u1=np.zeros(1), T=2 * DAY),
                WeatherSample())

    def test_unbounded_pivot(self):
        """Scheduling needs a finite upper rate."""
        grid = build_grid(1.0, 0.4, 1, 1, 4)
        model = FieldModel(grid, LOAM, PivotConfig(2 * HOUR, 1))
        with self.assertRaises(ParameterError):
            Scheduler(model, [0])


class DaysToZoneTests(unittest.TestCase):

    """Tests for the drying time after one event."""

    def setUp(self):
        """Common initialization method."""
        crop = CropModel(CropCalendar.constant(5, L=0.2))
        self.model = _column(crop=crop)
        self.nodes = root_zone_nodes(self.model.grid, [0, 1])
        self.weather = WeatherSample(PET=5e-3 / DAY)

    def test_monotonic(self):
        """More water keeps the root zone wet longer."""
        x0 = np.full(self.model.grid.n, -2.0)
        days = [days_to_zone(self.model, x0, u, ZoneSpec(), self.nodes,
                             self.weather).days
                for u in (0.0, 0.5e-6, 1e-6, 2e-6)]
        self.assertGreater(days[0], 0.0)
        self.assertEqual(days, sorted(days))
        self.assertGreater(days[-1], days[0])

    def test_already_dry(self):
        """A dry root zone needs no time to leave the zone."""
        x0 = np.full(self.model.grid.n, -3.0)
        result = days_to_zone(self.model, x0, 0.0, ZoneSpec(), self.nodes,
                              self.weather)
        self.assertEqual(result.days, 0.0)
        self.assertFalse(result.capped)

    def test_cap(self):
        """Without demand the drying time is capped."""
        model = _column(bottom='sealed')
        result = days_to_zone(model, _hydrostatic(model.grid), 0.0,
                              ZoneSpec(), self.nodes, WeatherSample(),
                              cap_days=1.0)
        self.assertTrue(result.capped)
        self.assertEqual(result.days, 1.0)

    def test_amount_bounds(self):
        """Amounts above the pivot capacity are rejected."""
        with self.assertRaises(ParameterError):
            days_to_zone(self.model, np.full(4, -2.0), 1e-5, ZoneSpec(),
                         self.nodes, self.weather)

    def test_knee(self):
        """The knee is where the marginal gain collapses."""
        self.assertEqual(knee_estimate([0, 1, 2, 3, 4], [0, 4, 8, 9, 9.5]),
                         3.0)
        self.assertIsNone(knee_estimate([0, 1], [0, 1]))
        self.assertIsNone(knee_estimate([0, 1, 2], [1, 1, 1]))
        self.assertIsNone(knee_estimate([0, 1, 2], [0, 1, 2]))


class ClosedLoopTests(unittest.TestCase):

    """Tests for the receding-horizon loop."""

    def test_zone_summary(self):
        """Event spacing statistics come from the irrigated records."""
        log = ClosedLoopLog()
        for index, (day, irrigated) in enumerate(
                [(0, True), (1, False), (2, True), (5, True)]):
            record = ClosedLoopRecord(index, day * DAY, (1e-6,), DAY,
                                      2.0 if irrigated else 0.0, 0.01, -2.0,
                                      irrigated)
            log.append(record, None, np.array([day * DAY + HOUR]),
                       np.array([[-2.0 - index]]), np.ones(1), np.ones(1),
                       np.ones(1) / 24)
        summary = log.zone_summary(ZoneSpec())
        self.assertEqual(summary['events'], 3)
        self.assertAlmostEqual(summary['water_m3'], 6.0)
        self.assertAlmostEqual(summary['deficiency'], 0.04)
        self.assertAlmostEqual(summary['spacing_mean_days'], 2.5)
        self.assertAlmostEqual(summary['spacing_std_days'], 0.5)
        self.assertAlmostEqual(summary['spacing_cv'], 0.2)
        self.assertAlmostEqual(summary['above_lower'], 0.5)
        self.assertAlmostEqual(summary['above_conservative_lower'], 0.25)
        self.assertEqual(list(log.to_frame().columns),
                         list(ClosedLoopRecord._fields))

    def test_idle_season(self):
        """A field at rest is never watered and is sampled every hour."""
        model = _column(bottom='sealed')
        spec = HorizonSpec(n1=1, n2=2, n3=1, t_lb=HOUR, t_ub=DAY,
                           event=2 * HOUR, multistart=2)
        scheduler = Scheduler(model, root_zone_nodes(model.grid, [0, 1]),
                              spec)
        log = receding_horizon_run(model, scheduler,
                                   WeatherSeries.constant(2),
                                   _hydrostatic(model.grid), Ts=1)
        self.assertEqual(len(log), 2)
        self.assertEqual([r.t_start_s for r in log.records], [0.0, DAY])
        self.assertEqual(log.water, 0.0)
        self.assertEqual(log.event_times.size, 0)
        self.assertEqual(log.times.size, 48)
        self.assertEqual(log.times[-1], 2 * DAY)
        self.assertTrue(np.all(np.diff(log.times) > 0))
        self.assertTrue(math.isnan(log.zone_summary(ZoneSpec())['spacing_cv']))
        with self.assertRaises(ParameterError):
            receding_horizon_run(model, scheduler, WeatherSeries.constant(2),
                                 _hydrostatic(model.grid), Ts=0)

    def _season(self, model, spec, days=2, pet_mm=5.0):
        scheduler = Scheduler(model, root_zone_nodes(model.grid, [0, 1]),
                              spec)
        series = WeatherSeries.constant(days, pet_mm=pet_mm)
        return scheduler, series

    def test_water_accounting(self):
        """Logged water is what the applied events bring to the plant."""
        model = _column(crop=CropModel(CropCalendar.constant(2, L=0.3)))
        spec = HorizonSpec(n1=1, n2=2, n3=1, t_lb=HOUR, t_ub=DAY,
                           event=2 * HOUR, multistart=2)
        scheduler, series = self._season(model, spec)
        plan = itertools.cycle([
            ScheduleDecision(np.array([1e-6]), np.zeros(1), 6 * HOUR,
                             None, None, None, None),
            ScheduleDecision(np.zeros(1), np.array([1e-6]), 10 * HOUR,
                             None, None, None, None),
            ScheduleDecision(np.array([2e-6]), np.zeros(1), DAY,
                             None, None, None, None),
        ])
        x0 = np.full(model.grid.n, -2.5)
        with mock.patch.object(scheduler, 'solve_event') as solve_event:
            solve_event.side_effect = lambda *args, **kwargs: next(plan)
            log = receding_horizon_run(model, scheduler, series, x0, Ts=1)
        self.assertEqual(solve_event.call_count, 4)
        starts = [r.t_start_s for r in log.records]
        self.assertEqual(starts, [0.0, 8 * HOUR, 20 * HOUR, 44 * HOUR])
        self.assertEqual([r.irrigated for r in log.records],
                         [True, False, True, True])
        area = float(model.grid.surface_areas()[0, 0])
        ends = starts[1:] + [2 * DAY]
        schedule = Schedule(1)
        expected = 0.0
        for record, end in zip(log.records, ends):
            if record.irrigated:
                applied = min(spec.event, end - record.t_start_s)
                expected += applied * sum(record.u_rates) * area
                schedule.add(record.t_start_s, applied, record.u_rates)
        self.assertAlmostEqual(log.water / expected, 1.0, places=12)
        self.assertAlmostEqual(log.water / (8 * HOUR * 1e-6 * area), 1.0,
                               places=12)
        inflow = model.simulate(x0, schedule, series, 2 * DAY,
                                HOUR).balance.inflow
        self.assertAlmostEqual(inflow / log.water, 1.0, places=9)

    def test_deterministic(self):
        """Two runs of the same season give the same log."""
        model = _column(crop=CropModel(CropCalendar.constant(1, L=0.3)))
        spec = HorizonSpec(n1=1, n2=2, n3=1, t_lb=6 * HOUR, t_ub=DAY,
                           event=2 * HOUR, multistart=2)
        scheduler, series = self._season(model, spec, days=1)
        x0 = np.full(model.grid.n, -3.0)
        first, second = [
            receding_horizon_run(model, scheduler, series, x0, Ts=1)
            for _ in range(2)]
        self.assertTrue(first.event_times.size)
        self.assertEqual(first.records, second.records)
        np.testing.assert_array_equal(first.outputs, second.outputs)
        np.testing.assert_array_equal(first.state, second.state)
