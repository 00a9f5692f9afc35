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

"""Tests for the field model."""

import math
import os
import tempfile
import unittest

import numpy as np

from pivotsched import hydraulics
from pivotsched.crop import CropCalendar
from pivotsched.crop import CropModel
from pivotsched.errors import NumericError
from pivotsched.errors import ParameterError
from pivotsched.errors import ShapeError
from pivotsched.errors import StiffnessError
from pivotsched.errors import ValidationError
from pivotsched.field import FieldModel
from pivotsched.field import FieldState
from pivotsched.field import PivotConfig
from pivotsched.field import Schedule
from pivotsched.field import WeatherSample
from pivotsched.field import build_grid
from pivotsched.field import check_finite
from pivotsched.field import load_schedule
from pivotsched.field import pivot_input_mask

LOAM = hydraulics.SOILS['loam']
HOUR = 3600.0


def _column_oracle(soil, h0, dz, hours, dh_max):
    """Integrate a free-draining soil column node by node."""
    h = [float(v) for v in h0]
    nz = len(h)
    states = [list(h)]
    for hour in range(hours):
        t, t_end = hour * HOUR, (hour + 1) * HOUR
        while t < t_end:
            K = [hydraulics.hydraulic_conductivity(v, soil) for v in h]
            c = [hydraulics.capillary_capacity(v, soil) for v in h]
            faces = [0.5 * (K[k] + K[k + 1]) for k in range(nz - 1)]
            down = [faces[k] * (1.0 - (h[k + 1] - h[k]) / dz)
                    for k in range(nz - 1)]
            flux_in = [0.0] + down
            flux_out = down + [K[-1]]
            rate = [(flux_in[k] - flux_out[k]) / (dz * c[k])
                    for k in range(nz)]
            touching = [0.0] * nz
            for k in range(nz - 1):
                touching[k] += faces[k]
                touching[k + 1] += faces[k]
            dt = min(t_end - t,
                     min(c[k] * dz * dz / touching[k] for k in range(nz)))
            peak = max(abs(r) for r in rate)
            if peak > 0:
                dt = min(dt, dh_max / peak)
            h = [h[k] if flux_in[k] == flux_out[k]
                 else float(hydraulics.head_at_stored_water(
                     hydraulics.stored_water(h[k], soil)
                     + dt * (flux_in[k] - flux_out[k]) / dz, soil))
                 for k in range(nz)]
            t = t_end if dt == t_end - t else t + dt
        states.append(list(h))
    return np.array(states)


class GridTests(unittest.TestCase):

    """Tests for the CylGrid class."""

    def setUp(self):
        """Common initialization method."""
        self.grid = build_grid(50.0, 0.3, 3, 16, 4)

    def test_numbering(self):
        """Node ids vary fastest with the layer."""
        self.assertEqual(self.grid.n, 192)
        self.assertEqual(self.grid.node_id(0, 0, 1), 1)
        self.assertEqual(self.grid.node_id(0, 1, 0), 4)
        self.assertEqual(self.grid.node_id(1, 0, 0), 64)
        self.assertEqual(self.grid.index_of(64 + 4 * 3 + 2), (1, 3, 2))
        np.testing.assert_array_equal(
            self.grid.ring_layer_nodes(2, 3), 128 + 3 + 4 * np.arange(16))

    def test_geometry(self):
        """Volumes add up to the cylinder."""
        self.assertAlmostEqual(self.grid.volumes().sum(),
                               math.pi * 50.0 ** 2 * 0.3, places=6)
        self.assertAlmostEqual(self.grid.surface_areas().sum(),
                               math.pi * 50.0 ** 2, places=6)

    def test_preconditions(self):
        """Grids need a ring, a sector and two layers."""
        for shape in [(0, 1, 2), (1, 0, 2), (1, 1, 1)]:
            with self.assertRaises(ParameterError):
                build_grid(1.0, 1.0, *shape)
        with self.assertRaises(ParameterError):
            build_grid(-1.0, 1.0, 1, 1, 2)
        with self.assertRaises(ParameterError):
            self.grid.node_id(3, 0, 0)

    def test_state(self):
        """FieldState is read-only and checked for non-finite heads."""
        state = FieldState.uniform(self.grid, -2.0)
        self.assertEqual(len(state), 192)
        with self.assertRaises(ValueError):
            state.x[0] = 0.0
        with self.assertRaises(ShapeError):
            FieldState(np.zeros(3), self.grid)
        with self.assertRaises(NumericError) as cm:
            check_finite(np.array([0.0, -1.0, np.nan]))
        self.assertEqual(cm.exception.node, 2)


class PivotTests(unittest.TestCase):

    """Tests for the pivot and its input mask."""

    def setUp(self):
        """Common initialization method."""
        self.pivot = PivotConfig(8 * HOUR, 3, 0.0, 2.5e-6)
        self.grid = build_grid(50.0, 0.3, 3, 16, 4)

    def test_sector(self):
        """The pivot dwells P / Ntheta over every sector."""
        self.assertEqual(self.pivot.dwell(16), 1800.0)
        self.assertEqual(self.pivot.sector_at(0.0, 16), 0)
        self.assertEqual(self.pivot.sector_at(1799.0, 16), 0)
        self.assertEqual(self.pivot.sector_at(1800.0, 16), 1)
        self.assertEqual(self.pivot.sector_at(8 * HOUR + 3600.0, 16), 2)
        self.assertEqual(self.pivot.next_switch(100.0, 16), 1800.0)
        self.assertEqual(self.pivot.next_switch(1800.0, 16), 3600.0)

    def test_phase(self):
        """The phase shifts the sector sequence."""
        pivot = PivotConfig(8 * HOUR, 3, phase=3 * 1800.0)
        self.assertEqual(pivot.sector_at(3 * 1800.0, 16), 0)
        self.assertEqual(pivot.sector_at(0.0, 16), 13)

    def test_mask(self):
        """Only the surface nodes under the pivot may be watered."""
        mask = pivot_input_mask(1800.0 * 5 + 1.0, self.grid, self.pivot)
        self.assertEqual(mask.sector, 5)
        np.testing.assert_array_equal(
            mask.active, [self.grid.node_id(i, 5, 0) for i in range(3)])
        self.assertEqual(mask.upper[:, 5].tolist(), [2.5e-6] * 3)

    def test_invalid(self):
        """Invalid pivots raise ParameterError."""
        with self.assertRaises(ParameterError):
            PivotConfig(0.0, 3)
        with self.assertRaises(ParameterError):
            PivotConfig(HOUR, 3, 1e-6, 1e-7)


class ScheduleTests(unittest.TestCase):

    """Tests for the Schedule class."""

    def test_events(self):
        """Commands are on during events only."""
        schedule = Schedule(2).add(100.0, 50.0, [1e-6, 2e-6])
        self.assertIsNone(schedule.commands_at(99.0))
        self.assertEqual(schedule.commands_at(100.0).tolist(), [1e-6, 2e-6])
        self.assertIsNone(schedule.commands_at(150.0))
        self.assertEqual(schedule.next_change(0.0), 100.0)
        self.assertEqual(schedule.next_change(100.0), 150.0)
        self.assertEqual(schedule.next_change(150.0), math.inf)

    def test_constant(self):
        """A constant schedule is on at all times."""
        schedule = Schedule.constant([1e-6, 2e-6])
        self.assertEqual(schedule.events[0][:2], (-math.inf, math.inf))
        for t in (-1e9, 0.0, 1e9):
            self.assertEqual(schedule.commands_at(t).tolist(), [1e-6, 2e-6])
        self.assertEqual(schedule.next_change(0.0), math.inf)
        with self.assertRaises(ParameterError):
            schedule.add(0.0, 10.0, [0.0, 0.0])

    def test_overlap(self):
        """Overlapping events raise ParameterError."""
        schedule = Schedule(1).add(0.0, 10.0, [1e-6])
        with self.assertRaises(ParameterError):
            schedule.add(5.0, 10.0, [1e-6])
        with self.assertRaises(ShapeError):
            schedule.add(20.0, 10.0, [1e-6, 1e-6])
        with self.assertRaises(ParameterError):
            schedule.add(20.0, 10.0, [-1e-6])

    def test_load(self):
        """Schedules are read from CSV files."""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'events.csv')
            with open(path, 'wt') as stream:
                stream.write("start_h,duration_h,rate_0,rate_1\n"
                             "0,8,1e-6,2e-6\n24,8,0,1e-6\n")
            schedule = load_schedule(path, 2)
            self.assertEqual(len(schedule.events), 2)
            self.assertEqual(schedule.commands_at(25 * HOUR).tolist(),
                             [0.0, 1e-6])
            with open(path, 'wt') as stream:
                stream.write("start_h,duration_h,rate\n0,8,1e-6\n4,8,1e-6\n")
            with self.assertRaises(ValidationError) as cm:
                load_schedule(path, 2)
            self.assertEqual(cm.exception.line, 3)


class FieldModelTests(unittest.TestCase):

    """Tests for the discretized Richards equation."""

    def setUp(self):
        """Common initialization method."""
        self.grid = build_grid(10.0, 0.3, 2, 4, 3)
        self.pivot = PivotConfig(8 * HOUR, 2, 0.0, 2.5e-6)
        self.model = FieldModel(self.grid, LOAM, self.pivot)

    def test_minimal_field(self):
        """A (1,1,2) field simulates two nodes."""
        grid = build_grid(1.0, 0.2, 1, 1, 2)
        model = FieldModel(grid, LOAM, PivotConfig(HOUR, 1))
        trajectory = model.simulate(
            np.full(2, -1.0), Schedule(1), WeatherSample(), 2 * HOUR, HOUR)
        self.assertEqual(trajectory.states.shape, (3, 2))
        np.testing.assert_array_equal(trajectory.times, [0, HOUR, 2 * HOUR])

    def test_hydrostatic_equilibrium(self):
        """A hydrostatic profile over a sealed bottom does not move."""
        model = FieldModel(self.grid, LOAM, self.pivot, bottom='sealed')
        profile = -1.0 + self.grid.z
        x0 = np.broadcast_to(profile, self.grid.shape).ravel()
        rate = model.rhs(x0, None, WeatherSample(), 0.0)
        np.testing.assert_allclose(rate, 0.0, atol=1e-15)

    def test_gravity_drainage(self):
        """A uniform profile drains downwards."""
        x0 = np.full(self.grid.n, -1.0)
        rate = self.model.rhs(x0, None, WeatherSample(), 0.0).reshape(
            self.grid.shape)
        self.assertTrue(np.all(rate[:, :, 0] < 0))
        budget = self.model.flux_budget(x0, None, WeatherSample(), 0.0)
        self.assertEqual(budget.inflow, 0.0)
        self.assertGreater(budget.outflow, 0.0)

    def test_rain_is_symmetric(self):
        """Rain over a uniform field keeps every sector alike."""
        x0 = np.full(self.grid.n, -2.0)
        rain = WeatherSample(rain=20 * 1e-3 / 86400.0)
        trajectory = self.model.simulate(x0, Schedule(2), rain, 6 * HOUR,
                                         HOUR)
        final = trajectory.states[-1].reshape(self.grid.shape)
        for j in range(1, self.grid.ntheta):
            np.testing.assert_allclose(final[:, j], final[:, 0], atol=1e-12)
        self.assertGreater(final[0, 0, 0], -2.0)

    def test_irrigation_follows_pivot(self):
        """Only the sector under the pivot receives water."""
        flux = self.model.surface_flux(HOUR * 2.5, [1e-6, 5e-6],
                                       WeatherSample())
        sector = self.pivot.sector_at(HOUR * 2.5, self.grid.ntheta)
        expected = np.zeros(self.grid.shape[:2])
        expected[:, sector] = [1e-6, 2.5e-6]
        np.testing.assert_array_equal(flux, expected)
        with self.assertRaises(ShapeError):
            self.model.surface_flux(0.0, [1e-6], WeatherSample())

    def test_rotation_equivariance(self):
        """Shifting the pivot phase by s sectors rotates the solution."""
        rng = np.random.default_rng(3)
        x0 = rng.uniform(-2.5, -1.5, self.grid.n)
        shift = 1
        dwell = self.pivot.dwell(self.grid.ntheta)
        shifted = FieldModel(self.grid, LOAM, PivotConfig(
            8 * HOUR, 2, 0.0, 2.5e-6, phase=shift * dwell))
        schedule = Schedule(2).add(0.0, 8 * HOUR, [0.5e-6, 1e-6])
        x0_shifted = np.roll(x0.reshape(self.grid.shape), -shift,
                             axis=1).ravel()
        a = self.model.simulate(x0, schedule, WeatherSample(), 6 * HOUR,
                                HOUR)
        b = shifted.simulate(x0_shifted, schedule, WeatherSample(),
                             6 * HOUR, HOUR)
        expected = np.roll(a.states[-1].reshape(self.grid.shape), -shift,
                           axis=1).ravel()
        np.testing.assert_allclose(b.states[-1], expected, atol=1e-8)

    def test_mass_balance(self):
        """Stored water changes by inflow minus outflow minus uptake."""
        crop = CropModel(CropCalendar.constant(3, L=0.2))
        model = FieldModel(self.grid, LOAM, self.pivot, crop, dh_max=1e-3)
        x0 = np.full(self.grid.n, -2.0)
        weather = WeatherSample(PET=4e-3 / 86400.0)
        schedule = Schedule(2).add(0.0, 8 * HOUR, [1e-6, 1e-6])
        trajectory = model.simulate(x0, schedule, weather, 8 * HOUR, HOUR)
        stored = (model.water_storage(trajectory.states[-1]) -
                  model.water_storage(x0))
        inflow, outflow, uptake = trajectory.balance
        self.assertGreater(inflow, 0.0)
        self.assertGreater(uptake, 0.0)
        error = stored - (inflow - outflow - uptake)
        self.assertLess(abs(error), 5e-3 * (inflow + outflow + uptake))

    def test_constant_rates_irrigate(self):
        """Fixed rates run the sprinklers over the whole interval."""
        x0 = np.full(self.grid.n, -2.0)
        u = [1e-6, 1e-6]
        state, balance = self.model.advance(
            x0, 0.0, 8 * HOUR, Schedule.constant(u), WeatherSample())
        ring_area = self.grid.surface_areas().sum(axis=1)
        self.assertAlmostEqual(
            balance.inflow / (self.pivot.dwell(4) * np.dot(u, ring_area)),
            1.0, places=9)
        np.testing.assert_array_equal(
            self.model.step(x0, u, WeatherSample(), 0.0, 8 * HOUR), state)

    def test_mass_balance_default_step(self):
        """Storage tracks the flux budget at the default dh_max."""
        crop = CropModel(CropCalendar.constant(3, L=0.2))
        model = FieldModel(self.grid, LOAM, self.pivot, crop)
        x0 = np.full(self.grid.n, -2.0)
        weather = WeatherSample(rain=5e-3 / 86400.0, PET=4e-3 / 86400.0)
        schedule = Schedule(2).add(0.0, 8 * HOUR, [1e-6, 2e-6])
        trajectory = model.simulate(x0, schedule, weather, 24 * HOUR, HOUR)
        inflow, outflow, uptake = trajectory.balance
        stored = (model.water_storage(trajectory.states[-1]) -
                  model.water_storage(x0))
        self.assertGreater(inflow, 0.0)
        self.assertLess(abs(stored - (inflow - outflow - uptake)),
                        1e-3 * (inflow + outflow + uptake))

    def test_instantaneous_balance(self):
        """Node storage rates add up to the flux budget."""
        crop = CropModel(CropCalendar.constant(3, L=0.2))
        model = FieldModel(self.grid, LOAM, self.pivot, crop)
        rng = np.random.default_rng(11)
        x0 = rng.uniform(-3.0, -0.5, self.grid.n)
        weather = WeatherSample(rain=1e-8, PET=5e-8)
        evaluation = model.evaluate(x0, HOUR, [1e-6, 2e-6], weather)
        total = float(np.dot(evaluation.storage_rate,
                             self.grid.volumes().ravel()))
        inflow, outflow, uptake = evaluation.budget
        self.assertAlmostEqual(total, inflow - outflow - uptake,
                               delta=1e-8 * (inflow + outflow + uptake))

    def test_euler_convergence(self):
        """Halving dh_max brings the solution closer to a fine reference."""
        grid = build_grid(1.0, 0.5, 1, 1, 5)
        x0 = np.linspace(-0.5, -1.5, 5)
        rain = WeatherSample(rain=10e-3 / 86400.0)

        def final(dh_max):
            model = FieldModel(grid, LOAM, PivotConfig(HOUR, 1),
                               dh_max=dh_max)
            return model.simulate(x0, Schedule(1), rain, 12 * HOUR,
                                  12 * HOUR).states[-1]

        reference = final(5e-5)
        errors = [np.max(np.abs(final(dh) - reference))
                  for dh in (4e-3, 2e-3, 1e-3)]
        self.assertGreater(errors[0], errors[1])
        self.assertGreater(errors[1], errors[2])

    def test_step_consistency(self):
        """A short step departs from the Euler step by o(dt)."""
        grid = build_grid(1.0, 0.5, 1, 1, 5)
        model = FieldModel(grid, LOAM, PivotConfig(HOUR, 1))
        x0 = np.full(grid.n, -1.0)
        rain = WeatherSample(rain=10e-3 / 86400.0)
        rate = model.rhs(x0, None, rain, 0.0)
        errors = [
            np.max(np.abs(model.step(x0, None, rain, 0.0, dt) - x0 -
                          dt * rate)) / dt
            for dt in (400.0, 200.0, 100.0)]
        self.assertGreater(errors[-1], 0.0)
        for coarse, fine in zip(errors, errors[1:]):
            self.assertAlmostEqual(coarse / fine, 2.0, delta=0.2)

    def test_inflow_volume(self):
        """Irrigation brings rate times area times dwell per column."""
        schedule = Schedule(2).add(0.0, 8 * HOUR, [1e-6, 1.5e-6])
        trajectory = self.model.simulate(
            np.full(self.grid.n, -2.0), schedule, WeatherSample(), 8 * HOUR,
            8 * HOUR)
        ring_area = self.grid.surface_areas().sum(axis=1)
        self.assertAlmostEqual(
            trajectory.balance.inflow /
            (self.pivot.dwell(4) * np.dot([1e-6, 1.5e-6], ring_area)),
            1.0, places=9)

    def test_column_matches_oracle(self):
        """A single column matches a node-by-node drainage solver."""
        grid = build_grid(1.0, 0.6, 1, 1, 6)
        model = FieldModel(grid, LOAM, PivotConfig(8 * HOUR, 1))
        x0 = np.linspace(-0.3, -0.6, 6)
        trajectory = model.simulate(x0, Schedule(1), WeatherSample(),
                                    24 * HOUR, HOUR)
        oracle = _column_oracle(LOAM, x0, grid.dz, 24, model.dh_max)
        np.testing.assert_allclose(trajectory.states, oracle, rtol=1e-6)

    def test_stiffness(self):
        """A sub-step below dt_min raises StiffnessError."""
        model = FieldModel(self.grid, LOAM, self.pivot, dt_min=1e9)
        with self.assertRaises(StiffnessError) as cm:
            model.simulate(np.full(self.grid.n, -0.5), Schedule(2),
                           WeatherSample(), 86400.0, 86400.0)
        self.assertEqual(cm.exception.time, 0.0)

    def test_non_finite_state(self):
        """Non-finite heads raise NumericError naming the node."""
        x0 = np.full(self.grid.n, -1.0)
        x0[7] = np.inf
        with self.assertRaises(NumericError) as cm:
            self.model.rhs(x0, None, WeatherSample(), 0.0)
        self.assertEqual(cm.exception.node, 7)

    def test_step(self):
        """step() advances with fixed rates."""
        x0 = np.full(self.grid.n, -2.0)
        wet = self.model.step(x0, [1e-6, 1e-6], WeatherSample(), 0.0, HOUR)
        dry = self.model.step(x0, None, WeatherSample(), 0.0, HOUR)
        self.assertGreater(self.model.water_storage(wet),
                           self.model.water_storage(dry))

    def test_soil_map_size(self):
        """The soil map must cover the grid."""
        with self.assertRaises(ShapeError):
            FieldModel(self.grid, hydraulics.SoilMap.uniform(LOAM, 3),
                       self.pivot)
        with self.assertRaises(ParameterError):
            FieldModel(self.grid, LOAM, PivotConfig(HOUR, 3))
