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
Commands of the ``pivotsched`` tool.

Every command reads the scenario bundle selected with ``--config`` or
``--scenario`` and writes plot-ready CSV files into the ``--out`` directory.
Each file starts with provenance comments naming the hash of the bundle.
"""

import argparse
import logging
import os

import numpy as np
import pandas as pd

from pivotsched import __version__
from pivotsched import reduction
from pivotsched import storage
from pivotsched.errors import ShapeError
from pivotsched.field import Schedule
from pivotsched.field import load_schedule
from pivotsched.recipes.cmd import Command
from pivotsched.scheduler import days_to_zone
from pivotsched.scheduler import knee_estimate
from pivotsched.scheduler import receding_horizon_run

__all__ = (
    'PivotschedCommand',
    'ReduceCommand',
    'ScheduleCommand',
    'SimulateCommand',
    'SweepDaysCommand',
    'main',
)


_logger = logging.getLogger("pivotsched.commands")

SECONDS_PER_DAY = 86400.0

#: Sprinkler rates of the robustness runs of ``reduce`` [m/s]
ROBUSTNESS_INPUTS = (1e-6, 0.5e-6, 0.1e-6, 0.05e-6)

#: Uniform initial head of the robustness runs of ``reduce`` [m]
ROBUSTNESS_HEAD = -3.0


def sweep_range(text):
    """
    Parse a threshold sweep ``A:B:S`` into the thresholds ``A, A+S, .. B``.

    :raises argparse.ArgumentTypeError:
        If the text is not three numbers with ``0 < A <= B`` and ``S > 0``.
    """
    try:
        start, stop, step = (float(part) for part in text.split(':'))
    except ValueError:
        raise argparse.ArgumentTypeError(
            "expected A:B:S, got {!r}".format(text))
    if not (0 < start <= stop and step > 0):
        raise argparse.ArgumentTypeError(
            "expected 0 < A <= B and S > 0, got {!r}".format(text))
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)


def amount_list(text):
    """Parse a comma-separated list of positive sprinkler rates [m/s]."""
    try:
        amounts = sorted(float(part) for part in text.split(','))
    except ValueError:
        raise argparse.ArgumentTypeError(
            "expected comma-separated numbers, got {!r}".format(text))
    if not amounts or amounts[0] <= 0:
        raise argparse.ArgumentTypeError("amounts must be positive")
    return amounts


def rootzone_frame(grid, nodes, state):
    """Get the head of the given nodes with their position, one per row."""
    nodes = np.asarray(nodes, dtype=int)
    i, j, k = np.unravel_index(nodes, grid.shape)
    return pd.DataFrame({
        'node_id': nodes,
        'ring': i,
        'sector': j,
        'layer': k + 1,
        'r_m': grid.r[i],
        'theta_rad': grid.theta[j],
        'depth_m': grid.z[k],
        'head_m': np.asarray(state, dtype=float)[nodes],
    })


class _BundleCommand(Command):

    """Base of the commands working on a scenario bundle."""

    def output_path(self, context, name):
        """Get the path of output file ``name``."""
        return os.path.join(context.out_dir, name)

    def write(self, context, name, frame, *extra):
        """Write a table with the provenance of the run."""
        provenance = context.bundle.provenance(self.name) + (
            ('seed', context.seed),) + extra
        path = self.output_path(context, name)
        storage.write_table(path, frame, provenance)
        _logger.info("Wrote %s", path)
        return path

    def snapshots(self, context, model):
        """Collect the snapshots of the reduction protocol of the bundle."""
        bundle = context.bundle
        settings = bundle.reduction
        return reduction.collect_snapshots(
            model, bundle.initial_state(settings.snapshot_head),
            bundle.snapshot_schedule(), bundle.weather, settings.horizon,
            settings.dt_sample)


class SimulateCommand(_BundleCommand):

    """
    Simulate the full-order field model.

    Writes ``trajectory.csv`` (one column per node), ``balance.csv`` (water
    exchanged over the run) and ``rootzone_map.csv`` (root-zone heads at the
    end of the run). Without ``--rate`` or ``--schedule`` the field is not
    irrigated.
    """

    name = 'simulate'

    def register_arguments(self, parser):
        parser.add_argument(
            "--days", metavar="D", type=float, default=1.0,
            help="length of the run in days (default: %(default)s)")
        parser.add_argument(
            "--initial-head", metavar="H", type=float,
            help="uniform initial head in m (default: from the bundle)")
        irrigation = parser.add_mutually_exclusive_group()
        irrigation.add_argument(
            "--rate", metavar="U", type=float,
            help="irrigate every ring at U m/s during the first revolution")
        irrigation.add_argument(
            "--schedule", metavar="PATH",
            help="read sprinkler events from a CSV file")
        parser.add_argument(
            "--no-crop", action="store_true",
            help="simulate bare soil, without root uptake")

    def invoked(self, context):
        args = context.args
        bundle = context.bundle
        model = bundle.field_model(with_crop=not args.no_crop)
        n_sprinklers = bundle.pivot.n_sprinklers
        if args.schedule is not None:
            schedule = load_schedule(args.schedule, n_sprinklers)
        else:
            schedule = Schedule(n_sprinklers)
            if args.rate:
                schedule.add(0.0, bundle.pivot.rotation_period,
                             np.full(n_sprinklers, args.rate))
        x0 = bundle.initial_state(args.initial_head)
        trajectory = model.simulate(
            x0, schedule, bundle.weather, args.days * SECONDS_PER_DAY,
            bundle.solver.dt_out)
        final = trajectory.states[-1]
        stored = model.water_storage(final) - model.water_storage(x0)
        inflow, outflow, uptake = trajectory.balance
        error = stored - (inflow - outflow - uptake)
        _logger.info("Simulated %g day(s) of %r, balance error %.3g m3",
                     args.days, model, error)
        path = self.output_path(context, 'trajectory.csv')
        storage.save_trajectory(
            path, trajectory.times, trajectory.states,
            bundle.provenance(self.name))
        self.write(context, 'balance.csv', pd.DataFrame({
            'quantity': ['inflow', 'outflow', 'uptake', 'storage_change',
                         'balance_error'],
            'volume_m3': [inflow, outflow, uptake, stored, error],
        }))
        self.write(context, 'rootzone_map.csv', rootzone_frame(
            bundle.grid, bundle.output_nodes(), final))


class ReduceCommand(_BundleCommand):

    """
    Cluster the nodes of the field into a reduced model.

    With ``--threshold`` (or the threshold of the bundle) writes the
    cluster of every node to ``projection.csv``, the accuracy of the reduced
    model for the snapshot input and four other inputs from another initial
    head to ``mse.csv`` and the full and reduced heads of a seeded random
    selection of nodes to ``comparison.csv``. With ``--sweep`` writes the
    ``threshold, r, mse`` table of every threshold to ``sweep.csv``.
    Snapshots are always written to ``snapshots.csv``.
    """

    name = 'reduce'

    def register_arguments(self, parser):
        which = parser.add_mutually_exclusive_group()
        which.add_argument(
            "--threshold", metavar="X", type=float,
            help="largest average distance of merged clusters")
        which.add_argument(
            "--sweep", metavar="A:B:S", type=sweep_range,
            help="evaluate the thresholds A, A+S, ... B")
        parser.add_argument(
            "--nodes", metavar="K", type=int, default=6,
            help="number of nodes in comparison.csv (default: %(default)s)")

    def invoked(self, context):
        args = context.args
        bundle = context.bundle
        model = bundle.field_model()
        snapshots = self.snapshots(context, model)
        storage.save_snapshots(
            self.output_path(context, 'snapshots.csv'), snapshots,
            bundle.provenance(self.name))
        if args.sweep is not None:
            self.sweep(context, model, snapshots, args.sweep)
        else:
            threshold = args.threshold
            if threshold is None:
                threshold = bundle.reduction.threshold
            self.single(context, model, snapshots, threshold)

    def _same_input_mse(self, context, model, projection):
        bundle = context.bundle
        settings = bundle.reduction
        return reduction.compare_models(
            model, projection, bundle.initial_state(settings.snapshot_head),
            bundle.snapshot_schedule(), bundle.weather, settings.horizon,
            settings.dt_sample)

    def sweep(self, context, model, snapshots, thresholds):
        """Evaluate the reduced model of every threshold."""
        bundle = context.bundle
        rows = []
        clusterings = reduction.sweep_thresholds(
            snapshots, thresholds, bundle.reduction.standardize)
        for threshold, clustering in zip(thresholds, clusterings):
            projection = reduction.build_projection(clustering, model.n)
            _, _, mse = self._same_input_mse(context, model, projection)
            _logger.info("Threshold %.4g: r=%d, mse=%.4g m2",
                         threshold, clustering.r, mse)
            rows.append((float(threshold), clustering.r, mse))
        self.write(context, 'sweep.csv', pd.DataFrame(
            rows, columns=['threshold', 'r', 'mse_m2']))

    def single(self, context, model, snapshots, threshold):
        """Build one reduced model and report its accuracy."""
        bundle = context.bundle
        settings = bundle.reduction
        clustering = reduction.cluster_states(
            snapshots, threshold, settings.standardize)
        projection = reduction.build_projection(clustering, model.n)
        _logger.info("Reduced %d states to %d at threshold %g",
                     model.n, projection.r, threshold)
        reduction.save_projection(
            self.output_path(context, 'projection.csv'), projection,
            threshold, bundle.provenance(self.name))
        rng = np.random.default_rng(context.seed)
        nodes = np.sort(rng.choice(
            model.n, size=min(context.args.nodes, model.n), replace=False))
        _, _, same = self._same_input_mse(context, model, projection)
        rows = [(settings.snapshot_input, settings.snapshot_head, same, 1.0)]
        traces = []
        x0 = bundle.initial_state(ROBUSTNESS_HEAD)
        for rate in ROBUSTNESS_INPUTS:
            rate = min(rate, bundle.pivot.u_ub)
            schedule = Schedule.constant(
                np.full(bundle.pivot.n_sprinklers, rate))
            full, lifted, mse = reduction.compare_models(
                model, projection, x0, schedule, bundle.weather,
                settings.horizon, settings.dt_sample)
            ratio = mse / same if same > 0 else np.inf
            _logger.info("Input %g m/s: mse=%.4g m2 (%.3g x snapshot input)",
                         rate, mse, ratio)
            rows.append((rate, ROBUSTNESS_HEAD, mse, ratio))
            times = np.repeat(full.times, nodes.size)
            traces.append(pd.DataFrame({
                'input_m_s': rate,
                'time_s': times,
                'node_id': np.tile(nodes, full.times.size),
                'full_head_m': full.states[:, nodes].ravel(),
                'reduced_head_m': lifted.states[:, nodes].ravel(),
            }))
        self.write(context, 'mse.csv', pd.DataFrame(
            rows, columns=['input_m_s', 'initial_head_m', 'mse_m2',
                           'ratio']), ('threshold', repr(threshold)),
            ('r', projection.r))
        self.write(context, 'comparison.csv',
                   pd.concat(traces, ignore_index=True))


class ScheduleCommand(_BundleCommand):

    """
    Run the receding-horizon irrigation scheduler over the season.

    The scheduler plans with a reduced model built from the snapshots of the
    bundle (or read from ``--projection``) and the decisions are applied to
    the full-order model. Writes the decision log ``closed_loop.csv``, the
    planned events ``events.csv``, the root-zone series
    ``rootzone_series.csv``, the summary ``zone_summary.csv`` and the final
    root-zone heads ``rootzone_map.csv``.
    """

    name = 'schedule'

    def register_arguments(self, parser):
        parser.add_argument(
            "--initial-head", metavar="H", type=float,
            help="uniform initial head in m (default: from the bundle)")
        parser.add_argument(
            "--days", metavar="N", type=int,
            help="length of the season in days (default: from the bundle)")
        parser.add_argument(
            "--projection", metavar="PATH",
            help="read the clusters from PATH instead of computing them")

    def projection(self, context, model):
        """Get the projection the scheduler predicts with."""
        bundle = context.bundle
        if context.args.projection is not None:
            projection = reduction.load_projection(context.args.projection)
            if projection.n != model.n:
                raise ShapeError(
                    "projection covers {} nodes, the field has {}".format(
                        projection.n, model.n))
            return projection
        clustering = reduction.cluster_states(
            self.snapshots(context, model), bundle.reduction.threshold,
            bundle.reduction.standardize)
        return reduction.build_projection(clustering, model.n)

    def invoked(self, context):
        args = context.args
        bundle = context.bundle
        plant = bundle.field_model()
        projection = self.projection(context, plant)
        _logger.info("Scheduling with %d reduced states", projection.r)
        scheduler = bundle.scheduler(reduction.ReducedModel(plant, projection))
        season_days = args.days if args.days is not None else (
            bundle.season_days)
        log = receding_horizon_run(
            plant, scheduler, bundle.weather,
            bundle.initial_state(args.initial_head), bundle.ts_days,
            season_days, bundle.solver.dt_out)
        self.write(context, 'closed_loop.csv', log.to_frame())
        self.write(context, 'events.csv', self.events_frame(log))
        outputs = log.outputs
        self.write(context, 'rootzone_series.csv', pd.DataFrame({
            'time_s': log.times,
            'mean_head_m': outputs.mean(axis=1),
            'min_head_m': outputs.min(axis=1),
            'max_head_m': outputs.max(axis=1),
            'stress': log.stress,
            'ky': log.ky,
        }))
        summary = log.zone_summary(bundle.zone)
        _logger.info("Zone summary: %s", ', '.join(
            "{}={:.4g}".format(key, value) for key, value in summary.items()))
        self.write(context, 'zone_summary.csv', pd.DataFrame({
            'metric': list(summary), 'value': list(summary.values())}))
        self.write(context, 'rootzone_map.csv', rootzone_frame(
            bundle.grid, bundle.output_nodes(), log.state))

    def events_frame(self, log):
        """Get the plan of every decision, one row per decision."""
        rows = []
        for record, decision in zip(log.records, log.decisions):
            row = {
                'event_index': record.event_index,
                't_start_day': record.t_start_s / SECONDS_PER_DAY,
                'T_chosen_h': decision.T / 3600.0,
                'irrigated': record.irrigated,
                'predicted_deficiency': decision.deficiency,
            }
            for ring, (u1, u3) in enumerate(zip(decision.u1, decision.u3)):
                row['u1_{}'.format(ring)] = u1
                row['u3_{}'.format(ring)] = u3
            row.update(decision.cost._asdict())
            rows.append(row)
        return pd.DataFrame(rows)


class SweepDaysCommand(_BundleCommand):

    """
    Measure how long one irrigation event keeps the root zone wet.

    For every amount the field is irrigated once at every sprinkler and left
    to dry. ``days_to_zone.csv`` lists the days until the mean root-zone head
    falls below the conservative lower bound, and the knee of the curve is
    reported in its provenance comments.
    """

    name = 'sweep-days'

    def register_arguments(self, parser):
        parser.add_argument(
            "--amounts", metavar="U1,U2,...", type=amount_list,
            help="sprinkler rates in m/s (default: 8 rates up to u_ub)")
        parser.add_argument(
            "--initial-head", metavar="H", type=float,
            help="uniform initial head in m (default: from the bundle)")

    def invoked(self, context):
        args = context.args
        bundle = context.bundle
        model = bundle.field_model()
        amounts = args.amounts
        if amounts is None:
            amounts = list(np.linspace(1, 8, 8) * bundle.pivot.u_ub / 8)
        x0 = bundle.initial_state(args.initial_head)
        rows = []
        for amount in amounts:
            result = days_to_zone(
                model, x0, amount, bundle.zone, bundle.output_nodes(),
                bundle.weather, event=bundle.horizon.event)
            _logger.info("Amount %g m/s: %.4g day(s)%s", amount, result.days,
                         " (capped)" if result.capped else "")
            rows.append((amount, result.days, result.capped))
        frame = pd.DataFrame(rows, columns=['amount_m_s', 'days', 'capped'])
        knee = knee_estimate(frame.amount_m_s, frame.days)
        if knee is None:
            _logger.warning("No knee found in the days-to-zone curve")
        else:
            _logger.info("Knee of the days-to-zone curve at %g m/s", knee)
        self.write(context, 'days_to_zone.csv', frame, ('knee', repr(knee)))


class PivotschedCommand(Command):

    """
    Center-pivot irrigation simulation, model reduction and scheduling.

    @EPILOG@
    The scenario options go before the command, for example:

        pivotsched --scenario 1 --out run1 schedule
        pivotsched --config field.ini reduce --sweep 0.3:3.5:0.2
    """

    name = 'pivotsched'
    version = __version__
    spices = {'log:arguments'}
    sub_commands = (
        ('simulate', SimulateCommand),
        ('reduce', ReduceCommand),
        ('schedule', ScheduleCommand),
        ('sweep-days', SweepDaysCommand),
    )


def main(argv=None):
    """Entry point of the ``pivotsched`` executable."""
    return PivotschedCommand().main(argv)
