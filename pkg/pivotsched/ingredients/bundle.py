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

"""Ingredient loading the scenario bundle of a run."""

import logging
import os

from pivotsched import config
from pivotsched.core import Ingredient
from pivotsched.errors import ConfigurationError


_logger = logging.getLogger("pivotsched.bundle")


class BundleIngredient(Ingredient):

    """
    Ingredient selecting the scenario bundle and the output directory.

    It adds the ``--config``, ``--scenario``, ``--out`` and ``--seed``
    options to ``context.parser`` and must therefore follow the
    :class:`~pivotsched.ingredients.argparse.ParserIngredient`. The bundle is
    loaded when dispatch starts, so that configuration errors are reported
    like command errors. This ingredient stores:

    - ``context.bundle``: the :class:`~pivotsched.config.ScenarioBundle`
    - ``context.out_dir``: the existing output directory
    - ``context.seed``: the seed of random selections
    """

    def build_parser(self, context):
        """Register the scenario options."""
        group = context.parser.add_argument_group("Scenario")
        which = group.add_mutually_exclusive_group()
        which.add_argument(
            "--config", metavar="PATH",
            help="load the scenario bundle from PATH")
        which.add_argument(
            "--scenario", metavar="N", type=int, choices=config.SCENARIOS,
            help="use the shipped scenario bundle N")
        group.add_argument(
            "--out", metavar="DIR", default="out",
            help="write the output files to DIR (default: %(default)s)")
        group.add_argument(
            "--seed", metavar="N", type=int, default=0,
            help="seed of random selections (default: %(default)s)")

    def dispatch(self, context):
        """Load the bundle and prepare the output directory."""
        args = context.args
        if args.config is not None:
            path = args.config
        elif args.scenario is not None:
            path = config.scenario_path(args.scenario)
        else:
            raise ConfigurationError(
                "no scenario bundle, use --config PATH or --scenario N")
        context.bundle = config.ScenarioBundle.from_file(path)
        try:
            os.makedirs(args.out, exist_ok=True)
        except OSError as exc:
            raise ConfigurationError("cannot create {!r}: {}".format(
                args.out, exc.strerror))
        context.out_dir = args.out
        context.seed = args.seed
        _logger.info("Writing to %s with seed %d", args.out, args.seed)
