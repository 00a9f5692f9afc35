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

"""Tests for the BundleIngredient."""

import argparse
import os
import tempfile
import unittest
from unittest import mock

from pivotsched import config
from pivotsched.core import Context
from pivotsched.errors import ConfigurationError
from pivotsched.ingredients.bundle import BundleIngredient


class BundleIngredientTests(unittest.TestCase):

    """Tests for the BundleIngredient class."""

    def setUp(self):
        """Common initialization method."""
        self.ingredient = BundleIngredient()
        self.context = Context()
        self.context.parser = argparse.ArgumentParser()
        self.ingredient.build_parser(self.context)
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        """Common cleanup method."""
        self.tmp.cleanup()

    def parse(self, *argv):
        self.context.args = self.context.parser.parse_args(list(argv))

    def test_defaults(self):
        """The output directory and seed have defaults."""
        self.parse('--scenario', '1')
        self.assertEqual(self.context.args.out, 'out')
        self.assertEqual(self.context.args.seed, 0)

    def test_exclusive(self):
        """A bundle comes either from a file or from a scenario number."""
        with mock.patch('sys.stderr'):
            with self.assertRaises(SystemExit):
                self.parse('--scenario', '1', '--config', 'a.ini')
            with self.assertRaises(SystemExit):
                self.parse('--scenario', '4')

    def test_scenario(self):
        """Dispatch loads the shipped bundle and creates the directory."""
        out = os.path.join(self.tmp.name, 'run', 'one')
        self.parse('--scenario', '2', '--out', out, '--seed', '5')
        with mock.patch.object(config.ScenarioBundle, 'from_file') as load:
            self.assertIsNone(self.ingredient.dispatch(self.context))
        load.assert_called_once_with(config.scenario_path(2))
        self.assertIs(self.context.bundle, load.return_value)
        self.assertTrue(os.path.isdir(out))
        self.assertEqual(self.context.out_dir, out)
        self.assertEqual(self.context.seed, 5)

    def test_config(self):
        """Dispatch loads the bundle named by --config."""
        self.parse('--config', 'field.ini', '--out', self.tmp.name)
        with mock.patch.object(config.ScenarioBundle, 'from_file') as load:
            self.ingredient.dispatch(self.context)
        load.assert_called_once_with('field.ini')

    def test_no_bundle(self):
        """Commands need a bundle."""
        self.parse()
        with self.assertRaises(ConfigurationError):
            self.ingredient.dispatch(self.context)
