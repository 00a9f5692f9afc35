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

"""Tests for the Logging ingredient."""

import argparse
import logging
import unittest
from unittest import mock

from pivotsched.core import Bowl
from pivotsched.core import Context
from pivotsched.ingredients import log


class LoggingTests(unittest.TestCase):

    """Tests for the Logging ingredient."""

    def setUp(self):
        """Common initialization method."""
        self.ingredient = log.Logging()
        self.context = Context()
        self.context.bowl = mock.Mock(name='bowl', spec_set=Bowl)
        self.context.early_parser = mock.Mock(
            name='early_parser', spec_set=argparse.ArgumentParser)
        self.context.parser = mock.Mock(
            name='parser', spec_set=argparse.ArgumentParser)
        self.context.early_args = mock.Mock(name='early_args')

    def test_added_configures_logging(self):
        """Calling Logging.added() calls configure_logging()."""
        with mock.patch.object(self.ingredient, 'configure_logging') as cl:
            self.ingredient.added(self.context)
        cl.assert_called_with(self.context)

    def test_added_consults_spices(self):
        """Calling Logging.added() checks for log:arguments spice."""
        with mock.patch.object(self.ingredient, 'configure_logging'):
            self.ingredient.added(self.context)
        self.context.bowl.has_spice.assert_called_once_with("log:arguments")

    def test_parsers_follow_spice(self):
        """Options are registered in both parsers only with the spice."""
        for exposed in (True, False):
            for phase, parser in (('build_early_parser', 'early_parser'),
                                  ('build_parser', 'parser')):
                with self.subTest(phase=phase, exposed=exposed):
                    target = mock.Mock(spec_set=argparse.ArgumentParser)
                    setattr(self.context, parser, target)
                    self.ingredient._expose_argparse = exposed
                    getattr(self.ingredient, phase)(self.context)
                    if exposed:
                        self.assertLoggingOptions(target)
                    else:
                        target.add_argument_group.assert_not_called()

    def test_early_init_follows_spice(self):
        """Levels are adjusted after the early parse only with the spice."""
        for exposed in (True, False):
            with self.subTest(exposed=exposed):
                self.ingredient._expose_argparse = exposed
                with mock.patch.object(
                        self.ingredient, 'adjust_logging') as adjust:
                    self.ingredient.early_init(self.context)
                self.assertEqual(adjust.called, exposed)

    def test_adjust_logging(self):
        """Levels and traced loggers follow the early arguments."""
        self.context.early_args.log_level = 'WARNING'
        self.context.early_args.trace = ['pivotsched.field']
        with mock.patch('logging.getLogger') as get_logger:
            self.ingredient.adjust_logging(self.context)
        get_logger.assert_any_call("")
        get_logger.assert_any_call('pivotsched.field')
        get_logger().setLevel.assert_any_call('WARNING')
        get_logger().setLevel.assert_any_call(logging.DEBUG)

    def test_handler_lifetime(self):
        """The root handler is attached when added and removed at shutdown."""
        self.context.bowl.has_spice.return_value = False
        with mock.patch.object(logging.root, 'addHandler') as add, \
                mock.patch.object(logging.root, 'removeHandler') as remove:
            self.ingredient.added(self.context)
            handler = add.call_args[0][0]
            self.assertEqual(handler.formatter._fmt, log.LOG_FORMAT)
            self.ingredient.shutdown(self.context)
            remove.assert_called_once_with(handler)
            self.ingredient.shutdown(self.context)
            remove.assert_called_once_with(handler)

    def assertLoggingOptions(self, parser):
        parser.add_argument_group.assert_called_once_with(
            "Logging and debugging")
        group = parser.add_argument_group.return_value
        flags = [c[0] for c in group.add_argument.call_args_list]
        self.assertEqual(flags, [("-l", "--log-level"), ("-T", "--trace")])
        level = group.add_argument.call_args_list[0][1]
        self.assertEqual(level['choices'], log.LEVELS)
        trace = group.add_argument.call_args_list[1][1]
        self.assertEqual(trace['action'], 'append')
