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

"""Ingredient configuring the :mod:`logging` subsystem."""

import logging

from pivotsched.core import Ingredient

_logger = logging.getLogger("pivotsched.log")

#: Format of every log line
LOG_FORMAT = "%(name)-12s: %(levelname)-8s %(message)s"

LEVELS = ('CRITICAL', 'ERROR', 'WARNING', 'INFO', 'DEBUG')


class Logging(Ingredient):

    """
    Ingredient for enabling the python logging subsystem.

    A stream handler is attached to the root logger as soon as the
    ingredient is added and detached at shutdown. With the
    ``log:arguments`` spice the ``--log-level`` and ``--trace`` options are
    exposed and applied right after the early parse, so that the bundle and
    the commands run with logging fully configured.
    """

    def __init__(self):
        self._expose_argparse = False
        self._handler = None

    def added(self, context):
        """Attach the log handler."""
        self._expose_argparse = context.bowl.has_spice("log:arguments")
        self.configure_logging(context)

    def build_early_parser(self, context):
        """Register the logging options in the early parser."""
        if self._expose_argparse:
            self._add_argparse_options(context.early_parser)

    def early_init(self, context):
        """Apply ``--log-level`` and ``--trace``."""
        if self._expose_argparse:
            self.adjust_logging(context)

    def build_parser(self, context):
        """Register the logging options so that they show in ``--help``."""
        if self._expose_argparse:
            self._add_argparse_options(context.parser)

    def shutdown(self, context):
        """Detach the log handler."""
        if self._handler is not None:
            logging.root.removeHandler(self._handler)
            self._handler = None

    def _add_argparse_options(self, parser):
        group = parser.add_argument_group("Logging and debugging")
        group.add_argument(
            "-l", "--log-level", metavar="LEVEL", choices=LEVELS,
            help="set global log level to the specified value")
        group.add_argument(
            "-T", "--trace", metavar="NAME", action="append", default=[],
            help="enable DEBUG messages on the specified logger"
                 " (can be used multiple times)")

    def configure_logging(self, context):
        """Attach a :class:`logging.StreamHandler` to the root logger."""
        self._handler = logging.StreamHandler()
        self._handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logging.root.addHandler(self._handler)

    def adjust_logging(self, context):
        """Apply the levels found in ``context.early_args``."""
        if context.early_args.log_level:
            logging.getLogger("").setLevel(context.early_args.log_level)
        for name in context.early_args.trace:
            logging.getLogger(name).setLevel(logging.DEBUG)
            _logger.info("Enabled tracing on logger %r", name)
