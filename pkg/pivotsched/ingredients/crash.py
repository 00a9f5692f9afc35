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

"""Ingredient turning failed commands into exit codes."""

import logging
import sys
import traceback

from pivotsched.core import Ingredient
from pivotsched.errors import PivotschedError


_logger = logging.getLogger("pivotsched.crash")


def format_error(exc):
    """Get the one-line diagnostic of a :class:`PivotschedError`."""
    return "pivotsched: error[{}]: {}".format(exc.__class__.__name__, exc)


class ErrorHandler(Ingredient):

    """
    Ingredient reacting to exceptions raised by commands.

    A :class:`~pivotsched.errors.PivotschedError` is reported on one line of
    standard error and the process exits with the ``exit_code`` of its class
    (1 for numeric failures, 2 for configuration and parse failures). Any
    other exception is a bug: the traceback is printed and the process exits
    with code 1.
    """

    def dispatch_failed(self, context):
        """Report ``context.exc_value`` and exit."""
        exc = context.exc_value
        if isinstance(exc, PivotschedError):
            _logger.debug("Command failed", exc_info=(
                context.exc_type, exc, context.traceback))
            print(format_error(exc), file=sys.stderr)
            raise SystemExit(exc.exit_code)
        traceback.print_exception(
            context.exc_type, context.exc_value, context.traceback)
        raise SystemExit(1)
