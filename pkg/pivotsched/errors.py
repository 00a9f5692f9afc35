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
Exceptions raised by pivotsched.

All exceptions derive from :class:`PivotschedError`. Each class carries an
``exit_code`` attribute which the crash-handling ingredient uses as the
process exit code. There are two families:

- :class:`ConfigurationError` (exit code 2) for anything wrong with the
  inputs: bad parameters, unparsable files, missing columns or values outside
  of their domain.
- :class:`ComputationError` (exit code 1) for failures that happen while
  computing: non-finite states, stiff integration, shape mismatches and
  scheduling failures.
"""

__all__ = (
    'ComputationError',
    'ConfigurationError',
    'ConsistencyError',
    'NumericError',
    'ParameterError',
    'ParseError',
    'PivotschedError',
    'RangeError',
    'SchedulingError',
    'SchemaError',
    'ShapeError',
    'StiffnessError',
    'ValidationError',
)


class PivotschedError(Exception):

    """Base class of all pivotsched exceptions."""

    exit_code = 1


class ConfigurationError(PivotschedError):

    """Exception raised when inputs or configuration are wrong."""

    exit_code = 2


class ParameterError(ConfigurationError):

    """Exception raised when model parameters violate their invariants."""


class ParseError(ConfigurationError):

    """
    Exception raised when an input file cannot be parsed.

    :attr path:
        Path of the offending file (may be None)
    :attr line:
        One-based line number of the offending line (may be None)
    """

    def __init__(self, message, path=None, line=None):
        """Initialize the exception with an optional location."""
        super(ParseError, self).__init__(message)
        self.path = path
        self.line = line

    def __str__(self):
        """Get the message prefixed with the location, if known."""
        message = super(ParseError, self).__str__()
        if self.path is not None and self.line is not None:
            return "{}:{}: {}".format(self.path, self.line, message)
        if self.path is not None:
            return "{}: {}".format(self.path, message)
        return message


class SchemaError(ParseError):

    """Exception raised when a file lacks a required column or key."""


class ValidationError(ParseError):

    """Exception raised when a value is outside of its valid domain."""


class ComputationError(PivotschedError):

    """Exception raised when a computation fails."""

    exit_code = 1


class NumericError(ComputationError):

    """
    Exception raised when the state contains non-finite entries.

    :attr node:
        Identifier of the first offending node
    """

    def __init__(self, message, node=None):
        """Initialize the exception with the offending node."""
        super(NumericError, self).__init__(message)
        self.node = node


class StiffnessError(ComputationError):

    """Exception raised when the explicit sub-step underflows."""

    def __init__(self, message, time=None, dt=None):
        """Initialize the exception with the failing time and sub-step."""
        super(StiffnessError, self).__init__(message)
        self.time = time
        self.dt = dt


class RangeError(ComputationError):

    """Exception raised when a time or day index is outside of the season."""


class ShapeError(ComputationError):

    """Exception raised when array shapes do not agree."""


class ConsistencyError(ComputationError):

    """Exception raised when a partition of states is not valid."""


class SchedulingError(ComputationError):

    """Exception raised when no scheduling decision could be computed."""
