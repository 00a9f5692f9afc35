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
Tabular input and output.

Every file read or written by pivotsched is a CSV table with a header row.
Files written by pivotsched start with one or more comment lines (beginning
with ``#``) that record provenance, typically the hash of the scenario
configuration that produced them. Comment lines are skipped on input.

Errors are reported with the one-based line number of the offending line.
"""

import hashlib
import io
import logging

import numpy as np
import pandas as pd

from pivotsched.errors import ParseError
from pivotsched.errors import SchemaError
from pivotsched.errors import ValidationError

__all__ = (
    'config_digest',
    'line_of',
    'load_snapshots',
    'load_trajectory',
    'missing_columns',
    'numeric_column',
    'read_table',
    'save_snapshots',
    'save_trajectory',
    'write_table',
)


_logger = logging.getLogger("pivotsched.storage")


def config_digest(text):
    """Get the short provenance hash of a configuration text."""
    if isinstance(text, str):
        text = text.encode('utf-8')
    return hashlib.sha256(text).hexdigest()[:16]


def read_table(path, required=(), dtype=None):
    """
    Read a CSV table.

    :param path:
        Path of the file to read
    :param required:
        Names of the columns that must be present
    :param dtype:
        Passed to :func:`pandas.read_csv`
    :returns:
        A :class:`pandas.DataFrame`. The number of lines preceding the first
        data row is stored in ``frame.attrs['line_offset']``.
    :raises ParseError:
        If the file cannot be read or parsed.
    :raises SchemaError:
        If a required column is missing.
    """
    try:
        with open(str(path), 'rt') as stream:
            text = stream.read()
    except (IOError, OSError) as exc:
        raise ParseError("cannot read file: {}".format(exc), path)
    lines = text.splitlines()
    leading = 0
    for line in lines:
        if line.strip() and not line.lstrip().startswith('#'):
            break
        leading += 1
    try:
        frame = pd.read_csv(
            io.StringIO(text), comment='#', skipinitialspace=True,
            dtype=dtype, float_precision='round_trip')
    except pd.errors.EmptyDataError:
        raise ValidationError("file has no header and no data", path, 1)
    except (pd.errors.ParserError, ValueError) as exc:
        raise ParseError("cannot parse table: {}".format(exc), path)
    frame.columns = [str(column).strip() for column in frame.columns]
    frame.attrs['line_offset'] = leading + 1
    missing = [name for name in required if name not in frame.columns]
    if missing:
        raise missing_columns(path, required, frame.columns)
    return frame


def line_of(frame, index):
    """Get the one-based file line number of a data row."""
    return frame.attrs.get('line_offset', 1) + int(index) + 1


def missing_columns(path, required, present):
    """Create a :class:`SchemaError` describing missing columns."""
    missing = [name for name in required if name not in present]
    return SchemaError("missing column(s): {}".format(', '.join(missing)),
                       path)


def numeric_column(frame, name, path, nonnegative=False):
    """
    Get a column of a table as a float array.

    :raises ValidationError:
        On the first non-numeric (or, if requested, negative) entry, with the
        line number of that entry.
    """
    values = pd.to_numeric(frame[name], errors='coerce').to_numpy(float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise ValidationError(
            "column {} has a non-numeric value {!r}".format(
                name, frame[name].iloc[bad[0]]),
            path, line_of(frame, bad[0]))
    if nonnegative:
        negative = np.flatnonzero(values < 0)
        if negative.size:
            raise ValidationError(
                "column {} has a negative value {!r}".format(
                    name, values[negative[0]]),
                path, line_of(frame, negative[0]))
    return values


def write_table(path, frame, provenance=()):
    """
    Write a table with leading provenance comments.

    :param frame:
        A :class:`pandas.DataFrame`, written without its index
    :param provenance:
        Sequence of ``(key, value)`` pairs, one comment line each
    """
    with open(str(path), 'wt') as stream:
        for key, value in provenance:
            stream.write("# {}: {}\n".format(key, value))
        frame.to_csv(stream, index=False)
    _logger.debug("Wrote %d row(s) to %s", len(frame), path)


def save_trajectory(path, times, states, provenance=()):
    """
    Save a trajectory with columns ``time_s, node_0 ... node_{n-1}``.

    :param times:
        Sample times [s], length N
    :param states:
        Array of shape (N, n) with one state per row
    """
    states = np.atleast_2d(np.asarray(states, dtype=float))
    frame = pd.DataFrame(
        states, columns=['node_{}'.format(i) for i in range(states.shape[1])])
    frame.insert(0, 'time_s', np.asarray(times, dtype=float))
    write_table(path, frame, provenance)


def load_trajectory(path):
    """
    Load a trajectory saved by :func:`save_trajectory`.

    :returns:
        A pair ``(times, states)``
    """
    frame = read_table(path, required=('time_s',))
    nodes = [name for name in frame.columns if name.startswith('node_')]
    times = numeric_column(frame, 'time_s', path)
    states = np.column_stack(
        [numeric_column(frame, name, path) for name in nodes])
    return times, states


def save_snapshots(path, snapshots, provenance=()):
    """Save a snapshot matrix (one row per node, one column per time)."""
    frame = pd.DataFrame(
        snapshots.matrix,
        columns=['t_{!r}'.format(float(t)) for t in snapshots.times])
    frame.insert(0, 'node_id', np.arange(snapshots.matrix.shape[0]))
    write_table(path, frame, provenance)


def load_snapshots(path):
    """
    Load a snapshot matrix saved by :func:`save_snapshots`.

    :returns:
        A pair ``(times, matrix)``
    """
    frame = read_table(path, required=('node_id',))
    columns = [name for name in frame.columns if name.startswith('t_')]
    times = np.array([float(name[2:]) for name in columns])
    matrix = np.column_stack(
        [numeric_column(frame, name, path) for name in columns])
    return times, matrix
