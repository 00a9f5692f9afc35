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
Soil hydraulic relations.

This module implements the van Genuchten retention curve and the Mualem
conductivity model. All functions accept either a scalar or an array of
pressure heads ``h`` (in meters, negative when unsaturated) and a parameter
object. The parameter object is either a :class:`SoilParams` (one soil) or a
:class:`SoilMap` (one soil per grid node, stored as arrays so that the
functions broadcast over the whole state vector).

The functions are pure and may be called from any number of workers.
"""

import collections
import logging

import numpy as np

from pivotsched.errors import ParameterError
from pivotsched.errors import ValidationError
from pivotsched import storage

__all__ = (
    'DEFAULT_C_FLOOR',
    'SOILS',
    'SoilMap',
    'SoilParams',
    'capillary_capacity',
    'effective_saturation',
    'head_at_stored_water',
    'hydraulic_conductivity',
    'load_soil_map',
    'stored_water',
    'water_content',
)


_logger = logging.getLogger("pivotsched.hydraulics")

#: Capacity used for saturated cells [1/m]
DEFAULT_C_FLOOR = 1e-8

# Bounds of the exponent of |alpha * h| ** n, evaluated in log space.
_LOG_MIN = -700.0
_LOG_MAX = 700.0

_TINY = np.finfo(float).tiny


class SoilParams(collections.namedtuple(
        'SoilParams', 'Ks theta_s theta_r alpha_vg n_vg')):

    """
    Van Genuchten-Mualem parameters of a single soil.

    :attr Ks:
        Saturated hydraulic conductivity [m/s]
    :attr theta_s:
        Saturated moisture content [m3/m3]
    :attr theta_r:
        Residual moisture content [m3/m3]
    :attr alpha_vg:
        Inverse of the air-entry pressure [1/m]
    :attr n_vg:
        Pore-size distribution index [-], greater than one

    Parameters are validated on construction, an invalid combination raises
    :class:`~pivotsched.errors.ParameterError`.
    """

    __slots__ = ()

    def __new__(cls, Ks, theta_s, theta_r, alpha_vg, n_vg):
        """Create and validate soil parameters."""
        self = super(SoilParams, cls).__new__(
            cls, float(Ks), float(theta_s), float(theta_r),
            float(alpha_vg), float(n_vg))
        self.validate()
        return self

    @property
    def m_vg(self):
        """Mualem shape exponent ``1 - 1/n``."""
        return 1.0 - 1.0 / self.n_vg

    def validate(self):
        """Check parameter invariants."""
        if not self.Ks > 0:
            raise ParameterError("Ks must be positive, got {!r}".format(
                self.Ks))
        if not 0 <= self.theta_r < self.theta_s <= 1:
            raise ParameterError(
                "expected 0 <= theta_r < theta_s <= 1, got theta_r={!r},"
                " theta_s={!r}".format(self.theta_r, self.theta_s))
        if not self.alpha_vg > 0:
            raise ParameterError("alpha_vg must be positive, got {!r}".format(
                self.alpha_vg))
        if not self.n_vg > 1:
            raise ParameterError("n_vg must exceed one, got {!r}".format(
                self.n_vg))


#: Loam, sandy clay loam and clay loam, by name.
SOILS = collections.OrderedDict([
    ('loam', SoilParams(2.889e-6, 0.43, 0.078, 3.6, 1.56)),
    ('sandy_clay_loam', SoilParams(3.6388e-6, 0.39, 0.1, 5.9, 1.48)),
    ('clay_loam', SoilParams(7.2223e-7, 0.41, 0.095, 1.9, 1.31)),
])


class SoilMap(object):

    """
    Soil parameters of every node of a grid.

    The map stores one array per parameter, so it can be passed to the
    functions of this module in place of a :class:`SoilParams` object and
    they will broadcast over a state vector of matching length.
    """

    _FIELDS = SoilParams._fields

    def __init__(self, params):
        """
        Initialize the map from a sequence of per-node parameters.

        :param params:
            Sequence of :class:`SoilParams`, one per node, ordered by node id
        """
        params = list(params)
        if not params:
            raise ParameterError("soil map must cover at least one node")
        self._params = tuple(params)
        for index, name in enumerate(self._FIELDS):
            setattr(self, name, np.array([p[index] for p in params]))
        self.m_vg = 1.0 - 1.0 / self.n_vg

    @classmethod
    def uniform(cls, params, n):
        """Create a map with the same soil at ``n`` nodes."""
        if n < 1:
            raise ParameterError("soil map must cover at least one node")
        return cls([params] * n)

    def __len__(self):
        return len(self._params)

    def __repr__(self):
        return "<SoilMap n={} soils={}>".format(
            len(self), len(set(self._params)))

    def at(self, node):
        """Get the :class:`SoilParams` of a single node."""
        return self._params[node]

    @property
    def is_uniform(self):
        """Flag indicating that every node has the same soil."""
        return len(set(self._params)) == 1

    def reshape(self, shape):
        """
        Get a copy of the map whose arrays have the given shape.

        This is used by the field model which works on (Nr, Ntheta, Nz)
        arrays rather than on flat state vectors.
        """
        other = object.__new__(SoilMap)
        other._params = self._params
        for name in self._FIELDS + ('m_vg',):
            setattr(other, name, getattr(self, name).reshape(shape))
        return other


def _scaled_power(h, p):
    """Compute ``|alpha * h| ** n`` safely, assuming ``h < 0``."""
    a = np.abs(p.alpha_vg * h)
    with np.errstate(divide='ignore'):
        log_a = np.log(a)
    return np.exp(np.clip(p.n_vg * log_a, _LOG_MIN, _LOG_MAX)), log_a


def effective_saturation(h, p):
    """
    Compute the effective saturation ``Se(h)``.

    :param h:
        Pressure head [m], scalar or array
    :param p:
        :class:`SoilParams` or :class:`SoilMap`
    :returns:
        ``(1 + |alpha h|^n)^(-m)`` for ``h < 0`` and one otherwise
    """
    h = np.asarray(h, dtype=float)
    power, _ = _scaled_power(np.minimum(h, -_TINY), p)
    se = np.exp(-p.m_vg * np.log1p(power))
    se = np.where(h >= 0, 1.0, np.maximum(se, _TINY))
    return se[()] if se.ndim == 0 else se


def water_content(h, p):
    """
    Compute the volumetric water content ``theta(h)`` [m3/m3].

    ``theta = theta_r + (theta_s - theta_r) * Se(h)``
    """
    h = np.asarray(h, dtype=float)
    theta = p.theta_r + (p.theta_s - p.theta_r) * effective_saturation(h, p)
    theta = np.where(h >= 0, p.theta_s, theta)
    return theta[()] if theta.ndim == 0 else theta


def hydraulic_conductivity(h, p):
    """
    Compute the Mualem hydraulic conductivity ``K(h)`` [m/s].

    ``K = Ks * Se^(1/2) * [1 - (1 - Se^(1/m))^m]^2`` for ``h < 0`` and
    ``Ks`` otherwise. The result is kept strictly positive.
    """
    se = effective_saturation(h, p)
    m = p.m_vg
    s = np.exp(np.log(se) / m)
    # 1 - (1 - s)^m without cancellation when s is tiny
    with np.errstate(divide='ignore'):
        bracket = -np.expm1(m * np.log1p(-np.minimum(s, 1.0)))
    k = p.Ks * np.sqrt(se) * bracket ** 2
    k = np.where(np.asarray(h) >= 0, p.Ks, np.maximum(k, _TINY))
    return k[()] if k.ndim == 0 else k


def capillary_capacity(h, p, c_floor=DEFAULT_C_FLOOR):
    """
    Compute the soil water capacity ``c(h) = d theta / d h`` [1/m].

    :param c_floor:
        Capacity used where the soil is saturated (``h >= 0``) and lower
        bound everywhere else. It keeps the head update finite.
    """
    h = np.asarray(h, dtype=float)
    hn = np.minimum(h, -_TINY)
    power, log_a = _scaled_power(hn, p)
    m = p.m_vg
    n = p.n_vg
    log_c = (np.log((p.theta_s - p.theta_r) * p.alpha_vg * m * n)
             + (n - 1.0) * log_a - (m + 1.0) * np.log1p(power))
    c = np.exp(np.clip(log_c, _LOG_MIN, _LOG_MAX))
    c = np.where(h >= 0, c_floor, np.maximum(c, c_floor))
    return c[()] if c.ndim == 0 else c


def load_soil_map(path, n):
    """
    Load a soil map from a CSV file.

    :param path:
        Path of the CSV file. Columns are ``node_id, Ks, theta_s, theta_r,
        alpha_vg, n_vg``. Instead of the five numbers a row may name one of
        :data:`SOILS` in a ``soil`` column. A single row with ``node_id``
        equal to ``*`` describes a uniform field.
    :param n:
        Number of grid nodes the map must cover
    :returns:
        A :class:`SoilMap` with ``n`` entries
    :raises ParseError, SchemaError, ValidationError:
        If the file is malformed or does not cover every node exactly once.
    """
    frame = storage.read_table(path, required=('node_id',), dtype=str)
    numeric = SoilParams._fields
    has_numbers = all(name in frame.columns for name in numeric)
    if not has_numbers and 'soil' not in frame.columns:
        raise storage.missing_columns(path, numeric, frame.columns)
    by_node = {}
    uniform = None
    for index, row in frame.iterrows():
        line = storage.line_of(frame, index)
        params = _row_params(path, line, row, has_numbers)
        node_id = row['node_id'].strip()
        if node_id == '*':
            if len(frame) != 1:
                raise ValidationError(
                    "uniform soil row must be the only row", path, line)
            uniform = params
            continue
        try:
            node = int(node_id)
        except ValueError:
            raise ValidationError(
                "bad node_id {!r}".format(node_id), path, line)
        if not 0 <= node < n:
            raise ValidationError(
                "node_id {} outside of grid with {} nodes".format(node, n),
                path, line)
        if node in by_node:
            raise ValidationError(
                "node_id {} listed twice".format(node), path, line)
        by_node[node] = params
    if uniform is not None:
        _logger.debug("Uniform soil map from %s: %r", path, uniform)
        return SoilMap.uniform(uniform, n)
    missing = sorted(set(range(n)) - set(by_node))
    if missing:
        raise ValidationError(
            "soil map does not cover {} node(s), first missing is {}".format(
                len(missing), missing[0]), path)
    return SoilMap(by_node[node] for node in range(n))


def _row_params(path, line, row, has_numbers):
    name = row.get('soil')
    if isinstance(name, str) and name.strip():
        try:
            return SOILS[name.strip()]
        except KeyError:
            raise ValidationError(
                "unknown soil {!r}, expected one of {}".format(
                    name.strip(), ', '.join(SOILS)), path, line)
    if not has_numbers:
        raise ValidationError("row has neither soil name nor parameters",
                              path, line)
    try:
        values = [float(row[field]) for field in SoilParams._fields]
    except (TypeError, ValueError):
        raise ValidationError("non-numeric soil parameter", path, line)
    try:
        return SoilParams(*values)
    except ParameterError as exc:
        raise ValidationError(str(exc), path, line)


def stored_water(h, p, c_floor=DEFAULT_C_FLOOR):
    """
    Compute the water stored per unit volume [m3/m3].

    This is ``theta(h)`` for unsaturated soil. Above saturation the stored
    water keeps growing with slope ``c_floor``, matching the capacity of
    :func:`capillary_capacity`.
    """
    h = np.asarray(h, dtype=float)
    w = water_content(h, p) + c_floor * np.maximum(h, 0.0)
    return w[()] if w.ndim == 0 else w


def head_at_stored_water(w, p, c_floor=DEFAULT_C_FLOOR):
    """
    Compute the pressure head holding ``w`` [m3/m3], the inverse of
    :func:`stored_water`.

    Storage at or below ``theta_r`` is held just above it, the head is then
    very negative but finite.
    """
    w = np.asarray(w, dtype=float)
    se = np.clip((w - p.theta_r) / (p.theta_s - p.theta_r), _TINY, 1.0)
    with np.errstate(divide='ignore', over='ignore'):
        log_x = np.log(np.expm1(-np.log(se) / p.m_vg))
    h = -np.exp(np.clip(log_x / p.n_vg, _LOG_MIN, _LOG_MAX)) / p.alpha_vg
    h = np.where(w >= p.theta_s, (w - p.theta_s) / c_floor, h)
    return h[()] if h.ndim == 0 else h
