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
pivotsched -- irrigation scheduling for center-pivot fields.

The package simulates the soil water of a center-pivot irrigated field with
the Richards equation written in cylindrical coordinates, reduces the model
by clustering nodes that behave alike and schedules irrigation events with a
receding-horizon optimizer over the reduced model.

The numerical modules are :mod:`pivotsched.hydraulics`,
:mod:`pivotsched.crop`, :mod:`pivotsched.field`,
:mod:`pivotsched.reduction`, :mod:`pivotsched.scheduler` and
:mod:`pivotsched.weather`. The ``pivotsched`` executable is defined in
:mod:`pivotsched.commands` on top of the ingredients in
:mod:`pivotsched.core`, :mod:`pivotsched.recipes` and
:mod:`pivotsched.ingredients`.
"""

__version__ = '1.0.0'

from pivotsched.recipes.cmd import Command  # noqa: E402

__all__ = ('Command',)
