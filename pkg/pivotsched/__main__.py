#!/usr/bin/env python
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

"""Run the ``pivotsched`` executable with ``python -m pivotsched``."""

from pivotsched.commands import main

if __name__ == '__main__':
    main()
