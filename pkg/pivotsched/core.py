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
Application lifecycle.

The command line tool is assembled from :class:`Ingredient` objects placed in
a :class:`Bowl`. The bowl walks every ingredient through the same sequence of
phases and the ingredients share data through a :class:`Context`.
"""

import logging
import sys

__all__ = (
    'Bowl',
    'Context',
    'Ingredient',
)


_logger = logging.getLogger("pivotsched.core")

#: Phases run before dispatch, in order
SETUP_PHASES = (
    'added',
    'build_early_parser',
    'preparse',
    'early_init',
    'build_parser',
    'parse',
    'late_init',
)


class Ingredient(object):

    """
    Part of the application.

    Each phase method receives the shared :class:`Context`. The phases are
    called in this order:

    - :meth:`added()`, to find collaborating ingredients
    - :meth:`build_early_parser()` and :meth:`preparse()`, to look at the few
      options needed before the full parser exists (logging, ``--help``)
    - :meth:`early_init()`
    - :meth:`build_parser()` and :meth:`parse()`, to parse the command line
    - :meth:`late_init()`
    - :meth:`dispatch()`, to run the selected command
    - :meth:`dispatch_succeeded()` or :meth:`dispatch_failed()`
    - :meth:`shutdown()`

    Ingredients document what they store in the context.
    """

    def __str__(self):
        return self.__class__.__name__

    def added(self, context):
        """Ingredient method called before anything else."""

    def build_early_parser(self, context):
        """Ingredient method called to build the early parser."""

    def preparse(self, context):
        """Ingredient method called to pre-parse command line arguments."""

    def early_init(self, context):
        """Ingredient method for early initialization."""

    def build_parser(self, context):
        """Ingredient method called to build the full parser."""

    def parse(self, context):
        """Ingredient method called to parse command line arguments."""

    def late_init(self, context):
        """Ingredient method for late initialization."""

    def dispatch(self, context):
        """
        Ingredient method for running the command.

        .. note::
            Dispatch stops at the first ingredient that returns something
            other than None.
        """

    def dispatch_succeeded(self, context):
        """Ingredient method called when the command finished."""

    def dispatch_failed(self, context):
        """
        Ingredient method called when the command raised an exception.

        The exception is available as ``context.exc_type``,
        ``context.exc_value`` and ``context.traceback``.
        """

    def shutdown(self, context):
        """Ingredient method called after all other methods."""


class Context(object):

    """
    Free-form storage shared by the ingredients of one run.

    The representation lists the names of the stored objects only.
    """

    def __repr__(self):
        return "<Context {{{}}}>".format(
            ', '.join(sorted(self.__dict__.keys())))


class Bowl(object):

    """
    Runner of a list of ingredients.

    :attr ingredients: the ingredients, in the order their phases run
    :attr context: the :class:`Context` of the run

    .. note::
        A bowl runs once. Create another bowl to run the tool again.
    """

    def __init__(self, ingredients):
        self.ingredients = ingredients
        self.context = Context()
        self.context.bowl = self
        self.context.spices = set()

    def add_spice(self, spice):
        """Enable the optional feature named ``spice``."""
        self.context.spices.add(spice)

    def has_spice(self, spice):
        """Check if the optional feature named ``spice`` is enabled."""
        return spice in self.context.spices

    def eat(self, argv=None):
        """
        Run the application.

        :param argv:
            Command line arguments, None meaning ``sys.argv[1:]``
        :returns:
            Whatever the dispatching ingredient returned

        ``KeyboardInterrupt`` during setup quietly shuts the application
        down. ``SystemExit`` raised by a command propagates, any other
        exception is stored in the context and handed to
        :meth:`Ingredient.dispatch_failed()`.
        """
        try:
            self.context.argv = argv
            for phase in SETUP_PHASES:
                self._run_phase(phase)
        except KeyboardInterrupt:
            self._run_phase('shutdown')
            return
        try:
            result = self._dispatch()
        except SystemExit:
            raise
        except BaseException:
            (self.context.exc_type, self.context.exc_value,
             self.context.traceback) = sys.exc_info()
            self._run_phase('dispatch_failed')
        else:
            self._run_phase('dispatch_succeeded')
            return result
        finally:
            self._run_phase('shutdown')

    def _run_phase(self, phase):
        """Call the ``phase`` method of every ingredient."""
        _logger.debug("Running phase %s", phase)
        for ingredient in self.ingredients:
            getattr(ingredient, phase)(self.context)

    def _dispatch(self):
        for ingredient in self.ingredients:
            result = ingredient.dispatch(self.context)
            if result is not None:
                return result
