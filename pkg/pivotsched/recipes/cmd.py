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
Commands of the ``pivotsched`` tool.

A :class:`Command` is a named action with its own arguments. Commands nest
through :attr:`Command.sub_commands` and are run by :class:`CommandRecipe`.
"""

import inspect
import logging

from pivotsched.ingredients import argparse
from pivotsched.ingredients import bundle
from pivotsched.ingredients import cmdtree
from pivotsched.ingredients import crash
from pivotsched.ingredients import log
from pivotsched.recipes import Recipe


__all__ = (
    'Command',
    'CommandRecipe',
)


_logger = logging.getLogger("pivotsched.cmd")


class Command(object):

    """
    A single-purpose command.

    Override :meth:`invoked()` to do the work and
    :meth:`register_arguments()` to add options. The first line of the class
    docstring is the one-line help of the command, the rest its description.
    Text after ``@EPILOG@`` is shown after the option list.
    """

    def __repr__(self):
        return "<{}>".format(self.__class__.__name__)

    def invoked(self, context):
        """
        Callback called when the command gets invoked.

        :param context:
            The :class:`~pivotsched.core.Context` of the run
        :returns:
            The exit code of the tool, None meaning zero
        """
        if not self.get_sub_commands():
            _logger.warning(
                "Command %r doesn't override Command.invoked()", self)

    def register_arguments(self, parser):
        """
        Callback called to register command-specific arguments.

        :param parser:
            Argument parser (from :mod:`argparse`) specific to this command.
        """

    def get_cmd_name(self):
        """Get the name of the command, from the ``name`` attribute."""
        return getattr(self, 'name', None)

    def get_cmd_version(self):
        """Get the version string, None disables ``--version``."""
        return getattr(self, 'version', None)

    def get_cmd_usage(self):
        """Get a custom usage string, None lets argparse compute one."""
        return getattr(self, 'usage', None)

    def _docstring_parts(self):
        doc = self.__class__.__doc__
        if doc is None:
            return None, None, None
        lines = inspect.cleandoc(doc).splitlines()
        if not lines:
            return None, None, None
        body = '\n'.join(lines[1:]).split('@EPILOG@', 1)
        epilog = body[1].strip() if len(body) > 1 else None
        return lines[0], body[0].strip() or None, epilog

    def get_cmd_help(self):
        """
        Get the single-line help of this command.

        :returns:
            ``self.help`` if defined, otherwise the first line of the class
            docstring in lower case and without the trailing dot
        """
        try:
            return self.help
        except AttributeError:
            pass
        first, _, _ = self._docstring_parts()
        return first.rstrip('.').lower() if first else None

    def get_cmd_description(self):
        """Get ``self.description`` or the docstring after the first line."""
        try:
            return self.description
        except AttributeError:
            return self._docstring_parts()[1]

    def get_cmd_epilog(self):
        """Get ``self.epilog`` or the docstring after ``@EPILOG@``."""
        try:
            return self.epilog
        except AttributeError:
            return self._docstring_parts()[2]

    def get_sub_commands(self):
        """
        Get the sub-commands of this command.

        :returns:
            ``self.sub_commands``, a sequence of ``(name, cls)`` pairs, or an
            empty tuple
        """
        return getattr(self, 'sub_commands', ())

    def get_cmd_spices(self):
        """
        Get the set of optional features this command asks for.

        Spices are plain strings, scoped to an ingredient with a ``name:``
        prefix, for example ``log:arguments``.
        """
        return getattr(self, 'spices', set())

    def main(self, argv=None, exit=True):
        """
        Shortcut for running a command.

        See :meth:`pivotsched.recipes.Recipe.main()` for details.
        """
        return CommandRecipe(self).main(argv, exit)


class CommandRecipe(Recipe):

    """A recipe for running a command tree."""

    def __init__(self, command):
        self.command = command

    def get_ingredients(self):
        """
        Get the ingredients of the tool.

        The bundle ingredient follows the parser, whose options it extends,
        and precedes the dispatcher, so that the scenario is loaded before
        any command runs.
        """
        return [
            cmdtree.CommandTreeBuilder(self.command),
            argparse.AutocompleteIngredient(),
            argparse.ParserIngredient(),
            bundle.BundleIngredient(),
            cmdtree.CommandTreeDispatcher(),
            crash.ErrorHandler(),
            log.Logging(),
        ]
