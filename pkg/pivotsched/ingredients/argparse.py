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
Command line parsing with :mod:`argparse`.

:class:`ParserIngredient` builds the parsers of the command tree and
:class:`AutocompleteIngredient` hooks the optional ``argcomplete`` package
into the parser for shell completion.
"""

import argparse

from pivotsched.core import Ingredient
from pivotsched.recipes import RecipeError


class ParserIngredient(Ingredient):

    """
    Ingredient for parsing the command line.

    Two parsers are used. The *early parser* knows only ``--help``,
    ``--version`` and the options other ingredients add to
    ``context.early_parser`` (logging), everything else is kept in ``rest``.
    Its result is ``context.early_args``.

    The full parser, ``context.parser``, has one sub-parser per command of
    ``context.cmd_tree``. Ingredients placed after this one may add global
    options to it before :meth:`parse()` stores the result in
    ``context.args``. The command object of nesting level ``N`` is available
    as ``context.args.commandN``.
    """

    def build_early_parser(self, context):
        """Create ``context.early_parser``."""
        parser = argparse.ArgumentParser(add_help=False)
        parser.add_argument("rest", nargs="...", help=argparse.SUPPRESS)
        parser.add_argument("-h", "--help", action="store_const", const=None)
        if context.cmd_tree.cmd_obj.get_cmd_version() is not None:
            parser.add_argument(
                "--version", action="store_const", const=None)
        context.early_parser = parser

    def preparse(self, context):
        """Pre-parse ``context.argv`` into ``context.early_args``."""
        context.early_args, _ = context.early_parser.parse_known_args(
            context.argv)

    def build_parser(self, context):
        """Create ``context.parser`` and ``context.max_level``."""
        name, command, children = context.cmd_tree
        parser = argparse.ArgumentParser(
            prog=name, **self._get_parser_kwargs(command))
        parser.add_argument("-h", "--help", action="help")
        version = command.get_cmd_version()
        if version is not None:
            parser.add_argument(
                "--version", action="version", version=version,
                help="show program's version number and exit")
        context.max_level = self._add_command(
            parser, command, children, 0)
        context.parser = parser

    def parse(self, context):
        """Parse ``context.argv`` into ``context.args``."""
        context.args = context.parser.parse_args(context.argv)

    def _get_parser_kwargs(self, command):
        return {
            'usage': command.get_cmd_usage(),
            'description': command.get_cmd_description(),
            'epilog': command.get_cmd_epilog(),
            'formatter_class': argparse.RawDescriptionHelpFormatter,
            'add_help': False,
        }

    def _add_command(self, parser, command, children, level):
        command.register_arguments(parser)
        parser.set_defaults(**{'command{}'.format(level): command})
        if not children:
            return level
        subparsers = parser.add_subparsers(
            dest='sub_command', metavar='COMMAND', help="command to run")
        subparsers.required = True
        max_level = level
        for name, child, grandchildren in children:
            sub_parser = subparsers.add_parser(
                str(name), help=child.get_cmd_help(),
                **self._get_parser_kwargs(child))
            sub_parser.add_argument("-h", "--help", action="help")
            max_level = max(max_level, self._add_command(
                sub_parser, child, grandchildren, level + 1))
        return max_level


class AutocompleteIngredient(Ingredient):

    """
    Ingredient for shell completion through ``argcomplete``.

    Nothing happens when ``argcomplete`` is not installed. The ingredient
    must precede :class:`ParserIngredient` so that completion runs before
    the command line is parsed.
    """

    def parse(self, context):
        """Let ``argcomplete`` answer a completion request, if any."""
        try:
            import argcomplete
        except ImportError:
            return
        try:
            parser = context.parser
        except AttributeError:
            raise RecipeError(
                "shell completion needs context.parser, add the"
                " ParserIngredient to the recipe")
        argcomplete.autocomplete(parser)
