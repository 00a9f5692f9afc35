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

"""Ingredients for arranging commands into a tree and running them."""

import collections
import logging
import types

from pivotsched.core import Ingredient


_logger = logging.getLogger("pivotsched.cmdtree")

#: Node of the command hierarchy: the effective name of the command, the
#: command instance and a tuple of child nodes.
cmd_tree_node = collections.namedtuple(
    'cmd_tree_node', 'cmd_name cmd_obj children')


def build_cmd_tree(cmd_cls, cmd_name=None):
    """
    Build the tree of command instances.

    :param cmd_cls:
        Command class or instance at the top of the tree
    :param cmd_name:
        Name of the command, by default its ``get_cmd_name()``
    :returns:
        :data:`cmd_tree_node`
    """
    cmd_obj = cmd_cls() if isinstance(cmd_cls, type) else cmd_cls
    if cmd_name is None:
        cmd_name = cmd_obj.get_cmd_name()
    return cmd_tree_node(cmd_name, cmd_obj, tuple(
        build_cmd_tree(sub_cls, sub_name)
        for sub_name, sub_cls in cmd_obj.get_sub_commands()))


class CommandTreeBuilder(Ingredient):

    """
    Ingredient instantiating the command tree.

    In :meth:`added()` it stores the tree as ``context.cmd_tree`` and the
    top-level command as ``context.cmd_toplevel``, and enables the spices
    the top-level command asks for.
    """

    def __init__(self, command):
        self.command = command

    def added(self, context):
        """Build the command tree."""
        context.cmd_tree = build_cmd_tree(self.command)
        context.cmd_toplevel = context.cmd_tree.cmd_obj
        for spice in context.cmd_toplevel.get_cmd_spices():
            context.bowl.add_spice(spice)


class CommandTreeDispatcher(Ingredient):

    """
    Ingredient running the selected commands from the top down.

    ``invoked()`` of every command on the path from the root to the selected
    leaf is called in turn. A command returning anything other than None
    stops the descent and its value becomes the exit code. A command
    returning a generator wraps its sub-commands: the generator is advanced
    once before and once after them.
    """

    def dispatch(self, context):
        """Run the commands selected on the command line."""
        return self._dispatch(context, 0)

    def _dispatch(self, context, level):
        command = getattr(context.args, 'command{}'.format(level), None)
        if command is None:
            return
        _logger.debug("Invoking command %r", command)
        retval = command.invoked(context)
        if isinstance(retval, types.GeneratorType):
            return self._dispatch_around(context, level, retval, command)
        if retval is None:
            return self._dispatch(context, level + 1)
        _logger.debug("Command %r returned code %s", command, retval)
        return retval

    def _dispatch_around(self, context, level, generator, command):
        next(generator)
        try:
            return self._dispatch(context, level + 1)
        finally:
            try:
                next(generator)
            except StopIteration:
                pass
            else:
                _logger.error(
                    "BUG in %s.invoked(): a generator-based invoked() must"
                    " yield exactly once", command.__class__.__name__)
