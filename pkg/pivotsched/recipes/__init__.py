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
Recipes: ready-made lists of ingredients.

A recipe decides which :class:`~pivotsched.core.Ingredient` objects go into
a :class:`~pivotsched.core.Bowl` and in which order. The command line tool
is built with :class:`~pivotsched.recipes.cmd.CommandRecipe`.
"""

from pivotsched.core import Bowl


__all__ = (
    'Recipe',
    'RecipeError',
)


class Recipe(object):

    """Mechanism to use ingredients to dispatch and invoke commands."""

    def get_ingredients(self):
        """
        Get a list of ingredients for the bowl.

        :returns:
            A list of initialized ingredients.
        :raises RecipeError:
            If the recipe is wrong. This is a developer error.
        """
        raise NotImplementedError

    def prepare(self):
        """Get a new :class:`~pivotsched.core.Bowl` with the ingredients."""
        return Bowl(self.get_ingredients())

    def main(self, argv=None, exit=True):
        """
        Run the application made by this recipe.

        :param argv:
            Command line arguments, None meaning ``sys.argv[1:]``
        :param exit:
            Raise SystemExit after finishing execution
        :returns:
            The exit code of the application, when ``exit`` is False

        With ``exit`` set the result (zero when the command returned None) is
        wrapped in ``SystemExit``. Otherwise the code carried by a
        ``SystemExit`` raised by the application is returned.
        """
        bowl = self.prepare()
        try:
            retval = bowl.eat(argv)
        except SystemExit as exc:
            if exit:
                raise
            return exc.args[0] if exc.args else 0
        if retval is None:
            retval = 0
        if exit:
            raise SystemExit(retval)
        return retval


class RecipeError(Exception):

    """
    Exception raised when a recipe is incorrect.

    .. note::
        This exception should not be handled, it is a developer error.
    """
