#!/usr/bin/env python
# encoding: utf-8
#
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
"""setup for pivotsched."""

try:
    from setuptools import setup
except ImportError:
    from distutils.core import setup


readme = open('README.rst').read()
history = open('HISTORY.rst').read().replace('.. :changelog:', '')


setup(
    name='pivotsched',
    version='1.0.0',
    description='Irrigation scheduling for center-pivot fields',
    long_description=readme + '\n\n' + history,
    author='The pivotsched developers',
    packages=['pivotsched', 'pivotsched.ingredients', 'pivotsched.recipes'],
    package_dir={'pivotsched': 'pivotsched'},
    package_data={'pivotsched': ['scenarios/*.ini', 'scenarios/*.csv']},
    include_package_data=True,
    license="LGPLv3",
    zip_safe=False,
    keywords='irrigation richards model-reduction mpc center-pivot',
    python_requires='>=3.6',
    install_requires=[
        'numpy>=1.17',
        'pandas>=0.25',
        'scipy>=1.3',
    ],
    extras_require={
        'completion': ['argcomplete'],
    },
    entry_points={
        'console_scripts': [
            'pivotsched=pivotsched.commands:main',
        ],
    },
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Environment :: Console',
        ('License :: OSI Approved :: GNU Lesser General Public License v3'
         ' (LGPLv3)'),
        'Natural Language :: English',
        'Operating System :: OS Independent',
        'Topic :: Scientific/Engineering',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.6',
        'Programming Language :: Python :: 3.7',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: Implementation :: CPython',
    ],
    test_suite='pivotsched',
)
