#!/usr/bin/env python
# coding: utf-8

from setuptools import setup
import os

top, _ = os.path.split(__file__)
with open(os.path.join(top, 'VERSION'), 'r') as fin:
    version = fin.read().strip() + '+local'

setup(
    name='warp_tools',
    version=version,
    description='Numerical checks of Killing and 2-Killing identities on warped products and static spacetimes',

    packages=['warp_tools'],
    package_data={
        'warp_tools': ['scenarios/*.scn'],
        },
    python_requires='>=3.10',
    install_requires=[
        'numpy',
        'tomli; python_version < "3.11"',
        ],
    extras_require={
        'test': ['pytest', 'hypothesis'],
        },

    entry_points={
        'console_scripts': [
            'warpcheck = warp_tools.warpcheck:main',
            ],
        }
    )
