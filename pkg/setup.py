# -*- coding: utf-8 -*-

import setuptools

from ntucore.base import NTUCORE_VERSION

with open('README.md', encoding='utf-8') as f:
    long_description = f.read()


setuptools.setup(
    name="ntucore",

    version=NTUCORE_VERSION,

    description="Core membership and optimization over the core of NTU linear production games",

    long_description=long_description,

    long_description_content_type='text/markdown',

    keywords="cooperative games, core, ntu, linear production, intersection cuts, cutting planes",

    license="MIT",

    packages=setuptools.find_packages(
        exclude=[
            'ci',
            'scripts',
            'test',
        ]
    ),

    install_requires=[
        "numpy>=1.22",
        "scipy>=1.9",
        "pandas>=1.4",
        "matplotlib>=3.5",
    ],

    setup_requires=[
        "wheel",
    ],

    entry_points={
        'console_scripts': [
            'ntucore=ntucore.cli:main',
        ],
    },

    python_requires=">=3.8"
)
