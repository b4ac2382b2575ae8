#!/usr/bin/env python

from setuptools import setup

from loopeval import __version__

setup(
    name="loopeval",
    version=__version__,
    description="Loop estimator and value estimation toolkit for Markov reward processes",
    license="GPLv3+",
    platforms="any",
    classifiers=[
        "License :: OSI Approved :: GNU General Public License v3 or later (GPLv3+)",
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    author="LoopEval developers",
    packages=[
        "loopeval",
        "loopeval.cli",
        "loopeval.estimators",
        "loopeval.experiments",
        "loopeval.utils",
    ],
    python_requires=">=3.8",
    install_requires=["numpy>=1.22", "scipy>=1.8", "configparser>=5.2.0"],
    extras_require={"test": ["pytest", "hypothesis"], "xdg": ["pyxdg"]},
    entry_points={"console_scripts": ["loopeval = loopeval.cli:main"]},
)
