#!/usr/bin/env python
""" Installs the slot_tools library """

from setuptools import setup

with open('README.md') as f:
    README = f.read()

setup(
    name='slot-tools',
    version='0.1.0',
    description='Robust appointment slot template design',
    long_description=README,
    long_description_content_type='text/markdown',
    license='Apache License 2.0',
    packages=['slot_tools'],
    install_requires=['six', 'numpy', 'scipy', 'pandas'],
    entry_points={
        "console_scripts": [
            "slot_design = slot_tools.cli:main"
            ]
        }
    )
