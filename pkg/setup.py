# Copyright (c) 2026, the thetaverify authors
# All rights reserved.
#
# Use of this source code is governed by the BSD 3-clause license found in
# the LICENSE file at the root of this repository.


"""
Setup script for thetaverify.

USAGE:
    python setup.py install or python setup.py bdist_wheel (to create a wheel)
"""

import os
from setuptools import setup, find_packages

from thetaverify import thetaverify_version


def read(fname):
    with open(os.path.join(os.path.dirname(__file__), fname)) as handle:
        return handle.read()


def read_requirements(fname):
    return [line.strip() for line in read(fname).splitlines() if line.strip()]


setup(
    name='thetaverify',
    version=thetaverify_version.THETAVERIFY_VERSION,
    description='High-precision numerical checks of theta function identities on hyperelliptic curves.',
    long_description=read('README.md'),
    long_description_content_type='text/markdown',
    author='The thetaverify authors',
    license='BSD',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'Operating System :: MacOS',
        'Operating System :: Microsoft :: Windows',
        'Operating System :: POSIX :: Linux',
        'Topic :: Scientific/Engineering :: Mathematics',
        'License :: OSI Approved :: BSD License',
        'Programming Language :: Python :: 3',
    ],
    keywords='theta function hyperelliptic curve Jacobian prime form Szego kernel Fay identity KP double cover',
    python_requires='>=3.7',
    install_requires=read_requirements('requirements.txt'),
    packages=find_packages(exclude=["tests.*", "tests"]),
    entry_points={'console_scripts': ['thetaverify = thetaverify.__main__:main']},
    include_package_data=False
)
