#!/usr/bin/env python3
from io import open
from os.path import abspath, dirname, join

from setuptools import setup

PROJECT_ROOT = abspath(dirname(__file__))
with open(join(PROJECT_ROOT, 'README.rst'), encoding='utf-8') as f:
    readme = f.read()

version = (
    [ln for ln in open(join(PROJECT_ROOT, 'cochannel', '__init__.py')) if '__version__' in ln][0]
    .split('=')[-1]
    .strip()
    .strip('\'"')
)

setup(
    name='cochannel',
    version=version,
    description='Frame-level detection of overlapping speech in single-channel recordings',
    long_description=readme,
    package_data={"cochannel": ["py.typed"]},
    packages=[
        "cochannel",
        "cochannel._cnn",
        "cochannel._features",
        "cochannel._mixer",
        "cochannel._protocol",
        "cochannel._utils",
    ],
    platforms=['unix', 'linux', 'osx'],
    license='LGPL',
    zip_safe=False,
    python_requires='>=3.8',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: GNU Lesser General Public License v2 (LGPLv2)',
        'Operating System :: POSIX',
        'Operating System :: POSIX :: Linux',
        'Operating System :: MacOS :: MacOS X',
        'Topic :: Multimedia :: Sound/Audio :: Speech',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: Implementation :: CPython',
    ],
    keywords=['speech', 'overlap detection', 'co-channel', 'pyknogram', 'MFCC', 'CNN'],
    install_requires=['numpy>=1.22', 'scipy>=1.8', 'scikit-learn>=1.3'],
    entry_points={'console_scripts': ['cochannel=cochannel._cli:main']},
)
