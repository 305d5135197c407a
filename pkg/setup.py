"""A setuptools based setup module.
"""

from setuptools import setup, find_packages
from codecs import open
from os import path

here = path.abspath(path.dirname(__file__))

# Get the long description from the README file
with open(path.join(here, 'README.md'), encoding='utf-8') as f:
    long_description = f.read()

# Get the version number
version = {}
with open("eaiadd/_version.py") as fp:
    exec(fp.read(), version)

setup(
    name='eaiadd',

    version=version['__version__'],

    description='Emotion-acoustic inconsistency audio deepfake detection',
    long_description=long_description,
    long_description_content_type='text/markdown',

    license='MIT',

    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'Topic :: Multimedia :: Sound/Audio :: Analysis',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python :: 3',
    ],

    keywords='anti-spoofing deepfake speech graph-attention',

    packages=find_packages(exclude=['tests', 'examples', 'examples.*']),

    python_requires='>=3.8',

    install_requires=['Click>=8.0', 'pyaml', 'numpy', 'torch'],

    extras_require={
        'test': ['pytest'],
    },

    entry_points = {
        'console_scripts': ['eaiadd=eaiadd.eaiadd:main']
    },

    include_package_data=True,

    package_data={'eaiadd': ['examples/*.yaml']},

)
