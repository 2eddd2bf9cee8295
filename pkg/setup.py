'''"pypi.python.org" Packaging'''

from setuptools import setup

# Import information from some files
with open('readme.md', encoding='utf-8') as f:
    README = f.read()

with open('halfhop/version.py', encoding='utf-8') as f:
    for line in f:
        if 'VERSION =' in line:
            VERSION = line.split('=')[1].strip("' \n")
            break

# Set Setuptools setup
setup(
    # Package information
    name='halfhop',
    version=VERSION,
    description=('Half-Hop graph upsampling, parameter free diffusion and '
                 'ridge risk analysis'),
    long_description=README,
    long_description_content_type='text/markdown',
    license='BSD',

    # Pypi classifiers
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering',
        'License :: OSI Approved :: BSD License',
        'Programming Language :: Python :: 3',
    ],
    keywords='graph augmentation message passing oversmoothing',

    # Package directory
    packages=['halfhop'],
    python_requires='>=3.7',

    # Mandatory requirements
    install_requires=['numpy', 'pandas>=1.5', 'scipy'],

    # Optional requirements
    extras_require={
        'dev':  ['pytest', 'pytest-cov'],
    },

    # Command line
    entry_points={
        'console_scripts': ['halfhop=halfhop.cli:main'],
    },
)
