# import multiprocessing to avoid this bug (http://bugs.python.org/issue15881#msg170215)
import multiprocessing
assert multiprocessing
import re
from setuptools import setup, find_packages


def get_version():
    """
    Extracts the version number from the version.py file.
    """
    VERSION_FILE = 'uncertainty_sampling/version.py'
    mo = re.search(r'^__version__ = [\'"]([^\'"]*)[\'"]', open(VERSION_FILE, 'rt').read(), re.M)
    if mo:
        return mo.group(1)
    else:
        raise RuntimeError('Unable to find version string in {0}.'.format(VERSION_FILE))


requirements = [
    'numpy>=1.17',
    'scipy>=1.6',
]

tests_require = [
    'coverage>=5.0',
    'flake8>=3.8',
    'hypothesis>=5.0',
    'mock>=3.0',
    'pytest>=6.0',
    'pytest-cov>=2.10',
]


setup(
    name='python-uncertainty-sampling',
    version=get_version(),
    description='Uncertainty products and probabilities of sampled wave-packet measurements',
    long_description=open('README.rst').read(),
    keywords='quantum, uncertainty, wave packets, projectors',
    packages=find_packages(),
    classifiers=[
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
        'Topic :: Scientific/Engineering :: Physics',
    ],
    license='MIT',
    python_requires='>=3.8',
    install_requires=requirements,
    include_package_data=True,
    tests_require=tests_require,
    extras_require={'tests': tests_require},
    entry_points={
        'console_scripts': [
            'uncertainty-sampling = uncertainty_sampling.cli:main',
        ],
    },
    zip_safe=False,
)
