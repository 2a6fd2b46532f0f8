from __future__ import print_function
import sys
from setuptools import setup, find_packages
from setuptools.command.test import test as test_command


class PyTest(test_command):
    user_options = [('pytest-args=', 'a', "Arguments to pass to py.test")]

    def initialize_options(self):
        test_command.initialize_options(self)
        self.pytest_args = []

    def run_tests(self):
        import pytest
        errno = pytest.main(self.pytest_args)
        sys.exit(errno)


setup(
    name="pyrobustfeat",
    version="0.1.0",
    license='GNU Lesser General Public License, version 3 (LGPLv3)',
    description="Adversarial training with robust normalized features, "
                "on a small numpy autodiff engine",
    author="pyrobustfeat developers",
    packages=find_packages(exclude=["examples", "examples.*"]),
    package_data={"": ["*.yaml"]},
    tests_require=['pytest', 'flake8>=3.0'],
    cmdclass={'test': PyTest},
    zip_safe=False,
    entry_points={
        "console_scripts": [
            "pyrobustfeat=pyrobustfeat.experiment.cli:main",
        ],
    },
    classifiers=[
        # complete classifier list:
        # http://pypi.python.org/pypi?%3Aaction=list_classifiers
        "Development Status :: 4 - Beta",
        "Intended Audience :: Developers",
        "Intended Audience :: Science/Research",
        "Operating System :: Unix",
        "Operating System :: POSIX",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: Implementation :: CPython",
        "Topic :: Scientific/Engineering",
        "Topic :: Scientific/Engineering :: Artificial Intelligence",
    ],
    keywords=[
        "adversarial", "robustness", "batch normalization", "fgsm", "pgd",
        "autodiff"
    ],
    python_requires=">=3.7",
    install_requires=[
        "numpy", "PyYAML", "pandas", "flake8>=3.0", "pytest"
    ],
    extras_require={
        "docs": ["sphinx", "sphinx_rtd_theme"]
    }
)
