# This file is part of AdelicOkounkov.
# Code licensed under the GNU General Public License v3 or later.
from setuptools import setup

setup(name="AdelicOkounkov",
      version="1.0.0",
      description=("Restricted arithmetic volumes and Okounkov semigroups of "
                   "diagonal adelic models."),
      long_description=open("README.rst").read(),
      packages=["adelic_okounkov"],
      scripts=["bin/adelic_okounkov"],
      license="GNU GPL",
      python_requires=">=3.9",
      install_requires=["simplejson",
                        "numpy",
                        "progressbar2",
                        "python-flint",
                        "scipy>=1.11",
                        "sympy",
                        "mpmath"],
      tests_require=["pytest"],
      extras_require={"test": ["pytest"]},
      provides=["adelic_okounkov"],
      classifiers=["Development Status :: 4 - Beta",
                   "Natural Language :: English",
                   "Operating System :: OS Independent",
                   "Programming Language :: Python :: 3",
                   "Intended Audience :: Education",
                   "Intended Audience :: Science/Research",
                   "License :: OSI Approved :: GNU General Public License v3 "
                   "or later (GPLv3+)",
                   "Topic :: Scientific/Engineering :: Mathematics"])
