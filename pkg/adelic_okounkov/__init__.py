# This file is part of AdelicOkounkov.
# Code licensed under the GNU General Public License v3 or later.

"""
Restricted arithmetic volumes and Okounkov semigroups of diagonal adelic
models on projective space.

Modules:

    * ``log_linear`` - Exact numbers in Q + sum_p Q log p
    * ``lattice_core`` - Lattices, convex bodies and CL-subsets
    * ``polytope_integrals`` - Piecewise-linear calculus on simplices
    * ``adelic_model`` - Diagonal adelic models and their small sections
    * ``flags_valuations`` - Good flags and valuation vectors
    * ``okounkov`` - Semigroups, Okounkov bases and volume estimates
    * ``verify`` - Certificates for counting and volume identities
    * ``ui_utils`` - Utilities for user interaction
    * ``cli`` - Command line front end
    * ``exceptions`` - Various exceptions

Import structure:

.. image:: packages_AdelicOkounkov.svg
    :width: 100%

Exact numbers
*************

.. automodule:: adelic_okounkov.log_linear

Lattices and CL-subsets
***********************

.. automodule:: adelic_okounkov.lattice_core

Polytope integrals
******************

.. automodule:: adelic_okounkov.polytope_integrals

Adelic models
*************

.. automodule:: adelic_okounkov.adelic_model

Flags and valuations
********************

.. automodule:: adelic_okounkov.flags_valuations

Okounkov semigroups
*******************

.. automodule:: adelic_okounkov.okounkov

Certificates
************

.. automodule:: adelic_okounkov.verify

User interface utilities
************************

.. automodule:: adelic_okounkov.ui_utils

Command line
************

.. automodule:: adelic_okounkov.cli

Exceptions
**********

.. automodule:: adelic_okounkov.exceptions
"""
