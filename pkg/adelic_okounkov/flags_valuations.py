# This file is part of AdelicOkounkov.
# Code licensed under the GNU General Public License v3 or later.

"""
Good flags on the integral model of projective space and their valuations.

A flag over the prime ``p`` is the fibre at ``p``, followed by translated
coordinate hyperplanes of an affine chart of a coordinate face, ending at an
``F_p``-rational centre. The valuation of a section along the flag is its
``p``-content followed by the lexicographically smallest exponent of its
reduction mod ``p``, dehomogenized on the chart and translated to the centre.

Classes:

    * ``GoodFlag`` - Translated coordinate flag over a prime

Functions:

    * ``find_good_flag`` - First flag whose centre avoids a section
    * ``valuation_vector`` - Valuation of one section
    * ``valuation_image`` - Valuations of a finite set of sections

.. image:: classes_flags_valuations.svg
"""

from fractions import Fraction
import itertools
import logging

from sympy import Poly, isprime, symbols

from adelic_okounkov.adelic_model import Place
from adelic_okounkov.exceptions import (BadPrimeError, FaceMismatchError,
                                        ZeroSectionError)
from adelic_okounkov.log_linear import p_adic_valuation

logger = logging.getLogger(__name__)


class GoodFlag(object):

    """
    Flag ``X_p > {y_s1 = 0} > {y_s1 = y_s2 = 0} > ... > centre``.

    ``y_i = x_i / x_chart - center_i`` are the translated chart coordinates of
    the face variables other than ``chart``, listed in face order; ``order``
    is the sequence of face variables cut out one after the other.
    """

    def __init__(self, prime, chart, center, order, face):
        if not isprime(prime):
            raise BadPrimeError("{} is not a prime.".format(prime))
        face = tuple(sorted(face))
        if chart not in face:
            raise FaceMismatchError("Chart {} is not a variable of face {}."
                                    .format(chart, face))
        others = tuple(j for j in face if j != chart)
        if sorted(order) != list(others):
            raise FaceMismatchError("Order {} must list the variables {}."
                                    .format(order, others))
        if len(center) != len(others):
            raise FaceMismatchError("Centre {} needs {} coordinates.".format(
                center, len(others)))
        #: Prime of the vertical component
        self.prime = prime
        #: Variable set to 1
        self.chart = chart
        #: Centre in F_p^k, lifted to 0..p-1
        self.center = tuple(int(c) % prime for c in center)
        #: Order in which the face variables are cut out
        self.order = tuple(order)
        #: Coordinate face carrying the flag
        self.face = face

    @property
    def variables(self):
        """Face variables other than the chart, in face order."""
        return tuple(j for j in self.face if j != self.chart)

    @property
    def is_centered_at_origin(self):
        return not any(self.center)

    def __eq__(self, other):
        return (isinstance(other, GoodFlag) and
                self.to_json() == other.to_json())

    def __hash__(self):
        return hash((self.prime, self.chart, self.center, self.order,
                     self.face))

    def __repr__(self):
        return "GoodFlag(p={}, chart={}, center={}, order={})".format(
            self.prime, self.chart, self.center, self.order)

    def to_json(self):
        return {"p": self.prime, "chart": self.chart,
                "center": list(self.center), "order": list(self.order)}

    @classmethod
    def from_json(cls, data, face):
        return cls(data["p"], data["chart"], data["center"], data["order"],
                   face)

    def check_model(self, model):
        """Reject flags over primes where the model has a weight."""
        if Place(self.prime) in model.weights:
            raise BadPrimeError("The model carries a weight at p={}."
                                .format(self.prime))


def _residue(value, prime):
    return value.numerator * pow(value.denominator, -1, prime) % prime


def _reduced_terms(section, prime):
    """``(w0, {alpha: c mod p})`` for the section divided by its content."""
    content = min(p_adic_valuation(c, prime)
                  for c in section.coefficients.values())
    unit = Fraction(prime) ** content
    terms = {}
    for alpha, c in section.coefficients.items():
        residue = _residue(c / unit, prime)
        if residue:
            terms[alpha] = residue
    return content, terms


def _chart_polynomial(terms, flag):
    """Reduction dehomogenized on the chart and translated to the centre."""
    variables = flag.variables
    if not variables:
        return None
    generators = symbols("y0:{}".format(len(variables)))
    data = {tuple(alpha[j] for j in variables): c
            for alpha, c in terms.items()}
    polynomial = Poly.from_dict(data, *generators, modulus=flag.prime)
    if not flag.is_centered_at_origin:
        shift = {y: y + c for y, c in zip(generators, flag.center) if c}
        polynomial = Poly(polynomial.as_expr().subs(shift, simultaneous=True),
                          *generators, modulus=flag.prime)
    return polynomial


def find_good_flag(model, face, avoid, prime):
    """
    Lexicographically first flag over ``prime`` on ``face`` whose centre is
    not a zero of ``avoid`` mod ``p``.

    Charts are tried in increasing order, then centres in lexicographic
    order. ``avoid`` may be ``None`` (nothing to avoid). Returns ``None``
    when every ``F_p``-point of the face is a zero.
    """
    face = model.check_face(face)
    if not isprime(prime):
        raise BadPrimeError("{} is not a prime.".format(prime))
    if Place(prime) in model.weights:
        raise BadPrimeError("The model carries a weight at p={}."
                            .format(prime))
    terms = None
    if avoid is not None:
        avoid.check_degree(model)
        restricted = avoid.restrict(face)
        if restricted.is_zero:
            logger.info("Section to avoid vanishes on face %s.", face)
            return None
        _, terms = _reduced_terms(restricted, prime)
    for chart in face:
        others = [j for j in face if j != chart]
        for center in itertools.product(range(prime), repeat=len(others)):
            if terms is None or _value_at(terms, others, center, prime):
                flag = GoodFlag(prime, chart, center, others, face)
                logger.debug("Good flag %r", flag)
                return flag
    return None


def _value_at(terms, others, center, prime):
    """Value of the reduced section at the chart point, mod ``p``."""
    total = 0
    for alpha, c in terms.items():
        value = c
        for j, x in zip(others, center):
            if alpha[j]:
                value = value * pow(x, alpha[j], prime) % prime
        total += value
    return total % prime


def valuation_vector(section, flag):
    """
    Valuation ``(w0, w1, ..., wk)`` of a nonzero section along ``flag``.

    ``w0`` is the ``p``-adic content. The reduction of ``section / p^w0``
    is dehomogenized on the chart and translated to the centre; ``w_i`` is
    then the order of vanishing along the ``i``-th variable of ``order``
    after the previous variables have been divided out and set to zero.
    """
    if section.is_zero:
        raise ZeroSectionError("The zero section has no valuation.")
    face = set(flag.face)
    for alpha in section.coefficients:
        if any(a and j not in face for j, a in enumerate(alpha)):
            raise FaceMismatchError("Section {} is not supported on face {}."
                                    .format(section, flag.face))
    content, terms = _reduced_terms(section, flag.prime)
    polynomial = _chart_polynomial(terms, flag)
    if polynomial is None:
        return (content,)
    positions = [flag.variables.index(j) for j in flag.order]
    monomials = [monomial for monomial, c in polynomial.terms() if c]
    orders = []
    for position in positions:
        lowest = min(monomial[position] for monomial in monomials)
        orders.append(lowest)
        monomials = [monomial for monomial in monomials
                     if monomial[position] == lowest]
    return (content,) + tuple(orders)


def valuation_image(sections, flag):
    """Return ``(image, count)`` of the nonzero sections among ``sections``."""
    image = {valuation_vector(s, flag) for s in sections if not s.is_zero}
    return image, len(image)
