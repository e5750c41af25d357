# This file is part of AdelicOkounkov.
# Code licensed under the GNU General Public License v3 or later.

"""
Exact real numbers of the form ``q0 + q2 log 2 + q3 log 3 + ...``.

Weights of adelic metrics are measured in nats and routinely involve
logarithms of primes, for instance the weight ``log 2`` whose dyadic floor
must come out as an exact integer. ``LogLinear`` keeps such numbers exact:
sums and rational multiples stay in the same Q-vector space, and equality is
structural because 1, log 2, log 3, ... are linearly independent over Q.
Signs and floors are decided exactly when that independence makes them
trivial and numerically otherwise, with ``mpmath`` taking over whenever a
float evaluation is too close to call.

Classes:

    * ``LogLinear`` - Element of Q + sum_p Q log p

Functions:

    * ``p_adic_valuation`` - Exponent of a prime in a nonzero rational

.. image:: classes_log_linear.svg
"""

from fractions import Fraction
import math
import re

import mpmath
from sympy import factorint

#: Relative float margin inside which a sign or floor is delegated to mpmath
FLOAT_MARGIN = 1e-9

_NUMBER = r"\d+(?:\.\d+)?(?:/\d+)?"
_LOG_TERM = re.compile(r"(?:({0})\*?)?log\(({0})\)".format(_NUMBER))
_RATIONAL_TERM = re.compile(_NUMBER)


def p_adic_valuation(value, prime):
    """Return ``v_p(value)`` for a nonzero rational ``value``."""
    value = Fraction(value)
    if not value:
        raise ValueError("The zero valuation is infinite.")
    valuation = 0
    numerator, denominator = value.numerator, value.denominator
    while not numerator % prime:
        numerator //= prime
        valuation += 1
    while not denominator % prime:
        denominator //= prime
        valuation -= 1
    return valuation


class LogLinear(object):

    """
    Real number ``rational + sum(coefficient * log(prime))``.

    Instances are immutable and hashable. Arithmetic with other
    ``LogLinear`` objects, integers and ``Fraction`` objects is exact;
    multiplication and division are only defined by rationals.
    """

    __slots__ = ("rational", "logs")

    def __init__(self, rational=0, logs=None):
        #: Rational part
        self.rational = Fraction(rational)
        items = logs.items() if isinstance(logs, dict) else (logs or ())
        collected = {}
        for prime, coefficient in items:
            collected[int(prime)] = (collected.get(int(prime), 0) +
                                     Fraction(coefficient))
        #: Sorted ``(prime, coefficient)`` pairs with nonzero coefficients
        self.logs = tuple(sorted((p, q) for p, q in collected.items() if q))

    @classmethod
    def coerce(cls, value):
        if isinstance(value, LogLinear):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        return cls(value)

    @classmethod
    def log_of(cls, value):
        """Exact ``log(value)`` for a positive rational ``value``."""
        value = Fraction(value)
        if value <= 0:
            raise ValueError("Logarithm of a non-positive number.")
        logs = {}
        for prime, exponent in factorint(value.numerator).items():
            logs[prime] = logs.get(prime, 0) + exponent
        for prime, exponent in factorint(value.denominator).items():
            logs[prime] = logs.get(prime, 0) - exponent
        return cls(0, logs)

    @classmethod
    def parse(cls, text):
        """
        Parse strings such as ``"1/5"``, ``"log(2)"`` or ``"-3/10+1/2*log(3)"``.

        Raises ``ValueError`` on anything else.
        """
        compact = str(text).replace(" ", "")
        if not compact:
            raise ValueError("Empty number.")
        if compact[0] not in "+-":
            compact = "+" + compact
        result = cls()
        position = 0
        for match in re.finditer(r"[+-][^+-]+", compact):
            if match.start() != position:
                break
            position = match.end()
            sign, term = match.group()[0], match.group()[1:]
            factor = -1 if sign == "-" else 1
            log_match = _LOG_TERM.fullmatch(term)
            if log_match:
                coefficient = Fraction(log_match.group(1) or 1)
                argument = Fraction(log_match.group(2))
                result = result + cls.log_of(argument) * (factor * coefficient)
            elif _RATIONAL_TERM.fullmatch(term):
                result = result + factor * Fraction(term)
            else:
                raise ValueError("Cannot read {!r} in {!r}.".format(term,
                                                                    text))
        if position != len(compact):
            raise ValueError("Cannot read {!r}.".format(text))
        return result

    def __str__(self):
        terms = []
        if self.rational or not self.logs:
            terms.append(str(self.rational))
        for prime, coefficient in self.logs:
            if coefficient == 1:
                terms.append("log({})".format(prime))
            elif coefficient == -1:
                terms.append("-log({})".format(prime))
            else:
                terms.append("{}*log({})".format(coefficient, prime))
        text = terms[0]
        for term in terms[1:]:
            text += term if term.startswith("-") else "+" + term
        return text

    def __repr__(self):
        return "LogLinear({!r})".format(str(self))

    def __hash__(self):
        if not self.logs:
            return hash(self.rational)
        return hash((self.rational, self.logs))

    def __eq__(self, other):
        try:
            other = LogLinear.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.rational == other.rational and self.logs == other.logs

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    def __add__(self, other):
        other = LogLinear.coerce(other)
        return LogLinear(self.rational + other.rational,
                         self.logs + other.logs)

    __radd__ = __add__

    def __neg__(self):
        return LogLinear(-self.rational, [(p, -q) for p, q in self.logs])

    def __sub__(self, other):
        return self + (-LogLinear.coerce(other))

    def __rsub__(self, other):
        return LogLinear.coerce(other) - self

    def __mul__(self, factor):
        if isinstance(factor, LogLinear):
            if factor.logs and self.logs:
                raise TypeError("Products of logarithms are not log-linear.")
            if factor.logs:
                return factor * self.rational
            factor = factor.rational
        factor = Fraction(factor)
        return LogLinear(self.rational * factor,
                         [(p, q * factor) for p, q in self.logs])

    __rmul__ = __mul__

    def __truediv__(self, divisor):
        if isinstance(divisor, LogLinear):
            if divisor.logs:
                raise TypeError("Division by a logarithm is not log-linear.")
            divisor = divisor.rational
        return self * (1 / Fraction(divisor))

    def __float__(self):
        return float(self.rational) + math.fsum(float(q) * math.log(p)
                                                for p, q in self.logs)

    def is_rational(self):
        return not self.logs

    def _scale(self):
        return abs(float(self.rational)) + math.fsum(
            abs(float(q)) * math.log(p) for p, q in self.logs)

    def _mpf(self):
        value = mpmath.mpf(self.rational.numerator) / self.rational.denominator
        for prime, coefficient in self.logs:
            value += (mpmath.mpf(coefficient.numerator) /
                      coefficient.denominator * mpmath.log(prime))
        return value

    def sign(self):
        """Exact sign: -1, 0 or 1."""
        if not self.logs:
            return (self.rational > 0) - (self.rational < 0)
        if not self.rational and all(q > 0 for _, q in self.logs):
            return 1
        if not self.rational and all(q < 0 for _, q in self.logs):
            return -1
        value = float(self)
        if abs(value) > FLOAT_MARGIN * (1 + self._scale()):
            return 1 if value > 0 else -1
        digits = 50
        while True:
            with mpmath.workdps(digits):
                value = self._mpf()
                if abs(value) > mpmath.mpf(10) ** (10 - digits):
                    return 1 if value > 0 else -1
            digits *= 2

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def floor_over_log(self, base):
        """Return ``floor(self / log(base))`` for an integer ``base >= 2``."""
        if not self.rational and not self.logs:
            return 0
        if (not self.rational and len(self.logs) == 1 and
                self.logs[0][0] == base):
            return math.floor(self.logs[0][1])
        value = float(self) / math.log(base)
        if (abs(value - round(value)) > FLOAT_MARGIN * (1 + abs(value)) and
                abs(value) < 1e12):
            return math.floor(value)
        digits = 50
        while True:
            with mpmath.workdps(digits):
                value = self._mpf() / mpmath.log(base)
                nearest = mpmath.nint(value)
                if abs(value - nearest) > mpmath.mpf(10) ** (10 - digits):
                    return int(mpmath.floor(value))
            digits *= 2


ZERO = LogLinear()
