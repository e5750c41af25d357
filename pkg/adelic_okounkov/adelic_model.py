# This file is part of AdelicOkounkov.
# Code licensed under the GNU General Public License v3 or later.

"""
Diagonal adelic monomial models on projective space over the rationals.

A ``DiagonalModel`` puts ``L = O(d)`` on ``P^n`` and attaches to every place
of ``Q`` a concave piecewise-linear weight on the moment polytope
``P = d * Delta_n``. The weight rounds down to an integral exponent per
monomial and level, which fixes the adelic norms of the graded pieces:

    * at a prime ``p``: ``||sum c_a x^a||_p = max |c_a|_p * p^(-e_p(a, m))``
    * at infinity: ``||sum c_a x^a||_inf = sum |c_a| * 2^(-v(a, m))``

with ``e_p(a, m) = floor(m phi_p(a/m) / log p)`` and
``v(a, m) = floor(m phi_inf(a/m) / log 2)``. Concavity of the weights and
superadditivity of the floor make both norms submultiplicative.

Small sections of ``mL`` are then integer vectors ``k`` with
``c_a = k_a * prod_p p^(-e_p)`` inside the weighted l1 body
``sum |k_a| / R_a < 1`` (``<= 1`` for the non-strict variant), where
``R_a = 2^v * prod_p p^e_p``.

Classes:

    * ``Place`` - Place of Q
    * ``AffinePiece`` - Affine function with log-linear coefficients
    * ``WeightFunction`` - Minimum of affine pieces
    * ``DiagonalModel`` - Adelically normed graded monomial series
    * ``Section`` - Homogeneous polynomial with rational coefficients
    * ``GradedSmallSections`` - Small sections of one level as a CL-subset
    * ``BaseLocus`` - Union of coordinate faces
    * ``NefVerdict`` - Outcome of ``is_nef``
    * ``GenerationReport`` - Outcome of ``zhang_moriwaki_check``

Functions:

    * ``all_faces`` - Coordinate faces of P^n
    * ``norm`` - Norm of a section at a place
    * ``enumerate_strictly_small`` - Strictly small sections of a level
    * ``enumerate_small`` - Small sections of a level
    * ``restrict_to_face`` - Restriction of small sections to a face
    * ``stable_base_locus_ss`` - Stable base locus of strictly small sections
    * ``stable_base_locus_s`` - Stable base locus of small sections
    * ``augmented_base_locus`` - Augmented base locus
    * ``is_w_ample`` - W-ampleness with witness level
    * ``zhang_moriwaki_check`` - Generation of H^0(mL) by strictly small sections
    * ``height`` - Height of a rational point for max-family models
    * ``is_nef`` - Tri-state nef predicate
    * ``positive_part_integral`` - (dim Y + 1)! times the integral of the positive part of the combined weight
    * ``adeg_diagonal_nef`` - Arithmetic degree of a nef model along a face
    * ``delta_upper`` - Upper bound for the delta invariant
    * ``vertical_degree_identity`` - Both sides of the vertical degree formula

Variables:

    * ``NEF``, ``NOT_NEF``, ``UNDETERMINED`` - Nef verdicts

.. image:: classes_adelic_model.svg
"""

from fractions import Fraction
import hashlib
import itertools
import logging
import math

import simplejson
from sympy import factorint, isprime

from adelic_okounkov import polytope_integrals
from adelic_okounkov.exceptions import (DegreeError,
                                        DimensionMismatchError,
                                        InadmissibleSectionError,
                                        InvalidFaceError,
                                        ModelFormatError,
                                        NonConcaveWeightError,
                                        NotNefError,
                                        UnsupportedOperationError,
                                        VerificationError)
from adelic_okounkov.lattice_core import (CLSubset, L1Body, Lattice,
                                          cl_count)
from adelic_okounkov.log_linear import LogLinear, p_adic_valuation

logger = logging.getLogger(__name__)

NEF = "nef"
NOT_NEF = "not-nef"
UNDETERMINED = "undetermined"


class Place(object):

    """
    Place of ``Q``: the archimedean place or a prime.

    Places sort with infinity first, then by prime.
    """

    def __init__(self, prime=None):
        if prime is not None:
            prime = int(prime)
            if not isprime(prime):
                raise ModelFormatError("{} is not a prime.".format(prime),
                                       field="place")
        #: Prime of a finite place, ``None`` at infinity
        self.prime = prime

    @classmethod
    def parse(cls, value):
        """Read ``"inf"`` or a prime, as found in model files."""
        if value in ("inf", "infinity", None):
            return cls()
        try:
            return cls(int(value))
        except (TypeError, ValueError):
            raise ModelFormatError("Unknown place {!r}.".format(value),
                                   field="place")

    @property
    def is_finite(self):
        return self.prime is not None

    @property
    def base(self):
        """Base of the exponent floor: 2 at infinity, ``p`` at ``p``."""
        return self.prime if self.is_finite else 2

    def absolute_value(self, value):
        """Normalized absolute value of a rational, exact."""
        value = Fraction(value)
        if not self.is_finite:
            return abs(value)
        if not value:
            return Fraction(0)
        return Fraction(self.prime) ** -p_adic_valuation(value, self.prime)

    def log_base(self):
        return LogLinear.log_of(self.base)

    def _key(self):
        return (0, 0) if self.prime is None else (1, self.prime)

    def __eq__(self, other):
        return isinstance(other, Place) and self.prime == other.prime

    def __ne__(self, other):
        return not self == other

    def __lt__(self, other):
        return self._key() < other._key()

    def __hash__(self):
        return hash(self.prime)

    def __repr__(self):
        return "Place({})".format(self.to_json())

    def __str__(self):
        return str(self.to_json())

    def to_json(self):
        return "inf" if self.prime is None else self.prime


#: The archimedean place
INFINITY = Place()


def _number(value, field):
    try:
        return LogLinear.coerce(value)
    except (TypeError, ValueError) as error:
        raise ModelFormatError(str(error), field=field)


def _rational(value, field):
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ModelFormatError("{!r} is not a rational number.".format(value),
                               field=field)


class AffinePiece(object):

    """Affine function ``u -> gradient . u + offset``."""

    def __init__(self, gradient, offset):
        #: Gradient, one ``LogLinear`` per affine coordinate
        self.gradient = tuple(LogLinear.coerce(g) for g in gradient)
        #: Value at the origin
        self.offset = LogLinear.coerce(offset)

    def __call__(self, point):
        value = self.offset
        for g, u in zip(self.gradient, point):
            if u:
                value = value + g * Fraction(u)
        return value

    def __eq__(self, other):
        return (isinstance(other, AffinePiece) and
                self.gradient == other.gradient and
                self.offset == other.offset)

    def __hash__(self):
        return hash((self.gradient, self.offset))

    def __repr__(self):
        return "AffinePiece({}, {})".format([str(g) for g in self.gradient],
                                            self.offset)

    def to_json(self):
        return {"gradient": [str(g) for g in self.gradient],
                "offset": str(self.offset)}


class WeightFunction(object):

    """
    Concave weight ``phi(u) = min_i (g_i . u + c_i)``.

    Pieces sharing a gradient collapse to the one with the smallest offset,
    and the remaining pieces are kept in a canonical order, so equal piece
    sets compare equal.
    """

    def __init__(self, pieces):
        pieces = list(pieces)
        if not pieces:
            raise ModelFormatError("A weight needs at least one affine piece.",
                                   field="affine_pieces")
        ranks = {len(p.gradient) for p in pieces}
        if len(ranks) != 1:
            raise ModelFormatError("Affine pieces disagree on the number of "
                                   "coordinates.", field="affine_pieces")
        lowest = {}
        for piece in pieces:
            known = lowest.get(piece.gradient)
            if known is None or piece.offset < known.offset:
                lowest[piece.gradient] = piece
        #: Affine pieces
        self.pieces = tuple(sorted(lowest.values(), key=lambda p: (
            [str(g) for g in p.gradient], str(p.offset))))

    @classmethod
    def constant(cls, value, dimension):
        return cls([AffinePiece([0] * dimension, value)])

    @property
    def dimension(self):
        return len(self.pieces[0].gradient)

    def __call__(self, point):
        return min(piece(point) for piece in self.pieces)

    def level_value(self, exponent):
        """``m * phi(a/m)`` for affine exponent ``a`` at level ``m``."""
        level, affine = exponent
        return min(piece.offset * level +
                   sum((g * a for g, a in zip(piece.gradient, affine) if a),
                       LogLinear())
                   for piece in self.pieces)

    def shift(self, value):
        """Return ``phi + value``."""
        value = LogLinear.coerce(value)
        return WeightFunction([AffinePiece(p.gradient, p.offset + value)
                               for p in self.pieces])

    def pointwise_sum(self, other):
        """Return ``phi + psi``, again a minimum of affine pieces."""
        return WeightFunction([
            AffinePiece([g + h for g, h in zip(p.gradient, q.gradient)],
                        p.offset + q.offset)
            for p in self.pieces for q in other.pieces])

    def scale_offsets(self, factor):
        """Weight ``a * phi(u / a)`` of the multiple ``aL``."""
        return WeightFunction([AffinePiece(p.gradient, p.offset * factor)
                               for p in self.pieces])

    def has_zero_piece(self):
        return any(p.offset == 0 and all(g == 0 for g in p.gradient)
                   for p in self.pieces)

    def __eq__(self, other):
        return (isinstance(other, WeightFunction) and
                self.pieces == other.pieces)

    def __hash__(self):
        return hash(self.pieces)

    def __repr__(self):
        return "WeightFunction({})".format(list(self.pieces))

    def to_json(self):
        return [piece.to_json() for piece in self.pieces]

    @classmethod
    def from_json(cls, data, field):
        if isinstance(data, dict):
            envelope = data.get("envelope", "min")
            pieces_data = data.get("affine_pieces")
        else:
            envelope, pieces_data = "min", data
        if not isinstance(pieces_data, list):
            raise ModelFormatError("Expected a list of affine pieces.",
                                   field=field + ".affine_pieces")
        if envelope not in ("min", "max"):
            raise ModelFormatError("Unknown envelope {!r}.".format(envelope),
                                   field=field + ".envelope")
        pieces = []
        for i, item in enumerate(pieces_data):
            here = "{}.affine_pieces[{}]".format(field, i)
            if not isinstance(item, dict) or "gradient" not in item:
                raise ModelFormatError("Affine piece needs a gradient and an "
                                       "offset.", field=here)
            if not isinstance(item["gradient"], list):
                raise ModelFormatError("Gradient must be a list.",
                                       field=here + ".gradient")
            gradient = [_number(g, "{}.gradient[{}]".format(here, j))
                        for j, g in enumerate(item["gradient"])]
            pieces.append(AffinePiece(gradient, _number(item.get("offset", 0),
                                                        here + ".offset")))
        if envelope == "max" and len(set(pieces)) > 1:
            raise NonConcaveWeightError("weights must be min-of-affines")
        return cls(pieces)

    def conjugate(self, gradient, degree):
        """
        ``max over [0, degree] of phi(u) - gradient * u`` for rational
        one-dimensional weights.

        The maximum sits at an endpoint or where two pieces cross.
        """
        gradient = LogLinear.coerce(gradient)
        if not all(p.gradient[0].is_rational() for p in self.pieces):
            raise UnsupportedOperationError("Sup-convolution needs rational "
                                            "gradients.")
        candidates = [Fraction(0), Fraction(degree)]
        for p, q in itertools.combinations(self.pieces, 2):
            slope = p.gradient[0] - q.gradient[0]
            if slope == 0:
                continue
            crossing = (q.offset - p.offset) / slope.rational
            if crossing.sign() >= 0 and (crossing - degree).sign() <= 0:
                candidates.append(crossing)
        values = []
        for u in candidates:
            u = LogLinear.coerce(u)
            values.append(min(piece.offset + piece.gradient[0].rational * u
                              for piece in self.pieces) -
                          gradient.rational * u)
        return max(values)


def all_faces(dimension):
    """Nonempty coordinate faces of ``P^n``, smallest first."""
    indices = range(dimension + 1)
    return [face for size in range(1, dimension + 2)
            for face in itertools.combinations(indices, size)]


def face_label(face, dimension):
    """``(1:0:0)`` for torus-fixed points, ``{x1=x2=0}`` style otherwise."""
    if len(face) == 1:
        return "({})".format(":".join("1" if j in face else "0"
                                      for j in range(dimension + 1)))
    zeros = [j for j in range(dimension + 1) if j not in face]
    if not zeros:
        return "P^{}".format(dimension)
    return "{{{}=0}}".format("=".join("x{}".format(j) for j in zeros))


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


class DiagonalModel(object):

    """
    Adelically normed graded monomial series on ``P^n``.

    ``weights`` maps ``Place`` objects to ``WeightFunction`` objects in the
    affine coordinates ``(u_1, ..., u_n)`` of ``P = d * Delta_n``; places
    without a weight carry the zero weight. Weights that vanish on ``P`` are
    dropped. ``max_family`` optionally maps places to scaling vectors
    ``(a_0, ..., a_n)`` whose induced weight
    ``sum_j u_j log a_j`` has to agree with the weight at the vertices.
    """

    def __init__(self, dim, degree, weights=None, max_family=None):
        if not isinstance(dim, int) or dim < 1:
            raise ModelFormatError("Dimension must be a positive integer.",
                                   field="dim")
        if not isinstance(degree, int) or degree < 0:
            raise DegreeError("Degree must be a nonnegative integer, got "
                              "{!r}.".format(degree))
        #: Dimension n of the projective space
        self.dim = dim
        #: Degree d of L = O(d)
        self.degree = degree
        kept = {}
        for place, weight in (weights or {}).items():
            if weight.dimension != dim:
                raise ModelFormatError("Weight gradients need {} entries."
                                       .format(dim),
                                       field="places[{}]".format(place))
            if not self._vanishes(weight):
                kept[place] = weight
        #: Weight per place, zero weights removed
        self.weights = kept
        #: Scaling vectors of the max family, or ``None``
        self.max_family = None
        if max_family is not None:
            self.max_family = {
                place: tuple(_rational(a, "max_family.{}".format(place))
                             for a in vector)
                for place, vector in max_family.items()}
            self._check_max_family()
        self._exponents = {}

    def _vanishes(self, weight):
        if not weight.has_zero_piece():
            return False
        return all(piece(vertex).sign() >= 0 for piece in weight.pieces
                   for vertex in self.vertices())

    def _check_max_family(self):
        for place, vector in self.max_family.items():
            if len(vector) != self.dim + 1:
                raise ModelFormatError("Scaling vectors need {} entries."
                                       .format(self.dim + 1),
                                       field="max_family.{}".format(place))
            if any(a <= 0 for a in vector):
                raise ModelFormatError("Scaling factors must be positive.",
                                       field="max_family.{}".format(place))
        for place in set(self.max_family) | set(self.weights):
            vector = self.max_family.get(place, (1,) * (self.dim + 1))
            for j, vertex in enumerate(self.vertices()):
                expected = LogLinear.log_of(vector[j]) * self.degree
                if self.phi(place, vertex) != expected:
                    raise ModelFormatError(
                        "Weight at place {} differs from the max family at "
                        "vertex {}: {} != {}.".format(place, j,
                                                      self.phi(place, vertex),
                                                      expected),
                        field="max_family.{}".format(place))

    @classmethod
    def from_max_family(cls, dim, degree, family):
        """Model whose weights are induced by scaling vectors per place."""
        weights = {}
        for place, vector in family.items():
            logs = [LogLinear.log_of(a) for a in vector]
            weights[place] = WeightFunction([AffinePiece(
                [log - logs[0] for log in logs[1:]], logs[0] * degree)])
        return cls(dim, degree, weights, family)

    @property
    def places(self):
        return sorted(self.weights)

    def vertices(self):
        """Vertices ``d e_j`` of ``P`` in affine coordinates, ``j = 0..n``."""
        origin = (Fraction(0),) * self.dim
        return [origin] + [tuple(Fraction(self.degree) * (i == j)
                                 for i in range(self.dim))
                           for j in range(self.dim)]

    def weight(self, place):
        return self.weights.get(place)

    def phi(self, place, point):
        """Weight of ``place`` at an affine point of ``P``."""
        weight = self.weights.get(place)
        return LogLinear() if weight is None else weight(point)

    def Phi(self, point):
        """Combined weight ``sum_v phi_v`` at an affine point of ``P``."""
        return sum((w(point) for w in self.weights.values()), LogLinear())

    def check_face(self, face):
        """Return ``face`` as a sorted tuple, or raise ``InvalidFaceError``."""
        if face is None:
            return tuple(range(self.dim + 1))
        face = tuple(sorted(set(int(j) for j in face)))
        if not face or face[0] < 0 or face[-1] > self.dim:
            raise InvalidFaceError("Face {} is not a nonempty subset of "
                                   "0..{}.".format(list(face), self.dim))
        return face

    def monomials(self, level, face=None):
        """
        Exponents ``a`` with ``|a| = m d`` supported on ``face``, in
        lexicographically decreasing order.
        """
        face = self.check_face(face)
        total = level * self.degree
        exponents = []
        for part in _compositions(total, len(face)):
            alpha = [0] * (self.dim + 1)
            for j, a in zip(face, part):
                alpha[j] = a
            exponents.append(tuple(alpha))
        return exponents

    def exponent(self, place, alpha, level):
        """Floor exponent ``floor(m phi_v(a/m) / log base)``, cached."""
        key = (place, alpha, level)
        if key not in self._exponents:
            weight = self.weights.get(place)
            if weight is None:
                value = 0
            else:
                value = weight.level_value((level, alpha[1:]))
                value = value.floor_over_log(place.base)
            self._exponents[key] = value
        return self._exponents[key]

    def finite_scale(self, alpha, level):
        """``prod_p p^(-e_p)``: the admissible coefficients are its multiples."""
        scale = Fraction(1)
        for place in self.weights:
            if place.is_finite:
                scale *= Fraction(place.prime) ** -self.exponent(place, alpha,
                                                                 level)
        return scale

    def radius(self, alpha, level):
        """``R_a = 2^v_inf * prod_p p^e_p``."""
        return (Fraction(2) ** self.exponent(INFINITY, alpha, level) /
                self.finite_scale(alpha, level))

    def twist_infinity(self, value):
        """``L + O(value [inf])``: adds ``value`` nats at infinity."""
        return self._twisted(INFINITY, LogLinear.coerce(Fraction(value)))

    def twist_finite(self, prime, value):
        """``L + O(value [p])``: adds ``value * log p`` at ``p``."""
        place = Place(prime)
        return self._twisted(place, LogLinear.log_of(prime) * Fraction(value))

    def _twisted(self, place, value):
        if value == 0:
            return self
        weights = dict(self.weights)
        if place in weights:
            weights[place] = weights[place].shift(value)
        else:
            weights[place] = WeightFunction.constant(value, self.dim)
        return DiagonalModel(self.dim, self.degree, weights)

    def with_added_weight(self, place, weight):
        """Pointwise increase of the weight at ``place`` by ``weight``."""
        weights = dict(self.weights)
        if place in weights:
            weights[place] = weights[place].pointwise_sum(weight)
        else:
            weights[place] = weight
        return DiagonalModel(self.dim, self.degree, weights)

    def scale(self, factor):
        """The multiple ``a L`` for a positive integer ``a``."""
        if not isinstance(factor, int) or factor < 1:
            raise DegreeError("Only positive integer multiples are models, "
                              "got {!r}.".format(factor))
        weights = {place: weight.scale_offsets(factor)
                   for place, weight in self.weights.items()}
        return DiagonalModel(self.dim, self.degree * factor, weights,
                             self.max_family)

    def add(self, other):
        """
        Tensor product ``L + M``.

        At every place the new weight is the sup-convolution of the two
        weights. It is computed through conjugates on ``P^1`` with rational
        gradients, and whenever all pieces of both weights share a single
        gradient.
        """
        if other.dim != self.dim:
            raise DimensionMismatchError("Cannot add models on P^{} and "
                                         "P^{}.".format(self.dim, other.dim))
        zero = WeightFunction.constant(0, self.dim)
        weights = {}
        for place in set(self.weights) | set(other.weights):
            weights[place] = _sup_convolution(
                self.weights.get(place) or zero, self.degree,
                other.weights.get(place) or zero, other.degree)
        return DiagonalModel(self.dim, self.degree + other.degree, weights)

    def local_pieces(self, place, face):
        """
        Pieces of the weight at ``place`` in the local coordinates of
        ``face``: all members except the smallest index ``f0``, with
        ``u_f0 = d - sum``.
        """
        face = self.check_face(face)
        weight = self.weights.get(place)
        if weight is None:
            return [((LogLinear(),) * (len(face) - 1), LogLinear())]
        pieces = set()
        for piece in weight.pieces:
            full = (LogLinear(),) + piece.gradient
            base = full[face[0]]
            gradient = tuple(full[j] - base for j in face[1:])
            pieces.add((gradient, piece.offset + base * self.degree))
        return sorted(pieces, key=lambda p: ([str(g) for g in p[0]],
                                             str(p[1])))

    def face_point(self, face, local):
        """Affine point of ``P`` for local coordinates on ``face``."""
        point = [Fraction(0)] * (self.dim + 1)
        for j, u in zip(face[1:], local):
            point[j] = Fraction(u)
        point[face[0]] = self.degree - sum(point[j] for j in face[1:])
        return tuple(point[1:])

    def __eq__(self, other):
        return (isinstance(other, DiagonalModel) and
                self.to_json() == other.to_json())

    def __hash__(self):
        return hash(self.digest())

    def __repr__(self):
        return "DiagonalModel(dim={}, degree={}, places={})".format(
            self.dim, self.degree, [str(p) for p in self.places])

    def to_json(self):
        data = {"dim": self.dim, "degree": self.degree,
                "places": [{"place": place.to_json(),
                            "affine_pieces": self.weights[place].to_json()}
                           for place in self.places]}
        if self.max_family is not None:
            data["max_family"] = {
                str(place.to_json()): [str(a) for a in vector]
                for place, vector in sorted(self.max_family.items())}
        return data

    def digest(self):
        """SHA-256 of the canonical JSON form."""
        text = simplejson.dumps(self.to_json(), sort_keys=True)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, dict):
            raise ModelFormatError("A model is a JSON object.")
        for key in ("dim", "degree"):
            if key not in data:
                raise ModelFormatError("Missing entry.", field=key)
            if not isinstance(data[key], int) or isinstance(data[key], bool):
                raise ModelFormatError("Expected an integer.", field=key)
        places = data.get("places", [])
        if not isinstance(places, list):
            raise ModelFormatError("Expected a list.", field="places")
        weights = {}
        for i, entry in enumerate(places):
            field = "places[{}]".format(i)
            if not isinstance(entry, dict) or "place" not in entry:
                raise ModelFormatError("Entry needs a place.", field=field)
            try:
                place = Place.parse(entry["place"])
            except ModelFormatError as error:
                raise ModelFormatError(str(error.args[0]),
                                       field=field + ".place")
            if place in weights:
                raise ModelFormatError("Place {} given twice.".format(place),
                                       field=field)
            weight = WeightFunction.from_json(entry, field)
            if weight.dimension != data["dim"]:
                raise ModelFormatError("Gradients need {} entries.".format(
                    data["dim"]), field=field + ".affine_pieces")
            weights[place] = weight
        family = data.get("max_family")
        if family is not None:
            if not isinstance(family, dict):
                raise ModelFormatError("Expected an object.",
                                       field="max_family")
            parsed = {}
            for key, value in family.items():
                field = "max_family.{}".format(key)
                if not isinstance(value, list):
                    raise ModelFormatError("Expected a list.", field=field)
                try:
                    parsed[Place.parse(key)] = value
                except ModelFormatError as error:
                    raise ModelFormatError(str(error.args[0]), field=field)
            family = parsed
        return cls(data["dim"], data["degree"], weights, family)

    @classmethod
    def loads(cls, text):
        try:
            data = simplejson.loads(text)
        except simplejson.JSONDecodeError as error:
            raise ModelFormatError(error.msg, line=error.lineno,
                                   column=error.colno)
        return cls.from_json(data)

    @classmethod
    def load(cls, path):
        """Read a model file."""
        with open(path) as model_file:
            return cls.loads(model_file.read())

    def dumps(self):
        return simplejson.dumps(self.to_json(), sort_keys=True, indent=2)

    def save(self, path):
        """Write the model file."""
        with open(path, "w") as model_file:
            model_file.write(self.dumps() + "\n")


def _sup_convolution(first, first_degree, second, second_degree):
    gradients = {p.gradient for p in first.pieces} | {p.gradient
                                                      for p in second.pieces}
    if len(gradients) == 1:
        (gradient,) = gradients
        return WeightFunction([AffinePiece(gradient, first.pieces[0].offset +
                                           second.pieces[0].offset)])
    if first.dimension != 1:
        raise UnsupportedOperationError("Sup-convolution of weights with "
                                        "several gradients is only exact on "
                                        "P^1.")
    pieces = []
    for (gradient,) in gradients:
        if not gradient.is_rational():
            raise UnsupportedOperationError("Sup-convolution needs rational "
                                            "gradients.")
        offset = (first.conjugate(gradient, first_degree) +
                  second.conjugate(gradient, second_degree))
        pieces.append(AffinePiece([gradient], offset))
    return WeightFunction(pieces)


class Section(object):

    """
    Homogeneous polynomial of level ``m``.

    ``coefficients`` maps exponent tuples ``(a_0, ..., a_n)`` to rationals;
    zero coefficients are dropped.
    """

    def __init__(self, level, coefficients):
        #: Level m
        self.level = level
        #: Exponent tuple -> nonzero rational coefficient
        self.coefficients = {tuple(alpha): Fraction(c)
                             for alpha, c in coefficients.items() if c}

    @classmethod
    def monomial(cls, level, alpha, coefficient=1):
        return cls(level, {tuple(alpha): coefficient})

    @property
    def is_zero(self):
        return not self.coefficients

    @property
    def support(self):
        return sorted(self.coefficients, reverse=True)

    def __eq__(self, other):
        return (isinstance(other, Section) and self.level == other.level and
                self.coefficients == other.coefficients)

    def __hash__(self):
        return hash((self.level, frozenset(self.coefficients.items())))

    def __repr__(self):
        return "Section({}, {})".format(self.level, {
            alpha: str(c) for alpha, c in sorted(self.coefficients.items())})

    def __mul__(self, other):
        product = {}
        for alpha, c in self.coefficients.items():
            for beta, b in other.coefficients.items():
                gamma = tuple(x + y for x, y in zip(alpha, beta))
                product[gamma] = product.get(gamma, 0) + c * b
        return Section(self.level + other.level, product)

    def __neg__(self):
        return Section(self.level, {a: -c for a, c in
                                    self.coefficients.items()})

    def restrict(self, face):
        """Restriction to the coordinate face: other variables set to 0."""
        face = set(face)
        return Section(self.level, {
            alpha: c for alpha, c in self.coefficients.items()
            if all(a == 0 or j in face for j, a in enumerate(alpha))})

    def check_degree(self, model):
        for alpha in self.coefficients:
            if len(alpha) != model.dim + 1 or any(a < 0 for a in alpha):
                raise InadmissibleSectionError(
                    "Exponent {} does not belong to P^{}.".format(alpha,
                                                                  model.dim))
            if sum(alpha) != self.level * model.degree:
                raise InadmissibleSectionError(
                    "Exponent {} has degree {}, level {} needs {}.".format(
                        alpha, sum(alpha), self.level,
                        self.level * model.degree))


def norm(model, section, place):
    """
    Exact norm of ``section`` at ``place``.

    Finite places use the weighted coefficient maximum, infinity the
    weighted l1 sum with dyadic weights.
    """
    section.check_degree(model)
    if section.is_zero:
        return Fraction(0)
    m = section.level
    if place.is_finite:
        return max(place.absolute_value(c) *
                   Fraction(place.prime) ** -model.exponent(place, alpha, m)
                   for alpha, c in section.coefficients.items())
    return sum(abs(c) * Fraction(2) ** -model.exponent(place, alpha, m)
               for alpha, c in section.coefficients.items())


class GradedSmallSections(object):

    """
    Small sections of level ``m`` supported on ``face``.

    Coordinates are the integers ``k_a`` with ``c_a = k_a * scales[a]``; in
    these coordinates the admissibility lattice is the standard lattice and
    the set of small sections is the CL-subset ``Z^N cap body``.
    """

    def __init__(self, model, level, face, strict=True):
        #: Model the sections belong to
        self.model = model
        #: Level m
        self.level = level
        #: Coordinate face
        self.face = model.check_face(face)
        #: Whether the archimedean bound is strict
        self.strict = strict
        #: Exponents, one coordinate each
        self.monomials = tuple(model.monomials(level, self.face))
        #: Radius ``R_a`` per monomial
        self.radii = tuple(model.radius(alpha, level)
                           for alpha in self.monomials)
        #: Generator ``prod_p p^(-e_p)`` of admissible coefficients
        self.scales = tuple(model.finite_scale(alpha, level)
                            for alpha in self.monomials)
        #: Weighted l1 body in the k coordinates
        self.body = L1Body(self.radii, strict)
        #: The CL-subset itself
        self.cl_subset = CLSubset(Lattice.standard(len(self.monomials)),
                                  self.body)

    def __repr__(self):
        return "GradedSmallSections(m={}, face={}, strict={})".format(
            self.level, self.face, self.strict)

    @property
    def small_monomials(self):
        """Exponents whose monomial on its own is small."""
        return [alpha for alpha, radius in zip(self.monomials, self.radii)
                if self.body.coordinate_bound(radius) >= 1]

    @property
    def dimension(self):
        """Dimension of the span of the small sections."""
        return len(self.small_monomials)

    @property
    def is_trivial(self):
        return not self.small_monomials

    def count(self):
        """Number of small sections as a ``CountResult``."""
        return cl_count(self.cl_subset)

    def section_from_coordinates(self, vector):
        return Section(self.level, {alpha: k * scale for alpha, k, scale in
                                    zip(self.monomials, vector, self.scales)})

    def coordinates(self, section):
        """``k`` vector of ``section``, or ``None`` if it is inadmissible."""
        if section.level != self.level:
            return None
        index = {alpha: i for i, alpha in enumerate(self.monomials)}
        vector = [0] * len(self.monomials)
        for alpha, c in section.coefficients.items():
            if alpha not in index:
                return None
            k = c / self.scales[index[alpha]]
            if k.denominator != 1:
                return None
            vector[index[alpha]] = int(k)
        return tuple(vector)

    def contains_section(self, section):
        vector = self.coordinates(section)
        return vector is not None and vector in self.cl_subset

    def sections(self):
        """All small sections, enumerated."""
        for vector in self.cl_subset.elements():
            yield self.section_from_coordinates(vector)


def enumerate_strictly_small(model, level, face=None):
    """Strictly small sections of ``level`` as ``GradedSmallSections``."""
    if level < 0:
        raise DegreeError("Levels are nonnegative.")
    return GradedSmallSections(model, level, face, strict=True)


def enumerate_small(model, level, face=None, strict=False):
    """Small sections; ``strict=True`` gives the strictly small ones."""
    if level < 0:
        raise DegreeError("Levels are nonnegative.")
    return GradedSmallSections(model, level, face, strict=strict)


def restrict_to_face(model, level, face):
    """
    Restriction of the strictly small sections of ``level`` to ``face``.

    Setting the variables off the face to zero projects the weighted l1 body
    onto the coordinates of face-supported monomials, where it is again the
    weighted l1 body with the same radii. The image is therefore already a
    CL-subset and equals its hull. Returns ``(image, hull)``.
    """
    image = enumerate_strictly_small(model, level, face)
    return image, image.cl_subset


class BaseLocus(object):

    """
    Union of coordinate faces, given by its maximal components.

    ``history`` lists, per level, the components of the intersection of the
    base loci up to that level.
    """

    def __init__(self, dimension, components, stabilized, history=()):
        #: Dimension of the ambient projective space
        self.dimension = dimension
        #: Maximal faces, sorted
        self.components = tuple(sorted(components, key=lambda f: (len(f), f)))
        #: Whether the intersection stopped changing in the second half
        self.stabilized = stabilized
        #: ``(m, components)`` per sampled level
        self.history = tuple(history)

    @property
    def is_empty(self):
        return not self.components

    def contains_face(self, face):
        return any(set(face) <= set(component)
                   for component in self.components)

    def labels(self):
        return [face_label(face, self.dimension) for face in self.components]

    def __repr__(self):
        return "BaseLocus({}, stabilized={})".format(self.labels(),
                                                     self.stabilized)

    def to_json(self):
        return {"components": [list(face) for face in self.components],
                "labels": self.labels(), "stabilized": self.stabilized,
                "history": [{"m": m, "components": [list(f) for f in faces]}
                            for m, faces in self.history]}


def _maximal(faces):
    faces = set(faces)
    return [face for face in faces
            if not any(set(face) < set(other) for other in faces)]


def _level_base_locus(model, level, strict):
    """Faces on which every small monomial of ``level`` vanishes."""
    sections = GradedSmallSections(model, level, None, strict)
    supports = {frozenset(j for j, a in enumerate(alpha) if a)
                for alpha in sections.small_monomials}
    locus = {face for face in all_faces(model.dim)
             if not any(support <= set(face) for support in supports)}
    return locus, bool(supports)


def _stable_base_locus(model, m_max, strict):
    if m_max < 1:
        raise DegreeError("m_max must be at least 1.")
    faces = set(all_faces(model.dim))
    history = []
    nonempty = False
    halfway = None
    for level in range(1, m_max + 1):
        locus, populated = _level_base_locus(model, level, strict)
        nonempty = nonempty or populated
        faces &= locus
        history.append((level, tuple(sorted(_maximal(faces)))))
        if level == math.ceil(m_max / 2):
            halfway = set(faces)
    stabilized = nonempty and halfway == faces
    result = BaseLocus(model.dim, _maximal(faces), stabilized, history)
    logger.info("Stable base locus up to m=%d: %s", m_max, result.labels())
    return result


def stable_base_locus_ss(model, m_max):
    """
    Common zero locus of all strictly small sections of levels ``1..m_max``.

    The span of the strictly small sections is spanned by strictly small
    monomials, so each level's base locus is the union of the coordinate
    faces carrying none of them.
    """
    return _stable_base_locus(model, m_max, strict=True)


def stable_base_locus_s(model, m_max):
    """Same as ``stable_base_locus_ss`` for small sections."""
    return _stable_base_locus(model, m_max, strict=False)


def augmented_base_locus(model, m_max):
    """
    Augmented base locus ``B+(L) cup Bss``; ``B+(O(d))`` is empty for
    ``d >= 1``.
    """
    if model.degree < 1:
        raise DegreeError("The augmented base locus needs an ample L.")
    return stable_base_locus_ss(model, m_max)


def is_w_ample(model, m_max):
    """
    Return ``(flag, witness)``: whether some level up to ``m_max`` has
    strictly small sections without common zeros, and the first such level.
    """
    if model.degree < 1:
        raise DegreeError("W-ampleness needs an ample L.")
    for level in range(1, m_max + 1):
        locus, _ = _level_base_locus(model, level, strict=True)
        if not locus:
            return True, level
    return False, None


class GenerationReport(object):

    """Whether ``H^0(mL)`` is spanned by strictly small sections, per level."""

    def __init__(self, generation, base_locus):
        #: Level -> bool
        self.generation = dict(generation)
        #: Stable base locus over the same levels
        self.base_locus = base_locus
        onset = None
        for level in sorted(self.generation, reverse=True):
            if not level or not self.generation[level]:
                break
            onset = level
        #: First positive level from which generation holds up to the last
        self.onset = onset

    @property
    def counterexample(self):
        """True if the base locus is empty but generation never settles."""
        return self.base_locus.is_empty and self.onset is None

    def to_json(self):
        return {"generation": {str(m): g for m, g in
                               sorted(self.generation.items())},
                "onset": self.onset,
                "base_locus": self.base_locus.to_json(),
                "counterexample": self.counterexample}


def zhang_moriwaki_check(model, m_max):
    """
    Generation of ``H^0(mL)`` by strictly small sections for ``m <= m_max``.

    Level 0 counts as generated.
    """
    if model.degree < 1:
        raise DegreeError("Generation needs an ample L.")
    generation = {0: True}
    for level in range(1, m_max + 1):
        sections = GradedSmallSections(model, level, None, strict=True)
        generation[level] = sections.dimension == len(sections.monomials)
    locus = (stable_base_locus_ss(model, m_max) if m_max >= 1 else
             BaseLocus(model.dim, [], False))
    return GenerationReport(generation, locus)


def _primitive_point(point):
    point = [Fraction(x) for x in point]
    if not any(point):
        raise ValueError("The zero vector is not a projective point.")
    scale = 1
    for x in point:
        scale = scale * x.denominator // math.gcd(scale, x.denominator)
    ints = [int(x * scale) for x in point]
    divisor = 0
    for x in ints:
        divisor = math.gcd(divisor, x)
    return [x // divisor for x in ints]


def height(model, point, chart=None):
    """
    Height of a rational point for the max-family metric.

    ``h(x) = sum_v log max_k(a_k |x_k|_v) - log |x_j|_v`` with the section
    ``x_j`` for ``j = chart`` (default: first nonzero coordinate). The
    result is an exact ``LogLinear``.
    """
    if model.max_family is None:
        raise UnsupportedOperationError("Heights need max-family data.")
    if len(point) != model.dim + 1:
        raise DimensionMismatchError("Point {} is not in P^{}.".format(
            point, model.dim))
    x = _primitive_point(point)
    if chart is None:
        chart = next(j for j, value in enumerate(x) if value)
    if not x[chart]:
        raise ValueError("Coordinate {} of {} vanishes.".format(chart, point))
    places = {INFINITY} | set(model.max_family)
    places |= {Place(p) for p in factorint(abs(x[chart]))}
    total = LogLinear()
    ones = (Fraction(1),) * (model.dim + 1)
    for place in sorted(places):
        scaling = model.max_family.get(place, ones)
        largest = max(a * place.absolute_value(value)
                      for a, value in zip(scaling, x) if value)
        total = (total + LogLinear.log_of(largest) -
                 LogLinear.log_of(place.absolute_value(x[chart])))
    return total


class NefVerdict(object):

    """Outcome of ``is_nef``: one of ``NEF``, ``NOT_NEF``, ``UNDETERMINED``."""

    def __init__(self, status, witness=None, reason=""):
        #: Verdict
        self.status = status
        #: Point with negative height for ``NOT_NEF``
        self.witness = witness
        #: Human readable explanation
        self.reason = reason

    def __eq__(self, other):
        if isinstance(other, str):
            return self.status == other
        return isinstance(other, NefVerdict) and self.status == other.status

    def __hash__(self):
        return hash(self.status)

    def __repr__(self):
        return "NefVerdict({!r})".format(self.status)


def is_nef(model, sample_height=3):
    """
    Tri-state nef predicate.

    Weights are concave by construction. With max-family data all scaling
    factors ``>= 1`` prove nefness, since the height then dominates the
    naive height. A negative height at a torus-fixed point or at a sampled
    point with coordinates up to ``sample_height`` disproves it.
    """
    if model.max_family is None:
        return NefVerdict(UNDETERMINED, reason="no max-family data")
    if all(a >= 1 for vector in model.max_family.values() for a in vector):
        return NefVerdict(NEF, reason="all scaling factors are at least 1")
    samples = [tuple(int(i == j) for i in range(model.dim + 1))
               for j in range(model.dim + 1)]
    for point in itertools.product(range(sample_height + 1),
                                   repeat=model.dim + 1):
        if any(point) and math.gcd(*point) == 1 and point not in samples:
            samples.append(point)
    for point in samples:
        value = height(model, point)
        if value.sign() < 0:
            return NefVerdict(NOT_NEF, witness=point,
                              reason="h{} = {}".format(point, value))
    return NefVerdict(UNDETERMINED, reason="all {} sampled heights are "
                      "nonnegative".format(len(samples)))


def positive_part_integral(model, face=None):
    """
    ``(dim Y + 1)! * integral over P_Y of max(0, Phi)`` for any model.

    Integration is in the lattice-normalised local coordinates of the face.
    """
    face = model.check_face(face)
    piece_sets = [model.local_pieces(place, face) for place in model.places]
    if not piece_sets:
        return 0.0
    return polytope_integrals.positive_part_integral(piece_sets, len(face) - 1,
                                                     model.degree)


def adeg_diagonal_nef(model, face=None, allow_undetermined=False):
    """
    Arithmetic degree ``adeg((L|_Y)^(dim Y + 1))`` of a nef model.

    For nef diagonal models it equals ``positive_part_integral``. Raises
    ``NotNefError`` for non-nef models, and for undetermined ones unless
    ``allow_undetermined`` is set.
    """
    verdict = is_nef(model)
    if verdict == NOT_NEF:
        raise NotNefError("Model is not nef: {}.".format(verdict.reason))
    if verdict == UNDETERMINED and not allow_undetermined:
        raise NotNefError("Nefness is undetermined ({}); pass "
                          "allow_undetermined to override.".format(
                              verdict.reason))
    return positive_part_integral(model, face)


def delta_upper(model, face=None):
    """
    Upper bound ``(dim Y + 1) * sum_v max(0, max_P phi_v)`` for delta.

    Comes from the constant-weight nef majorant; it is never delta itself.
    """
    face = model.check_face(face)
    k = len(face) - 1
    total = 0.0
    for place in model.places:
        peak = polytope_integrals.maximize_concave(
            model.local_pieces(place, face), k, model.degree)
        total += max(0.0, peak)
    return (k + 1) * total


def vertical_degree_identity(model, prime, allow_undetermined=False,
                             tolerance=1e-6):
    """
    Return ``(adeg(O([p]) . A^n), vol(A) log p)`` as floats.

    The left side is obtained by multilinearity from the closed-form degree
    of ``A`` and of its twist by ``[p]``. Nefness is decided by ``is_nef``
    as in ``adeg_diagonal_nef``. Raises ``VerificationError`` when the two
    sides differ by more than ``tolerance`` relative to the right side.
    """
    if model.degree == 0:
        return 0.0, 0.0
    verdict = is_nef(model)
    if verdict == NOT_NEF:
        raise NotNefError("Model is not nef: {}.".format(verdict.reason))
    if verdict == UNDETERMINED and not allow_undetermined:
        raise NotNefError("Nefness is undetermined ({}); pass "
                          "allow_undetermined to override.".format(
                              verdict.reason))
    twisted = model.twist_finite(prime, 1)
    left = ((positive_part_integral(twisted) - positive_part_integral(model)) /
            (model.dim + 1))
    right = float(LogLinear.log_of(prime) * model.degree ** model.dim)
    if abs(left - right) > tolerance * max(1.0, abs(right)):
        raise VerificationError("Vertical degree {} differs from vol(A) "
                                "log {} = {}.".format(left, prime, right))
    return left, right
