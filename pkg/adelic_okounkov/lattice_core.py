# This file is part of AdelicOkounkov.
# Code licensed under the GNU General Public License v3 or later.

"""
Exact lattice algebra and convex lattice (CL) subsets.

A CL-subset of a free module is the intersection of a sublattice with a convex
body. Everything in this module is exact: vectors are tuples of Python
integers or ``Fraction`` objects, lattices are kept in Hermite normal form and
bodies answer membership questions with rational arithmetic. Floating point
numbers only appear in the log-count intervals returned by ``cl_count``.

Classes:

    * ``Lattice`` - Sublattice of Z^r in row-style Hermite normal form
    * ``ConvexBody`` - Convex hull of rational points, with lazy facets
    * ``L1Body`` - Weighted l1 body, the shape of graded small sections
    * ``CLSubset`` - Lattice intersected with a convex body
    * ``CountResult`` - Exact count and certified log-count interval

Functions:

    * ``lattice_span`` - Smallest sublattice containing some vectors
    * ``cl_hull`` - Smallest CL-subset containing a finite set
    * ``cl_count`` - Count a CL-subset, exactly or by certified interval
    * ``star_sum`` - Set of m-fold sums
    * ``dilate_count`` - Lattice points in a symmetric body and its dilate
    * ``l1_ball_count`` - Closed form count of an l1 ball

Variables:

    * ``ENUMERATION_LIMIT`` - Largest candidate box enumerated point by point
    * ``BUDGET_LIMIT`` - Largest work size of the weighted l1 counting program
    * ``MAX_HULL_RANK`` - Highest ambient rank with exact facet enumeration

.. image:: classes_lattice_core.svg
"""

from fractions import Fraction
from functools import reduce
import itertools
import logging
import math

from flint import fmpz_mat

from adelic_okounkov.exceptions import (DimensionMismatchError,
                                        HullRankError,
                                        InstanceTooLargeError,
                                        UnboundedBodyError)

logger = logging.getLogger(__name__)

#: Largest bounding box enumerated point by point
ENUMERATION_LIMIT = 10 ** 7
#: Largest number of coordinates times budget for the weighted l1 program
BUDGET_LIMIT = 2 * 10 ** 6
#: Highest ambient rank with exact facet enumeration
MAX_HULL_RANK = 4


def _lcm(a, b):
    return a * b // math.gcd(a, b)


def _integer_row(row):
    """Scale a rational row to a primitive integer row."""
    row = [Fraction(x) for x in row]
    scale = reduce(_lcm, (x.denominator for x in row), 1)
    ints = [int(x * scale) for x in row]
    divisor = reduce(math.gcd, ints, 0)
    if divisor > 1:
        ints = [x // divisor for x in ints]
    return ints


def _nullspace(rows, ncols):
    """Return an integer basis of ``{x : r.x = 0 for r in rows}``."""
    rows = [_integer_row(r) for r in rows if any(r)]
    if not rows:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    kernel, nullity = fmpz_mat(rows).nullspace()
    table = kernel.table()
    return [tuple(_integer_row([int(table[i][j]) for i in range(ncols)]))
            for j in range(nullity)]


def _dot(u, v):
    return sum(x * y for x, y in zip(u, v))


class Lattice(object):

    """
    Sublattice ``N`` of ``Z^r``.

    The basis is stored in row-style Hermite normal form, so two lattices are
    equal exactly when their bases are. Construct lattices with
    ``Lattice.from_generators`` or ``lattice_span``.
    """

    def __init__(self, basis, ambient_rank):
        #: Rows of the Hermite normal form, zero rows removed
        self.basis = tuple(tuple(int(x) for x in row) for row in basis)
        #: Rank ``r`` of the ambient lattice ``Z^r``
        self.ambient_rank = ambient_rank
        for row in self.basis:
            if len(row) != ambient_rank:
                raise DimensionMismatchError("Basis row {} does not live in "
                                             "Z^{}.".format(row, ambient_rank))
        self._pivots = tuple(next(i for i, x in enumerate(row) if x)
                             for row in self.basis)

    @classmethod
    def from_generators(cls, vectors, ambient_rank=None):
        """Return the lattice generated by ``vectors``."""
        rows = [tuple(int(x) for x in v) for v in vectors]
        if ambient_rank is None:
            if not rows:
                raise DimensionMismatchError("Ambient rank of an empty "
                                             "generating set is unknown.")
            ambient_rank = len(rows[0])
        if any(len(row) != ambient_rank for row in rows):
            raise DimensionMismatchError("Generators must share ambient "
                                         "rank {}.".format(ambient_rank))
        rows = [row for row in rows if any(row)]
        if not rows:
            return cls((), ambient_rank)
        table = fmpz_mat([list(row) for row in rows]).hnf().table()
        basis = [[int(x) for x in row] for row in table]
        return cls([row for row in basis if any(row)], ambient_rank)

    @classmethod
    def standard(cls, ambient_rank):
        """Return ``Z^r`` itself."""
        return cls([tuple(int(i == j) for j in range(ambient_rank))
                    for i in range(ambient_rank)], ambient_rank)

    @property
    def rank(self):
        """Rank of the lattice."""
        return len(self.basis)

    @property
    def is_standard(self):
        """True if the lattice is all of ``Z^r``."""
        return (self.rank == self.ambient_rank and
                all(row[i] == 1 for i, row in enumerate(self.basis)))

    def __eq__(self, other):
        return (isinstance(other, Lattice) and
                self.ambient_rank == other.ambient_rank and
                self.basis == other.basis)

    def __hash__(self):
        return hash((self.ambient_rank, self.basis))

    def __repr__(self):
        return "Lattice(basis={}, ambient_rank={})".format(list(self.basis),
                                                           self.ambient_rank)

    def __contains__(self, vector):
        return self.contains(vector)

    def contains(self, vector):
        """Exact membership test by reduction against the echelon basis."""
        if len(vector) != self.ambient_rank:
            raise DimensionMismatchError("Vector {} does not live in "
                                         "Z^{}.".format(vector,
                                                        self.ambient_rank))
        residue = [Fraction(x) for x in vector]
        if any(x.denominator != 1 for x in residue):
            return False
        residue = [int(x) for x in residue]
        for row, pivot in zip(self.basis, self._pivots):
            if any(residue[:pivot]):
                return False
            quotient, remainder = divmod(residue[pivot], row[pivot])
            if remainder:
                return False
            if quotient:
                residue = [x - quotient * y for x, y in zip(residue, row)]
        return not any(residue)

    def determinant(self):
        """Index of a full-rank lattice in ``Z^r``."""
        if self.rank != self.ambient_rank:
            raise DimensionMismatchError("Lattice of rank {} in Z^{} has no "
                                         "determinant.".format(
                                             self.rank, self.ambient_rank))
        if not self.rank:
            return 1
        return abs(int(fmpz_mat([list(row) for row in self.basis]).det()))

    def first_coordinate_slice(self):
        """
        Return ``pr2(N cap pr1^-1(0))`` as a lattice in ``Z^(r-1)``.

        In Hermite normal form every row after one with a nonzero first entry
        vanishes in the first column, so those rows span the slice.
        """
        rows = [row[1:] for row in self.basis if row[0] == 0]
        return Lattice.from_generators(rows, self.ambient_rank - 1)


def lattice_span(vectors, ambient_rank=None):
    """Return ``<S>_Z`` for a set of integer vectors ``S``."""
    vectors = list(vectors)
    if not vectors and ambient_rank is None:
        ambient_rank = 0
    return Lattice.from_generators(vectors, ambient_rank)


class Halfspace(object):

    """Inequality ``normal . x <= bound``, or ``<`` when ``strict``."""

    def __init__(self, normal, bound, strict=False):
        #: Primitive integer normal vector
        self.normal = tuple(normal)
        #: Rational right hand side
        self.bound = Fraction(bound)
        #: Whether boundary points are excluded
        self.strict = strict

    def __eq__(self, other):
        return (isinstance(other, Halfspace) and
                (self.normal, self.bound, self.strict) ==
                (other.normal, other.bound, other.strict))

    def __hash__(self):
        return hash((self.normal, self.bound, self.strict))

    def __repr__(self):
        return "Halfspace({}, {}{})".format(self.normal, self.bound,
                                            ", strict" if self.strict else "")

    def satisfied_by(self, point):
        value = _dot(self.normal, point)
        return value < self.bound if self.strict else value <= self.bound


class ConvexBody(object):

    """
    Convex hull of finitely many rational points.

    The V-representation is given; the H-representation (affine hull
    equations plus facet inequalities) is computed exactly on first use, by
    checking every affinely independent choice of points for a supporting
    hyperplane. That search is only done up to ``MAX_HULL_RANK``.
    """

    def __init__(self, vertices):
        vertices = [tuple(Fraction(x) for x in v) for v in vertices]
        if not vertices:
            raise DimensionMismatchError("A convex body needs at least one "
                                         "generator.")
        #: Rational generators of the body
        self.vertices = tuple(sorted(set(vertices)))
        #: Ambient rank
        self.ambient_rank = len(vertices[0])
        if any(len(v) != self.ambient_rank for v in self.vertices):
            raise DimensionMismatchError("Generators must share ambient "
                                         "rank.")
        #: Hulls of finitely many points are bounded
        self.bounded = True
        self._equations = None
        self._facets = None

    def __repr__(self):
        return "ConvexBody({})".format([tuple(str(x) for x in v)
                                        for v in self.vertices])

    def _directions(self):
        origin = self.vertices[0]
        return [tuple(x - o for x, o in zip(v, origin))
                for v in self.vertices[1:]]

    @property
    def equations(self):
        """Affine hull as ``(normal, value)`` pairs with ``normal.x = value``."""
        if self._equations is None:
            origin = self.vertices[0]
            self._equations = tuple((n, _dot(n, origin)) for n in
                                    _nullspace(self._directions(),
                                               self.ambient_rank))
        return self._equations

    @property
    def dimension(self):
        """Dimension of the affine hull."""
        return self.ambient_rank - len(self.equations)

    @property
    def facets(self):
        """Facet inequalities inside the affine hull, as ``Halfspace`` objects."""
        if self._facets is None:
            self._facets = self._compute_facets()
        return self._facets

    def _compute_facets(self):
        if self.ambient_rank > MAX_HULL_RANK:
            raise HullRankError("Exact facet enumeration is limited to rank "
                                "{}, got {}.".format(MAX_HULL_RANK,
                                                     self.ambient_rank))
        k = self.dimension
        if k == 0:
            return ()
        normals = [n for n, _ in self.equations]
        facets = set()
        for subset in itertools.combinations(self.vertices, k):
            base = subset[0]
            rows = [tuple(x - b for x, b in zip(q, base)) for q in subset[1:]]
            kernel = _nullspace(rows + normals, self.ambient_rank)
            if len(kernel) != 1:
                continue
            normal = kernel[0]
            bound = _dot(normal, base)
            values = [_dot(normal, v) for v in self.vertices]
            if max(values) == bound:
                facets.add(Halfspace(normal, bound))
            elif min(values) == bound:
                facets.add(Halfspace(tuple(-x for x in normal), -bound))
        return tuple(sorted(facets, key=lambda h: (h.normal, h.bound)))

    def contains(self, point):
        """Exact membership test against the H-representation."""
        if len(point) != self.ambient_rank:
            raise DimensionMismatchError("Point {} has the wrong rank."
                                         .format(point))
        point = tuple(Fraction(x) for x in point)
        if any(_dot(n, point) != value for n, value in self.equations):
            return False
        return all(h.satisfied_by(point) for h in self.facets)

    __contains__ = contains

    def is_symmetric(self):
        """True if the body is closed under negation."""
        return all(self.contains(tuple(-x for x in v)) for v in self.vertices)

    def scale(self, factor):
        """Return the dilate ``factor * body``."""
        factor = Fraction(factor)
        return ConvexBody([tuple(factor * x for x in v)
                           for v in self.vertices])

    def bounding_box(self):
        """Integer ranges covering the body, one per coordinate."""
        box = []
        for i in range(self.ambient_rank):
            values = [v[i] for v in self.vertices]
            box.append(range(math.ceil(min(values)),
                             math.floor(max(values)) + 1))
        return box


class L1Body(object):

    """
    Weighted l1 body ``{x : sum |x_i| / R_i < 1}`` (``<= 1`` if not strict).

    A radius of ``None`` leaves its coordinate unconstrained and makes the body
    unbounded. Radii are positive rationals; a coordinate whose radius does
    not exceed 1 only admits 0 in the strict body.
    """

    def __init__(self, radii, strict=True):
        #: Radius per coordinate
        self.radii = tuple(None if r is None else Fraction(r) for r in radii)
        #: Whether the defining inequality is strict
        self.strict = strict
        #: Whether all radii are finite
        self.bounded = all(r is not None for r in self.radii)
        if any(r is not None and r <= 0 for r in self.radii):
            raise DimensionMismatchError("Radii must be positive.")

    @property
    def ambient_rank(self):
        return len(self.radii)

    def __repr__(self):
        return "L1Body({}, strict={})".format([str(r) for r in self.radii],
                                             self.strict)

    def __eq__(self, other):
        return (isinstance(other, L1Body) and self.radii == other.radii and
                self.strict == other.strict)

    def __hash__(self):
        return hash((self.radii, self.strict))

    def contains(self, point):
        if len(point) != self.ambient_rank:
            raise DimensionMismatchError("Point {} has the wrong rank."
                                         .format(point))
        total = sum(abs(Fraction(x)) / r
                    for x, r in zip(point, self.radii) if r is not None)
        return total < 1 if self.strict else total <= 1

    __contains__ = contains

    def is_symmetric(self):
        return True

    def scale(self, factor):
        factor = Fraction(factor)
        return L1Body([None if r is None else factor * r for r in self.radii],
                      self.strict)

    def coordinate_bound(self, radius):
        """Largest ``|x_i|`` allowed on its own by ``radius``."""
        if self.strict:
            return math.ceil(radius) - 1
        return math.floor(radius)

    def bounding_box(self):
        if not self.bounded:
            raise UnboundedBodyError("unbounded CL-subset")
        return [range(-b, b + 1) for b in
                (self.coordinate_bound(r) for r in self.radii)]

    def restrict(self, coordinates):
        """Projection to ``coordinates``, which is the body in those axes."""
        return L1Body([self.radii[i] for i in coordinates], self.strict)

    def log_volume(self, coordinates=None):
        """Natural log of the Lebesgue volume ``2^N prod R_i / N!``."""
        if coordinates is None:
            coordinates = range(self.ambient_rank)
        radii = [self.radii[i] for i in coordinates]
        return (len(radii) * math.log(2) +
                math.fsum(math.log(r.numerator) - math.log(r.denominator)
                          for r in radii) - math.lgamma(len(radii) + 1))


class CountResult(object):

    """
    Size of a finite CL-subset.

    ``count`` is the exact number of elements when it is known, otherwise
    ``None``. The log-count always comes as an interval ``[log_lo, log_hi]``
    that is collapsed to a point on the exact path, plus a central estimate
    inside the interval. The empty set has log-count ``-inf``.
    """

    def __init__(self, count=None, log_lo=None, log_hi=None, log_central=None,
                 method="enumeration"):
        #: Exact count, or ``None`` on the interval path
        self.count = count
        if count is not None:
            log_lo = log_hi = log_central = (math.log(count) if count
                                             else float("-inf"))
        #: Lower end of the log-count interval
        self.log_lo = log_lo
        #: Upper end of the log-count interval
        self.log_hi = log_hi
        #: Central estimate used by the extrapolation
        self.log_central = min(max(log_central, log_lo), log_hi)
        #: Name of the counting path taken
        self.method = method

    @property
    def exact(self):
        return self.count is not None

    def __repr__(self):
        if self.exact:
            return "CountResult(count={}, method={!r})".format(self.count,
                                                               self.method)
        return "CountResult(log in [{:.6g}, {:.6g}], method={!r})".format(
            self.log_lo, self.log_hi, self.method)

    def as_dict(self):
        return {"count": self.count, "log_lo": self.log_lo,
                "log_hi": self.log_hi, "log_central": self.log_central,
                "method": self.method}

    @classmethod
    def from_dict(cls, data):
        return cls(data["count"], data["log_lo"], data["log_hi"],
                   data["log_central"], data["method"])


class CLSubset(object):

    """
    Convex lattice subset ``N cap Delta``.

    ``lattice`` and ``body`` live in the same ambient ``Z^r``. Finite subsets
    cache their elements on first enumeration.
    """

    def __init__(self, lattice, body):
        if lattice.ambient_rank != body.ambient_rank:
            raise DimensionMismatchError("Lattice in Z^{} and body in "
                                         "rank {} do not match.".format(
                                             lattice.ambient_rank,
                                             body.ambient_rank))
        #: Lattice part ``N``
        self.lattice = lattice
        #: Convex part ``Delta``
        self.body = body
        self._elements = None

    @property
    def ambient_rank(self):
        return self.lattice.ambient_rank

    def __contains__(self, vector):
        return self.lattice.contains(vector) and self.body.contains(vector)

    def elements(self, limit=ENUMERATION_LIMIT):
        """Sorted tuple of all elements, enumerated over the bounding box."""
        if self._elements is None:
            if not self.body.bounded:
                raise UnboundedBodyError("unbounded CL-subset")
            box = self.body.bounding_box()
            size = reduce(lambda a, b: a * b, (len(r) for r in box), 1)
            if size > limit:
                raise InstanceTooLargeError("Bounding box holds {} candidate "
                                            "points, limit is {}.".format(
                                                size, limit))
            self._elements = tuple(point for point in itertools.product(*box)
                                   if point in self)
        return self._elements

    def __iter__(self):
        return iter(self.elements())

    def __len__(self):
        return len(self.elements())

    def __eq__(self, other):
        return (isinstance(other, CLSubset) and
                self.ambient_rank == other.ambient_rank and
                set(self.elements()) == set(other.elements()))

    def __hash__(self):
        return hash(frozenset(self.elements()))

    def __repr__(self):
        return "CLSubset(lattice={!r}, body={!r})".format(self.lattice,
                                                          self.body)

    def rank(self):
        """Rank of ``<Gamma>_Z``."""
        return lattice_span(self.elements(), self.ambient_rank).rank


def cl_hull(points):
    """
    Return ``CL(S) = <S>_Z cap Conv(S)``, the smallest CL-subset containing S.
    """
    points = [tuple(int(x) for x in p) for p in points]
    if not points:
        raise DimensionMismatchError("The CL-hull of an empty set needs an "
                                     "ambient rank.")
    return CLSubset(lattice_span(points), ConvexBody(points))


def star_sum(m, points):
    """Return ``m*S``, the set of sums of ``m`` elements of ``S``."""
    if m < 1:
        raise ValueError("m must be at least 1.")
    points = {tuple(p) for p in points}
    result = set(points)
    for _ in range(m - 1):
        result = {tuple(a + b for a, b in zip(x, y))
                  for x in result for y in points}
    return result


def l1_ball_count(dimension, radius):
    """Number of ``c`` in ``Z^dimension`` with ``sum |c_i| <= radius``."""
    if radius < 0:
        return 0
    return sum(2 ** k * math.comb(dimension, k) * math.comb(radius, k)
               for k in range(min(dimension, radius) + 1))


def _budget_count(weights, budget):
    """
    Number of integer vectors with ``sum |k_i| W_i <= budget``.

    ``f[s]`` counts vectors of weighted size exactly ``s``. Adding a
    coordinate of weight ``W`` maps ``f`` to ``2 g - f`` where ``g`` is the
    running sum of ``f`` along steps of ``W``.
    """
    table = [1] + [0] * budget
    for weight in weights:
        running = list(table)
        for s in range(weight, budget + 1):
            running[s] += running[s - weight]
        table = [2 * g - f for g, f in zip(running, table)]
    return sum(table)


def _l1_count(body):
    """Count an ``L1Body`` over ``Z^N``; see ``cl_count``."""
    if not body.bounded:
        raise UnboundedBodyError("unbounded CL-subset")
    active = [r for r in body.radii if body.coordinate_bound(r) >= 1]
    size = len(active)
    if not size:
        return CountResult(1, method="trivial")
    if len(set(active)) == 1:
        radius = body.coordinate_bound(active[0])
        return CountResult(l1_ball_count(size, radius), method="closed-form")
    denominator = reduce(_lcm, (r.numerator for r in active), 1)
    weights = [int(r.denominator * denominator // r.numerator)
               for r in active]
    budget = denominator - 1 if body.strict else denominator
    if size * (budget + 1) <= BUDGET_LIMIT:
        return CountResult(_budget_count(weights, budget), method="budget")
    inner = [body.coordinate_bound(r / size) for r in active]
    outer = [body.coordinate_bound(r) for r in active]
    box = reduce(lambda a, b: a * b, (2 * b + 1 for b in outer), 1)
    if box <= ENUMERATION_LIMIT:
        subset = CLSubset(Lattice.standard(size), L1Body(active, body.strict))
        return CountResult(len(subset.elements()), method="enumeration")
    slack = 1e-12 * size
    log_lo = math.fsum(math.log(2 * b + 1) for b in inner) - slack
    log_hi = math.fsum(math.log(2 * b + 1) for b in outer) + slack
    central = body.log_volume([i for i, r in enumerate(body.radii)
                               if body.coordinate_bound(r) >= 1])
    logger.debug("Interval count over %d coordinates: [%g, %g]", size,
                 log_lo, log_hi)
    return CountResult(None, log_lo, log_hi, central, method="interval")


def cl_count(subset):
    """
    Count a bounded CL-subset.

    Weighted l1 bodies over the standard lattice are counted exactly by closed
    form, by the integer-budget program or by enumeration whenever one of
    these is affordable, otherwise through the certified interval spanned by
    the inscribed box ``|c_i| < R_i/N`` and the circumscribed box
    ``|c_i| < R_i``. General bodies are enumerated over their bounding box.
    """
    if not subset.body.bounded:
        raise UnboundedBodyError("unbounded CL-subset")
    if isinstance(subset.body, L1Body) and subset.lattice.is_standard:
        return _l1_count(subset.body)
    return CountResult(len(subset.elements()), method="enumeration")


def dilate_count(lattice, body, factor):
    """
    Return ``(#(M cap Delta), #(M cap a Delta))`` for symmetric ``Delta``.
    """
    factor = Fraction(factor)
    if factor < 1:
        raise ValueError("Dilation factor must be at least 1.")
    if not body.bounded:
        raise UnboundedBodyError("unbounded CL-subset")
    if not body.is_symmetric():
        raise ValueError("Body must be symmetric.")
    small = CLSubset(lattice, body)
    large = CLSubset(lattice, body.scale(factor))
    return len(small.elements()), len(large.elements())
