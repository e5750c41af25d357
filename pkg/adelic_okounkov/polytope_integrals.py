# This file is part of AdelicOkounkov.
# Code licensed under the GNU General Public License v3 or later.

"""
Piecewise-linear calculus on the simplex ``d * Delta_k``.

Weight functions are minima of affine pieces; their sums are integrated over
faces of the moment polytope to obtain closed-form arithmetic degrees, and
concave minorants on grids are optimised for the toric Fujita bound. Regions
on which every minimum is attained by a fixed piece are cut out as halfspace
intersections, following the usual recipe: an interior point comes from a
Chebyshev-centre linear program, the vertices from
``scipy.spatial.HalfspaceIntersection``.

The concave program is solved in floating point by HiGHS and then re-solved
exactly on its active constraints, so that the reported bound is backed by an
exactly feasible minorant.

Functions:

    * ``positive_part_integral`` - (k+1)! times the integral of the positive part of a sum of minima of affine functions
    * ``maximize_concave`` - Maximum of a minimum of affine functions
    * ``grid_nodes`` - Nodes of a simplex grid
    * ``grid_cells`` - Cells of the standard grid triangulation
    * ``integration_weights`` - Node weights of the exact integral of an interpolant
    * ``concavity_rows`` - Local concavity constraints across interior cell walls
    * ``solve_concave_program`` - Best concave minorant on a grid

Classes:

    * ``ConcaveProgramResult`` - Outcome of ``solve_concave_program``

.. image:: classes_polytope_integrals.svg
"""

from fractions import Fraction
import itertools
import logging
import math

from flint import fmpq, fmpq_mat, fmpz_mat
import numpy as np
from scipy.optimize import linprog
from scipy.spatial import (ConvexHull, Delaunay, HalfspaceIntersection,
                           QhullError)

from adelic_okounkov.log_linear import LogLinear

logger = logging.getLogger(__name__)

#: Chebyshev radius below which a region counts as lower dimensional
DEGENERATE_RADIUS = 1e-10
#: Slack below which a float constraint counts as active
ACTIVE_TOLERANCE = 1e-7


def simplex_constraints(dimension, degree):
    """``A u <= b`` describing ``{u >= 0, sum(u) <= degree}``."""
    matrix = np.vstack([-np.eye(dimension), np.ones((1, dimension))])
    bounds = np.concatenate([np.zeros(dimension), [float(degree)]])
    return matrix, bounds


def _chebyshev_center(matrix, bounds):
    norms = np.linalg.norm(matrix, axis=1).reshape(-1, 1)
    cost = np.zeros(matrix.shape[1] + 1)
    cost[-1] = -1
    solution = linprog(cost, A_ub=np.hstack([matrix, norms]), b_ub=bounds,
                       bounds=[(None, None)] * matrix.shape[1] + [(0, None)],
                       method="highs")
    if not solution.success:
        return None, 0.0
    return solution.x[:-1], solution.x[-1]


def _integrate_affine(matrix, bounds, gradient, constant):
    """Integral of ``gradient . u + constant`` over ``{matrix u <= bounds}``."""
    dimension = matrix.shape[1]
    if dimension == 1:
        low, high = -np.inf, np.inf
        for (a,), b in zip(matrix, bounds):
            if a > 0:
                high = min(high, b / a)
            elif a < 0:
                low = max(low, b / a)
            elif b < 0:
                return 0.0
        if high <= low:
            return 0.0
        return (high - low) * (gradient[0] * (low + high) / 2 + constant)
    center, radius = _chebyshev_center(matrix, bounds)
    if center is None or radius < DEGENERATE_RADIUS:
        return 0.0
    halfspaces = np.hstack([matrix, -bounds.reshape(-1, 1)])
    try:
        points = HalfspaceIntersection(halfspaces, center).intersections
        points = points[ConvexHull(points).vertices]
        simplices = Delaunay(points).simplices
    except QhullError:
        return 0.0
    total = 0.0
    for simplex in points[simplices]:
        edges = simplex[1:] - simplex[0]
        volume = abs(np.linalg.det(edges)) / math.factorial(dimension)
        centroid = simplex.mean(axis=0)
        total += volume * (np.dot(gradient, centroid) + constant)
    return total


def _as_float_pieces(pieces):
    return [(np.array([float(g) for g in gradient], dtype=float),
             float(offset)) for gradient, offset in pieces]


def positive_part_integral(piece_sets, dimension, degree):
    """
    Return ``(k+1)! * integral over d*Delta_k of max(0, sum_v min_i a_vi)``.

    ``piece_sets`` holds, per place, the affine pieces ``(gradient, offset)``
    in the ``k`` local coordinates of the simplex; entries may be
    ``LogLinear`` numbers. The integral is split into the regions where each
    minimum is attained by a fixed piece and the sum is nonnegative, on which
    the integrand is affine.
    """
    piece_sets = [_as_float_pieces(pieces) for pieces in piece_sets]
    if dimension == 0:
        return max(0.0, sum(min(c for _, c in pieces)
                            for pieces in piece_sets))
    if degree == 0:
        return 0.0
    simplex_matrix, simplex_bounds = simplex_constraints(dimension, degree)
    if not piece_sets:
        return 0.0
    total = 0.0
    for choice in itertools.product(*[range(len(p)) for p in piece_sets]):
        rows, bounds = [simplex_matrix], [simplex_bounds]
        gradient = np.zeros(dimension)
        constant = 0.0
        for pieces, chosen in zip(piece_sets, choice):
            g_i, c_i = pieces[chosen]
            gradient = gradient + g_i
            constant += c_i
            for j, (g_j, c_j) in enumerate(pieces):
                if j != chosen:
                    rows.append((g_i - g_j).reshape(1, -1))
                    bounds.append(np.array([c_j - c_i]))
        rows.append(-gradient.reshape(1, -1))
        bounds.append(np.array([constant]))
        total += _integrate_affine(np.vstack(rows), np.concatenate(bounds),
                                   gradient, constant)
    return math.factorial(dimension + 1) * total


def maximize_concave(pieces, dimension, degree):
    """Maximum over ``d*Delta_k`` of ``min_i (g_i . u + c_i)``."""
    pieces = _as_float_pieces(pieces)
    if dimension == 0:
        return min(c for _, c in pieces)
    simplex_matrix, simplex_bounds = simplex_constraints(dimension, degree)
    rows = [np.hstack([simplex_matrix, np.zeros((dimension + 1, 1))])]
    bounds = [simplex_bounds]
    for gradient, offset in pieces:
        rows.append(np.hstack([-gradient, [1.0]]).reshape(1, -1))
        bounds.append(np.array([offset]))
    cost = np.zeros(dimension + 1)
    cost[-1] = -1
    solution = linprog(cost, A_ub=np.vstack(rows), b_ub=np.concatenate(bounds),
                       bounds=[(None, None)] * (dimension + 1),
                       method="highs")
    return -solution.fun


def grid_nodes(dimension, size):
    """Integer points ``i >= 0`` with ``sum(i) <= size``, sorted."""
    return [node for node in itertools.product(range(size + 1),
                                               repeat=dimension)
            if sum(node) <= size]


def grid_cells(dimension, size):
    """
    Cells of the standard triangulation of ``size * Delta_k`` for k <= 2.

    Segments in dimension 1; in dimension 2 the unit squares are cut along
    their anti-diagonal into an upward and a downward triangle.
    """
    if dimension == 0:
        return [((),)]
    if dimension == 1:
        return [((i,), (i + 1,)) for i in range(size)]
    if dimension == 2:
        cells = []
        for i in range(size):
            for j in range(size - i):
                cells.append(((i, j), (i + 1, j), (i, j + 1)))
                if i + j <= size - 2:
                    cells.append(((i + 1, j), (i, j + 1), (i + 1, j + 1)))
        return cells
    raise ValueError("Grid triangulations are only provided up to "
                     "dimension 2.")


def integration_weights(cells, dimension, steps):
    """Exact weight of each node in the integral of the PL interpolant."""
    weights = {}
    if dimension == 0:
        return {(): Fraction(1)}
    volume = Fraction(1, steps ** dimension * math.factorial(dimension))
    for cell in cells:
        for node in cell:
            weights[node] = weights.get(node, 0) + volume / len(cell)
    return weights


def concavity_rows(cells, dimension):
    """
    Rows ``(coefficients, 0)`` with ``coefficients . theta <= 0``.

    Along a line this is the second difference at interior nodes. For two
    triangles sharing the wall ``ab`` with opposite nodes ``c`` and ``d``,
    the cells form a parallelogram and local concavity reads
    ``theta(c) + theta(d) <= theta(a) + theta(b)``.
    """
    rows = []
    if dimension == 1:
        nodes = sorted({node for cell in cells for node in cell})
        present = set(nodes)
        for node in nodes:
            before, after = (node[0] - 1,), (node[0] + 1,)
            if before in present and after in present:
                rows.append({before: 1, node: -2, after: 1})
    elif dimension == 2:
        walls = {}
        for cell in cells:
            for a, b in itertools.combinations(cell, 2):
                opposite = [n for n in cell if n not in (a, b)][0]
                walls.setdefault(tuple(sorted((a, b))), []).append(opposite)
        for (a, b), opposite in sorted(walls.items()):
            if len(opposite) == 2:
                c, d = opposite
                rows.append({c: 1, d: 1, a: -1, b: -1})
    return rows


class ConcaveProgramResult(object):

    """Best concave minorant found by ``solve_concave_program``."""

    def __init__(self, value, theta, exact_value=None):
        #: Objective value as a float
        self.value = value
        #: Node values, float
        self.theta = theta
        #: Exact objective when the vertex was certified, else ``None``
        self.exact_value = exact_value

    @property
    def certified(self):
        return self.exact_value is not None


def _select_independent(rows, size):
    """Greedy maximal independent subset of integer rows."""
    chosen = []
    rank = 0
    for index, row in rows:
        trial = chosen + [row]
        if fmpz_mat(trial).rank() > rank:
            chosen.append(row)
            rank += 1
            yield index
            if rank == size:
                return


def _certify(nodes, theta, constraints, weights):
    """Re-solve the active constraints exactly and verify all constraints."""
    size = len(nodes)
    active = []
    for index, (coefficients, bound) in enumerate(constraints):
        slack = float(bound) - sum(c * theta[i] for i, c in coefficients)
        if abs(slack) <= ACTIVE_TOLERANCE * (1 + abs(float(bound))):
            dense = [0] * size
            for i, c in coefficients:
                dense[i] = c
            active.append((index, dense))
    chosen = list(_select_independent(active, size))
    if len(chosen) < size:
        return None
    primes = sorted({p for index in chosen
                     for p, _ in constraints[index][1].logs})
    matrix, right = [], []
    for index in chosen:
        coefficients, bound = constraints[index]
        dense = [0] * size
        for i, c in coefficients:
            dense[i] = c
        matrix.append(dense)
        logs = dict(bound.logs)
        right.append([fmpq(bound.rational.numerator,
                           bound.rational.denominator)] +
                     [fmpq(logs.get(p, Fraction(0)).numerator,
                           logs.get(p, Fraction(0)).denominator)
                      for p in primes])
    solution = fmpq_mat(matrix).solve(fmpq_mat(right)).table()

    def as_fraction(entry):
        return Fraction(int(entry.p), int(entry.q))

    exact = [LogLinear(as_fraction(row[0]),
                       [(p, as_fraction(q)) for p, q in zip(primes, row[1:])])
             for row in solution]
    for coefficients, bound in constraints:
        total = LogLinear()
        for i, c in coefficients:
            total = total + exact[i] * c
        if (total - bound).sign() > 0:
            return None
    value = LogLinear()
    for node, x in zip(nodes, exact):
        value = value + x * weights[node]
    return value


def solve_concave_program(nodes, upper, cells, dimension, steps):
    """
    Maximise the integral of ``theta`` over grid functions with
    ``0 <= theta <= upper`` at every node and ``theta`` locally concave.

    ``upper`` maps nodes to ``LogLinear`` bounds. Returns ``None`` when some
    bound is negative (the program is infeasible), else a
    ``ConcaveProgramResult`` whose ``value`` is the integral itself (callers
    apply their own normalisation).
    """
    if any(upper[node].sign() < 0 for node in nodes):
        return None
    index = {node: i for i, node in enumerate(nodes)}
    weights = integration_weights(cells, dimension, steps)
    rows = concavity_rows(cells, dimension)
    cost = np.array([-float(weights.get(node, 0)) for node in nodes])
    if rows:
        matrix = np.zeros((len(rows), len(nodes)))
        for r, row in enumerate(rows):
            for node, c in row.items():
                matrix[r, index[node]] = c
        rhs = np.zeros(len(rows))
    else:
        matrix, rhs = None, None
    bounds = [(0.0, float(upper[node])) for node in nodes]
    solution = linprog(cost, A_ub=matrix, b_ub=rhs, bounds=bounds,
                       method="highs-ds")
    if not solution.success:
        logger.warning("Concave program failed: %s", solution.message)
        return None
    theta = [float(x) for x in solution.x]
    constraints = []
    for node in nodes:
        constraints.append((((index[node], 1),), upper[node]))
        constraints.append((((index[node], -1),), LogLinear()))
    for row in rows:
        constraints.append((tuple((index[n], c) for n, c in row.items()),
                            LogLinear()))
    exact = _certify(nodes, theta, constraints, weights)
    if exact is None:
        logger.info("Concave program optimum could not be certified exactly.")
    return ConcaveProgramResult(-solution.fun, theta, exact)
