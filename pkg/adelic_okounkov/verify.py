# This file is part of AdelicOkounkov.
# Code licensed under the GNU General Public License v3 or later.

"""
Executable checks of the counting lemmas, Yuan-type estimates and volume
identities, each returning a self-contained ``Certificate``.

A certificate stores both sides of every asserted relation. Exact checks keep
integers and fractions, estimates keep floats together with the slack that
makes a finite-level statement out of an asymptotic one. Re-evaluating the
stored sides reproduces the verdict without recomputing anything.

The invariant ``delta`` is never computed; every check that needs it uses
``delta_upper`` and records the substitution in its constants.

Classes:

    * ``Certificate`` - Machine-readable outcome of one check

Functions:

    * ``check_counting_lemma`` - Counts of a symmetric set, its image and kernels
    * ``check_dilation_lemma`` - Lattice points of a body and its dilate
    * ``check_yuan_theorem`` - Count against valuation count at one level
    * ``check_prop_yuan`` - Normalised gap against ``D / log p``
    * ``interval_slack`` - Distance from a central log-count to its interval
    * ``check_brunn_minkowski`` - Superadditivity of volume roots
    * ``check_continuity`` - Sandwich bound for twists at infinity
    * ``check_nef_equality`` - Volume estimate against the nef degree
    * ``fujita_lower_bound`` - Toric concave minorant bound
    * ``check_baselocus_duality`` - Augmented base locus against null faces
    * ``check_homogeneity`` - ``CL(m (aL)) = CL((ma) L)`` as sets
    * ``check_kkok`` - Valuation counts against the Okounkov base
    * ``check_w_ample_openness`` - W-ampleness survives small twists
    * ``check_zhang_moriwaki`` - Empty base locus implies generation
    * ``random_counting_instance`` - Random surjection and symmetric set
    * ``random_dilation_instance`` - Random lattice and symmetric polytope
    * ``exit_status`` - Process exit code for a list of certificates

Variables:

    * ``PASS``, ``FAIL``, ``INCONCLUSIVE``, ``VACUOUS`` - Certificate states
    * ``RELATIONS`` - Supported relations between the two sides

.. image:: classes_verify.svg
"""

from fractions import Fraction
import hashlib
import itertools
import logging
import math
import numbers

from flint import fmpz_mat
import simplejson

from adelic_okounkov.adelic_model import (GradedSmallSections, all_faces,
                                          adeg_diagonal_nef,
                                          augmented_base_locus, delta_upper,
                                          face_label, is_w_ample,
                                          positive_part_integral,
                                          zhang_moriwaki_check)
from adelic_okounkov.exceptions import (AsymmetricSetError, DomainExitError,
                                        FaceMismatchError,
                                        InfeasibleGridError,
                                        NotSurjectiveError,
                                        VerificationError)
from adelic_okounkov.flags_valuations import find_good_flag
from adelic_okounkov.lattice_core import (ConvexBody, Lattice, dilate_count,
                                          star_sum)
from adelic_okounkov.log_linear import LogLinear
from adelic_okounkov.okounkov import (NEGATIVE_INFINITY, build_semigroup,
                                      geometric_mult_estimate, kappa_hat,
                                      kappa_hat_from_rank, kkok_cross_check,
                                      level_image, volume_estimate)
from adelic_okounkov.polytope_integrals import (grid_cells, grid_nodes,
                                                solve_concave_program)

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"
VACUOUS = "vacuous"

#: Relations a certificate can assert between ``lhs[i]`` and ``rhs[i]``
RELATIONS = ("<=", ">=", "<", ">", "==", "iff", "implies")

#: Largest number of grid nodes in the concave program
MAX_GRID_NODES = 200


def _holds(lhs, rhs, relation, tolerance):
    if relation == "<=":
        return lhs <= rhs + tolerance
    if relation == ">=":
        return lhs + tolerance >= rhs
    if relation == "<":
        return lhs < rhs
    if relation == ">":
        return lhs > rhs
    if relation == "==":
        return abs(lhs - rhs) <= tolerance
    if relation == "iff":
        return bool(lhs) == bool(rhs)
    if relation == "implies":
        return not lhs or bool(rhs)
    raise ValueError("Unknown relation {!r}.".format(relation))


def _encode(value):
    """JSON form of certificate values; fractions become ``"p/q"``."""
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, Fraction):
        return "{}/{}".format(value.numerator, value.denominator)
    if isinstance(value, LogLinear):
        return str(value)
    if isinstance(value, dict):
        return {str(key): _encode(item) for key, item in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        return [_encode(item) for item in value]
    if isinstance(value, numbers.Integral):
        return int(value)
    return float(value)


def _decode(value):
    if isinstance(value, str):
        return Fraction(value)
    return value


def _digest(inputs):
    text = simplejson.dumps(_encode(inputs), sort_keys=True)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class Certificate(object):

    """
    Outcome of a check.

    ``lhs``, ``rhs`` and ``relations`` are parallel lists; the check holds
    when every ``lhs[i] relation[i] rhs[i]`` holds with ``tolerance`` added
    on the side of the non-strict relations. ``status`` is ``PASS`` or
    ``FAIL`` unless the check decided otherwise: ``VACUOUS`` marks relations
    that hold for trivial reasons and ``INCONCLUSIVE`` a finite-level
    surrogate that failed without refuting anything.
    """

    def __init__(self, check, inputs, lhs, rhs, relations, tolerance=0,
                 status=None, witness=None, constants=None):
        if isinstance(relations, str):
            relations = [relations] * len(lhs)
        if not len(lhs) == len(rhs) == len(relations):
            raise VerificationError("Both sides need one relation per entry.")
        for relation in relations:
            if relation not in RELATIONS:
                raise VerificationError("Unknown relation {!r}.".format(
                    relation))
        #: Name of the check
        self.check = check
        #: Inputs the check ran on
        self.inputs = inputs
        #: SHA-256 of the canonical JSON of ``inputs``
        self.inputs_digest = _digest(inputs)
        #: Left sides
        self.lhs = list(lhs)
        #: Right sides
        self.rhs = list(rhs)
        #: Relation per entry
        self.relations = list(relations)
        #: Slack granted to non-strict relations
        self.tolerance = tolerance
        #: Witness data, failing entries in particular
        self.witness = dict(witness or {})
        #: Intermediate constants
        self.constants = dict(constants or {})
        if status is None:
            status = PASS if self.reevaluate() else FAIL
        #: One of ``PASS``, ``FAIL``, ``INCONCLUSIVE``, ``VACUOUS``
        self.status = status
        failing = self.failing()
        if failing:
            self.witness.setdefault("failing", failing)

    def __repr__(self):
        return "Certificate({!r}, {})".format(self.check, self.status)

    def reevaluate(self):
        """Recompute the verdict from the stored sides alone."""
        return all(_holds(a, b, relation, self.tolerance) for a, b, relation
                   in zip(self.lhs, self.rhs, self.relations))

    def failing(self):
        """Indices of the relations that do not hold."""
        return [i for i, (a, b, relation) in
                enumerate(zip(self.lhs, self.rhs, self.relations))
                if not _holds(a, b, relation, self.tolerance)]

    @property
    def passed(self):
        return self.status in (PASS, VACUOUS)

    def to_json(self):
        return {"check": self.check, "inputs": _encode(self.inputs),
                "inputs_digest": self.inputs_digest,
                "lhs": _encode(self.lhs), "rhs": _encode(self.rhs),
                "relation": list(self.relations),
                "tolerance": _encode(self.tolerance),
                "status": self.status, "pass": self.passed,
                "witness": _encode(self.witness),
                "constants": _encode(self.constants)}

    @classmethod
    def from_json(cls, data):
        certificate = cls(data["check"], data["inputs"],
                          [_decode(x) for x in data["lhs"]],
                          [_decode(x) for x in data["rhs"]],
                          data["relation"], _decode(data["tolerance"]),
                          data["status"], data["witness"], data["constants"])
        if certificate.inputs_digest != data["inputs_digest"]:
            raise VerificationError("Inputs digest does not match the "
                                    "stored inputs.")
        return certificate

    def dumps(self):
        return simplejson.dumps(self.to_json(), sort_keys=True, indent=2)

    def save(self, path):
        with open(path, "w") as certificate_file:
            certificate_file.write(self.dumps())


def exit_status(certificates):
    """Exit code 1 if some certificate failed, else 0."""
    code = 0
    for certificate in certificates:
        if certificate.status == FAIL:
            code = 1
        elif certificate.status == INCONCLUSIVE:
            logger.warning("Check %s is inconclusive.", certificate.check)
    return code


def _model_inputs(model, face=None, **extra):
    inputs = {"model": model.to_json()}
    if face is not None:
        inputs["face"] = list(face)
    inputs.update(extra)
    return inputs


# Counting lemmas


def _apply(matrix, vector):
    return tuple(sum(a * x for a, x in zip(row, vector)) for row in matrix)


def _is_surjective(matrix, columns):
    if not matrix:
        return True
    normal_form = fmpz_mat([list(row) for row in matrix]).snf()
    diagonal = [int(normal_form[i, i]) for i in range(min(len(matrix),
                                                          columns))]
    nonzero = [x for x in diagonal if x]
    return len(nonzero) == len(matrix) and all(abs(x) == 1 for x in nonzero)


def check_counting_lemma(matrix, points):
    """
    Check both counting inequalities for a surjection ``r: Z^r -> Z^s``,
    given as an ``s x r`` integer matrix, and a finite symmetric set:

        #G <= #r(G) * #(Ker(r) cap 2*G)
        #r(G) * #(Ker(r) cap G) <= #(2*G)
    """
    points = {tuple(int(x) for x in p) for p in points}
    if not points:
        raise VerificationError("The set must not be empty.")
    columns = len(next(iter(points)))
    matrix = [tuple(int(x) for x in row) for row in matrix]
    if any(len(row) != columns for row in matrix):
        raise VerificationError("Matrix rows need {} entries.".format(columns))
    if any(tuple(-x for x in p) not in points for p in points):
        raise AsymmetricSetError("The set is not symmetric.")
    if not _is_surjective(matrix, columns):
        raise NotSurjectiveError("The matrix does not map onto Z^{}."
                                 .format(len(matrix)))
    doubled = star_sum(2, points)
    zero = (0,) * len(matrix)
    image = {_apply(matrix, p) for p in points}
    kernel = sum(1 for p in points if _apply(matrix, p) == zero)
    kernel_doubled = sum(1 for p in doubled if _apply(matrix, p) == zero)
    counts = {"set": len(points), "image": len(image),
              "doubled": len(doubled), "kernel": kernel,
              "kernel_doubled": kernel_doubled}
    return Certificate(
        "counting_lemma",
        {"matrix": [list(row) for row in matrix],
         "set": sorted(list(p) for p in points)},
        [len(points), len(image) * kernel],
        [len(image) * kernel_doubled, len(doubled)],
        "<=", constants={"counts": counts})


def check_dilation_lemma(lattice, body, factor):
    """
    Check ``#(M cap D) <= #(M cap aD) <= #(M cap D) * ceil(2a)^rk(M)``.
    """
    factor = Fraction(factor)
    small, large = dilate_count(lattice, body, factor)
    multiplier = math.ceil(2 * factor) ** lattice.rank
    return Certificate(
        "dilation_lemma",
        {"lattice": [list(row) for row in lattice.basis],
         "ambient_rank": lattice.ambient_rank,
         "body": [[_encode(x) for x in v] for v in body.vertices],
         "factor": factor},
        [small, large], [large, small * multiplier], "<=",
        constants={"small": small, "large": large, "rank": lattice.rank,
                   "multiplier": multiplier})


def random_counting_instance(rng, max_rank=4, max_size=200):
    """
    Random ``(matrix, points)`` for ``check_counting_lemma``.

    The matrix is ``[I_s | B]`` with random columns ``B`` and permuted
    columns, the set is symmetric inside ``[-2, 2]^r``.
    """
    rank = rng.randint(1, max_rank)
    target = rng.randint(1, rank)
    rows = [[int(i == j) for j in range(target)] +
            [rng.randint(-2, 2) for _ in range(rank - target)]
            for i in range(target)]
    order = list(range(rank))
    rng.shuffle(order)
    matrix = [[row[j] for j in order] for row in rows]
    points = set()
    for _ in range(rng.randint(1, max_size // 2)):
        p = tuple(rng.randint(-2, 2) for _ in range(rank))
        points.add(p)
        points.add(tuple(-x for x in p))
    return matrix, points


def random_dilation_instance(rng, max_rank=3,
                             factors=(1, Fraction(3, 2), 2, 5)):
    """Random ``(lattice, body, factor)`` for ``check_dilation_lemma``."""
    rank = rng.randint(1, max_rank)
    generators = [[rng.randint(-2, 2) for _ in range(rank)]
                  for _ in range(rank + 1)]
    generators.append([int(i == 0) for i in range(rank)])
    lattice = Lattice.from_generators(generators, rank)
    vertices = set()
    for _ in range(rng.randint(1, 4)):
        v = tuple(Fraction(rng.randint(-4, 4), 2) for _ in range(rank))
        vertices.add(v)
        vertices.add(tuple(-x for x in v))
    return lattice, ConvexBody(vertices), rng.choice(factors)


# Yuan-type estimates


def _check_flag(model, face, flag):
    face = model.check_face(face)
    if tuple(flag.face) != face:
        raise FaceMismatchError("Flag lives on face {}, not {}.".format(
            flag.face, face))
    flag.check_model(model)
    return face


def check_yuan_theorem(model, face, flag, level):
    """
    Check ``|log #G - #w(G - 0) log p| <= (d log 4 + log(4p) log(4b)) rk / log p``
    for ``G = CL(mL)`` restricted to ``face``.

    ``d`` is ``delta_upper``, ``rk`` the rank of ``<G>`` and ``b = p rk``.
    Interval counts are checked at their worst end. The certificate is
    vacuous when the right side already exceeds both terms on the left.
    """
    face = _check_flag(model, face, flag)
    sections = GradedSmallSections(model, level, face, strict=True)
    if sections.is_trivial:
        raise VerificationError("The restricted strictly small sections of "
                                "level {} are trivial.".format(level))
    count = sections.count()
    image, reduced = level_image(model, face, flag, level)
    prime = flag.prime
    log_p = math.log(prime)
    rank = sections.dimension
    beta = prime * rank
    delta = delta_upper(model, face)
    valuation_term = len(image) * log_p
    left = max(abs(count.log_lo - valuation_term),
               abs(count.log_hi - valuation_term))
    right = ((delta * math.log(4) + math.log(4 * prime) *
              math.log(4 * beta)) * rank / log_p)
    status = None
    if right >= max(count.log_hi, valuation_term):
        status = VACUOUS
    constants = {"prime": prime, "level": level, "rank": rank, "beta": beta,
                 "delta_upper": delta,
                 "delta_substitution": "delta replaced by delta_upper",
                 "count": count.as_dict(), "valuation_count": len(image),
                 "reduced": reduced}
    certificate = Certificate(
        "yuan_theorem",
        _model_inputs(model, face, flag=flag.to_json(), level=level),
        [left], [right], "<=", tolerance=1e-9, status=status,
        witness={"slack": right - left}, constants=constants)
    logger.info("Yuan check p=%d m=%d: %.6g <= %.6g (%s)", prime, level,
                left, right, certificate.status)
    return certificate


def interval_slack(count, normalization):
    """
    Largest distance from the central log-count to an end of its interval,
    divided by ``normalization``.
    """
    return max(count.log_hi - count.log_central,
               count.log_central - count.log_lo) / normalization


def check_prop_yuan(model, face, flag, m_range):
    """
    Check the normalised gap between ``log #G_m`` and ``#w_m log p`` at the
    largest level against ``D / log p + slack(m)``.

    ``D = log(4) delta_upper e / kappa!`` with ``e`` from
    ``geometric_mult_estimate``. A gap above the bound is inconclusive, a
    face in the base locus gives a vacuous certificate.
    """
    face = _check_flag(model, face, flag)
    levels = sorted(m for m in set(m_range) if m > 0)
    if not levels:
        raise VerificationError("Need at least one positive level.")
    prime = flag.prime
    log_p = math.log(prime)
    inputs = _model_inputs(model, face, flag=flag.to_json(), levels=levels)
    kappa = kappa_hat(model, face, levels[-1])
    last = GradedSmallSections(model, levels[-1], face, strict=True)
    if kappa == NEGATIVE_INFINITY or last.is_trivial:
        return Certificate("prop_yuan", inputs, [0], [0], "<=",
                           status=VACUOUS,
                           witness={"reason": "no restricted strictly small "
                                    "sections"})
    exponent = kappa + 1
    series = {"m": [], "counts": [], "valuations": []}
    for level in levels:
        count = GradedSmallSections(model, level, face, strict=True).count()
        image, _ = level_image(model, face, flag, level)
        series["m"].append(level)
        series["counts"].append(count.log_central / level ** exponent)
        series["valuations"].append(len(image) * log_p / level ** exponent)
    level = levels[-1]
    count = last.count()
    dimension = last.dimension
    delta = delta_upper(model, face)
    multiplicity = geometric_mult_estimate(model, face, levels)
    d_constant = math.log(4) * delta * multiplicity / math.factorial(kappa)
    bound = d_constant / log_p
    slack = (math.log(4 * prime) * math.log(4 * prime * dimension) *
             dimension / (log_p * level ** exponent) +
             interval_slack(count, level ** exponent))
    gap = abs(series["counts"][-1] - series["valuations"][-1])
    holds = gap <= bound + slack
    certificate = Certificate(
        "prop_yuan", inputs, [gap], [bound + slack], "<=",
        status=None if holds else INCONCLUSIVE,
        witness={"level": level},
        constants={"D": d_constant, "bound": bound, "slack": slack,
                   "delta_upper": delta,
                   "delta_substitution": "delta replaced by delta_upper",
                   "multiplicity": multiplicity, "kappa_hat": kappa,
                   "series": series})
    logger.info("Prop-Yuan p=%d: gap %.6g vs %.6g + %.6g", prime, gap, bound,
                slack)
    return certificate


# Volume identities


def _semigroup_index(model, face, m_max, prime):
    flag = find_good_flag(model, face, None, prime)
    sample = build_semigroup(model, face, flag, m_max)
    return sample.index, sample.generates


def check_brunn_minkowski(model_l, model_m, face, m_range, prime=11,
                          semigroup_levels=8):
    """
    Check ``(|S| avol)^(1/(k+1))`` for ``L + M`` against the sum of the
    terms of ``L`` and ``M`` within the interval widths.

    ``|S|`` is the index of the sampled semigroup over the first
    ``semigroup_levels`` levels, 1 when the sample generates.
    """
    face = model_l.check_face(face)
    levels = sorted(set(m_range))
    total_model = model_l.add(model_m)
    exponent = 1 / len(face)
    terms = {}
    for name, model in (("L", model_l), ("M", model_m),
                        ("L+M", total_model)):
        kappa = kappa_hat(model, face, levels[-1])
        if kappa == NEGATIVE_INFINITY:
            if name == "L":
                raise DomainExitError("The face lies in the stable base "
                                      "locus of L.")
            terms[name] = {"kappa_hat": None, "index": 0, "avol": 0.0,
                           "interval": [0.0, 0.0], "root": 0.0,
                           "root_lo": 0.0, "root_hi": 0.0}
            continue
        if kappa < len(face) - 1 and name == "L":
            raise DomainExitError("kappa_hat of L is below the face "
                                  "dimension.")
        report = volume_estimate(model, face, levels)
        index, generates = _semigroup_index(
            model, face, min(semigroup_levels, levels[-1]), prime)
        low, high = report.interval
        terms[name] = {"kappa_hat": kappa, "index": index,
                       "generates": generates, "avol": report.raw,
                       "interval": [low, high],
                       "root": (index * max(report.raw, 0)) ** exponent,
                       "root_lo": (index * max(low, 0)) ** exponent,
                       "root_hi": (index * max(high, 0)) ** exponent}
    left = terms["L+M"]["root"]
    right = terms["L"]["root"] + terms["M"]["root"]
    tolerance = ((terms["L+M"]["root_hi"] - left) +
                 (right - terms["L"]["root_lo"] - terms["M"]["root_lo"]) +
                 1e-9)
    return Certificate(
        "brunn_minkowski",
        {"L": model_l.to_json(), "M": model_m.to_json(), "face": list(face),
         "levels": levels, "prime": prime},
        [left], [right], ">=", tolerance=tolerance,
        witness={"margin": left - right}, constants={"terms": terms})


def _sandwich_constant(model, face, max_level):
    """
    Smallest ``a / eta`` over face monomials of level ``a``.

    The smallest admissible multiple ``g x^alpha`` has finite norms 1 and
    archimedean norm ``g 2^(-v) = 1 / R``, so ``eta = log R``.
    """
    best = None
    for level in range(1, max_level + 1):
        sections = GradedSmallSections(model, level, face, strict=True)
        for radius in sections.radii:
            if radius > 1:
                value = level / math.log(radius)
                if best is None or value < best:
                    best = value
    return best


def check_continuity(model, face, lambdas, m_range, sandwich_levels=8):
    """
    Check ``|e(lambda) - e(0)| <= ((1 + c|lambda|)^(kappa+1) - 1) e(0)``
    plus the interval slack, for twists by ``lambda`` at infinity.

    ``c = a / eta`` for the face monomial of level ``a`` whose smallest
    admissible multiple has archimedean norm ``exp(-eta)``. Twists that
    push the face into the base locus are domain exits and are reported,
    not checked.
    """
    face = model.check_face(face)
    levels = sorted(set(m_range))
    base = volume_estimate(model, face, levels)
    if base.e_hat is None:
        raise DomainExitError("The face lies in the stable base locus.")
    kappa = base.kappa
    constant = _sandwich_constant(model, face,
                                  min(sandwich_levels, levels[-1]))
    if constant is None:
        raise DomainExitError("No face monomial has norm below 1.")
    low, high = base.interval
    base_slack = (high - low) / 2
    lhs, rhs, exits, values = [], [], [], {}
    lambdas = [Fraction(x) for x in lambdas]
    for value in lambdas:
        twisted = model.twist_infinity(value)
        if kappa_hat(twisted, face, levels[-1]) == NEGATIVE_INFINITY:
            exits.append(_encode(value))
            continue
        report = volume_estimate(twisted, face, levels)
        low, high = report.interval
        bound = (((1 + constant * abs(float(value))) ** (kappa + 1) - 1) *
                 base.e_hat)
        lhs.append(abs(report.e_hat - base.e_hat))
        rhs.append(bound + base_slack + (high - low) / 2)
        values[_encode(value)] = report.e_hat
    status = VACUOUS if not lhs else None
    return Certificate(
        "continuity",
        _model_inputs(model, face, lambdas=lambdas, levels=levels),
        lhs, rhs, "<=", tolerance=1e-9, status=status,
        witness={"domain_exits": exits},
        constants={"sandwich_constant": constant, "kappa_hat": kappa,
                   "e_hat": base.e_hat, "twisted_e_hat": values})


def check_nef_equality(model, face, m_range, tolerance=0.15,
                       allow_undetermined=False):
    """
    Compare the extrapolated volume estimate with ``adeg_diagonal_nef``.

    The two agree when their difference is at most ``tolerance`` times the
    oracle plus half the interval width of the estimate.
    """
    face = model.check_face(face)
    levels = sorted(set(m_range))
    oracle = adeg_diagonal_nef(model, face, allow_undetermined)
    report = volume_estimate(model, face, levels, extrapolate_estimate=True)
    low, high = report.interval
    allowed = tolerance * abs(oracle) + (high - low) / 2 + 1e-9
    return Certificate(
        "nef_equality",
        _model_inputs(model, face, levels=levels,
                      allow_undetermined=allow_undetermined),
        [report.avol], [oracle], "==", tolerance=allowed,
        witness={"difference": report.avol - oracle},
        constants={"oracle": oracle, "raw": report.raw,
                   "extrapolated": report.extrapolated,
                   "interval": [low, high], "relative_tolerance": tolerance})


def _shifts(size, total):
    """Vectors in ``N^size`` with sum below ``total``."""
    return [b for b in itertools.product(range(total), repeat=size)
            if sum(b) < total]


def _local_value(piece_sets, point):
    total = LogLinear()
    for pieces in piece_sets:
        total = total + min((sum((g * x for g, x in zip(gradient, point)),
                                 LogLinear()) + offset
                             for gradient, offset in pieces))
    return total


def _fujita_bound(model, face, steps):
    """Best ``(k+1)! * integral`` over shifts; see ``fujita_lower_bound``."""
    k = len(face) - 1
    degree = model.degree
    nodes = grid_nodes(k, steps)
    if len(nodes) > MAX_GRID_NODES:
        raise InfeasibleGridError("Grid with {} nodes exceeds {}.".format(
            len(nodes), MAX_GRID_NODES))
    cells = grid_cells(k, steps)
    piece_sets = [model.local_pieces(place, face) for place in model.places]
    shifts = _shifts(len(face), degree) if k else [(0,)]
    best = (0.0, None, None)
    tried = {}
    for shift in shifts:
        size = degree - sum(shift)
        upper = {}
        for node in nodes:
            point = tuple(shift[j + 1] + Fraction(size * i, steps)
                          for j, i in enumerate(node))
            upper[node] = _local_value(piece_sets, point)
        result = solve_concave_program(nodes, upper, cells, k, steps)
        key = ",".join(str(b) for b in shift)
        if result is None:
            tried[key] = None
            continue
        factor = math.factorial(k + 1) * size ** k
        value = result.value * factor
        tried[key] = value
        if best[1] is None or value > best[0]:
            exact = (result.exact_value * factor if result.certified
                     else None)
            best = (value, shift, exact)
    return best, tried


def fujita_lower_bound(model, face, m_range, steps=8, tolerance=0.15):
    """
    Toric lower bound for the restricted volume and its comparison with the
    volume estimate.

    For every shift ``b`` with ``|b| < d`` the best concave grid function
    ``0 <= theta <= Phi`` on ``b + (d - |b|) Delta_F`` is found by linear
    programming; the bound is ``(k+1)!`` times its integral, maximised over
    ``b``, and 0 when every shift meets a negative node. It is asserted to
    stay below the larger of the upper interval end and the extrapolated
    estimate, up to ``tolerance`` times the estimate.
    """
    face = model.check_face(face)
    if model.degree == 0:
        raise InfeasibleGridError("The polytope of O(0) is a point.")
    if len(face) - 1 > 2:
        raise InfeasibleGridError("Grid triangulations are only provided "
                                  "up to dimension 2.")
    levels = sorted(set(m_range))
    (bound, shift, exact), tried = _fujita_bound(model, face, steps)
    report = volume_estimate(model, face, levels, extrapolate_estimate=True)
    low, high = report.interval
    estimate = report.avol
    right = max(high, estimate)
    return Certificate(
        "fujita_lower_bound",
        _model_inputs(model, face, levels=levels, steps=steps),
        [bound], [right], "<=", tolerance=tolerance * abs(estimate) + 1e-9,
        witness={"gap": estimate - bound,
                 "below_interval": bound < low},
        constants={"bound": bound, "exact_bound": exact,
                   "certified": exact is not None,
                   "shift": list(shift) if shift else None,
                   "shifts": tried, "avol": estimate, "interval": [low, high],
                   "positive_part_integral": positive_part_integral(model,
                                                                    face)})


# Base loci and homogeneity


def check_baselocus_duality(model, m_max=10, threshold=1e-9):
    """
    For every coordinate face ``Z``, check that ``Z`` lies in the augmented
    base locus exactly when its volume is null.

    The volume side is computed without the base locus: the face counts as
    null when the rank of its sampled semigroup falls short of
    ``dim Z + 2`` or when the upper end of the volume interval at
    ``m_max`` is below ``threshold``.
    """
    locus = augmented_base_locus(model, m_max)
    faces = all_faces(model.dim)
    lhs, rhs, ranks, uppers = [], [], [], []
    for face in faces:
        lhs.append(locus.contains_face(face))
        ranked = kappa_hat_from_rank(model, face, m_max)
        upper = volume_estimate(model, face, [m_max]).interval[1]
        ranks.append(None if ranked == NEGATIVE_INFINITY else ranked)
        uppers.append(upper)
        rhs.append(ranked < len(face) - 1 or upper < threshold)
    return Certificate(
        "baselocus_duality",
        _model_inputs(model, m_max=m_max, threshold=threshold), lhs, rhs,
        "iff", witness={"faces": [face_label(f, model.dim) for f in faces],
                        "kappa_from_rank": ranks, "interval_upper": uppers},
        constants={"augmented_base_locus": locus.to_json()})


def _section_data(sections):
    return (sections.monomials, sections.radii, sections.scales)


def check_homogeneity(model, face, a_values=(2, 3), m_max=8):
    """Check ``CL(m (aL)) = CL((ma) L)`` on ``face`` as sets."""
    face = model.check_face(face)
    lhs, keys = [], []
    for a in a_values:
        multiple = model.scale(a)
        for m in range(1, m_max + 1):
            lhs.append(_section_data(GradedSmallSections(multiple, m, face)) ==
                       _section_data(GradedSmallSections(model, m * a, face)))
            keys.append("a={} m={}".format(a, m))
    return Certificate(
        "homogeneity",
        _model_inputs(model, face, a_values=list(a_values), m_max=m_max),
        lhs, [True] * len(lhs), "==", witness={"cases": keys})


def check_kkok(model, face, flag, m_range, tolerance=0.15):
    """Valuation counts against the Okounkov base volume, relatively."""
    result = kkok_cross_check(model, face, flag, m_range)
    scale = max(abs(result.count_estimate), abs(result.volume))
    return Certificate(
        "kkok", _model_inputs(model, face, flag=flag.to_json(),
                              levels=sorted(set(m_range))),
        [result.count_estimate], [result.volume], "==",
        tolerance=tolerance * scale,
        constants=result.to_json())


def check_w_ample_openness(model, m_max=10, upper=1, iterations=12):
    """
    Bisect for ``l > 0`` such that the twists by ``+-l`` at infinity stay
    w-ample; vacuous when the model itself is not w-ample.
    """
    inputs = _model_inputs(model, m_max=m_max, upper=Fraction(upper),
                           iterations=iterations)
    ample, level = is_w_ample(model, m_max)
    if not ample:
        return Certificate("w_ample_openness", inputs, [], [], [],
                           status=VACUOUS,
                           witness={"reason": "model is not w-ample"})

    def survives(value):
        return (is_w_ample(model.twist_infinity(-value), m_max)[0] and
                is_w_ample(model.twist_infinity(value), m_max)[0])

    low, high = Fraction(0), Fraction(upper)
    if survives(high):
        low = high
    else:
        for _ in range(iterations):
            middle = (low + high) / 2
            if survives(middle):
                low = middle
            else:
                high = middle
    return Certificate("w_ample_openness", inputs, [low], [Fraction(0)], ">",
                       witness={"witness_level": level},
                       constants={"lambda_hat": low, "first_failure": high})


def check_zhang_moriwaki(model, m_max=20):
    """An empty stable base locus implies eventual generation."""
    report = zhang_moriwaki_check(model, m_max)
    return Certificate("zhang_moriwaki", _model_inputs(model, m_max=m_max),
                       [report.base_locus.is_empty],
                       [report.onset is not None], "implies",
                       constants=report.to_json())
