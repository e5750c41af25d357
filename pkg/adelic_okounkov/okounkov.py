# This file is part of AdelicOkounkov.
# Code licensed under the GNU General Public License v3 or later.

"""
Arithmetic Okounkov semigroups and volume estimators.

The semigroup of a face collects the pairs ``(m, w(s))`` over the nonzero
strictly small sections ``s`` of level ``m`` restricted to the face. Its base
is approximated by the convex hull of the points ``w / m``. Restricted volumes
are estimated by counting the restricted strictly small sections level by
level, normalising by ``m^(k+1) / (k+1)!`` for a face of dimension ``k``,
and optionally extrapolating in ``log(m) / m``.

Classes:

    * ``SemigroupSample`` - Valuation images of the levels of a face
    * ``OkounkovBase`` - Convex hull of normalised valuation vectors
    * ``LevelCount`` - Count of one level with its normalisation
    * ``VolumeReport`` - Per-level counts and volume estimates
    * ``KKOkResult`` - Both sides of the count/volume comparison

Functions:

    * ``level_image`` - Valuation image of one level
    * ``build_semigroup`` - Sample the semigroup up to a level
    * ``kappa_hat`` - Arithmetic restricted Iitaka dimension
    * ``kappa_hat_from_rank`` - Iitaka dimension from the rank of the span
    * ``volume_estimate`` - Restricted volume estimate
    * ``kkok_cross_check`` - Valuation counts against the volume of the base
    * ``geometric_mult_estimate`` - Multiplicity of the restricted algebra
    * ``extrapolate`` - Two-point fit ``c0 + c1 log(m) / m``

Variables:

    * ``SCHEMA_VERSION`` - Version of the CSV and JSON report layout
    * ``CSV_COLUMNS`` - Columns of the per-level CSV series
    * ``NEGATIVE_INFINITY`` - Iitaka dimension of a face in the base locus

.. image:: classes_okounkov.svg
"""

from concurrent.futures import ProcessPoolExecutor
import itertools
import logging
import math

import numpy as np
from scipy.spatial import ConvexHull, QhullError
import simplejson
from sympy import nextprime

from adelic_okounkov.adelic_model import (GradedSmallSections, Place,
                                          Section, stable_base_locus_ss)
from adelic_okounkov.exceptions import DomainExitError, FaceMismatchError
from adelic_okounkov.flags_valuations import (GoodFlag, valuation_image,
                                              valuation_vector)
from adelic_okounkov.lattice_core import Lattice, lattice_span

logger = logging.getLogger(__name__)

#: Version of the report layout
SCHEMA_VERSION = 1
#: Columns of the per-level CSV series; counts are natural logarithms
CSV_COLUMNS = ("m", "count_lo", "count_hi", "normalized_lo", "normalized_hi")
#: Iitaka dimension of a face contained in the stable base locus
NEGATIVE_INFINITY = float("-inf")


class SemigroupSample(object):

    """
    Sampled arithmetic Okounkov semigroup of a face.

    ``images`` maps each level ``m`` to the set of valuation vectors of its
    nonzero restricted strictly small sections.
    """

    def __init__(self, face, flag, images, reduced=False):
        #: Coordinate face
        self.face = face
        #: Flag the valuations are taken along
        self.flag = flag
        #: Level -> frozenset of valuation vectors
        self.images = {m: frozenset(image) for m, image in images.items()}
        #: Whether some level used representatives instead of all sections
        self.reduced = reduced
        #: Ambient rank of the vectors ``(m, w)``
        self.ambient_rank = len(face) + 1
        #: Span of the sampled pairs
        self.lattice = lattice_span(self.pairs(), self.ambient_rank)

    @property
    def levels(self):
        """Nonempty levels, the sampled part of N_{X|Y}."""
        return sorted(m for m, image in self.images.items() if image)

    @property
    def l0(self):
        """
        Smallest level from which every sampled level is nonempty, or
        ``None``.
        """
        start = None
        for m in sorted(self.images, reverse=True):
            if not self.images[m]:
                break
            start = m
        return start

    def pairs(self):
        return [(m,) + tuple(w) for m in sorted(self.images)
                for w in sorted(self.images[m])]

    @property
    def is_empty(self):
        return not self.levels

    @property
    def rank(self):
        return self.lattice.rank

    @property
    def generates(self):
        """True if the pairs generate ``Z x Z^(k+1)``."""
        return self.lattice.is_standard

    @property
    def index(self):
        """
        Covolume ``|S|`` of the slice ``<S> cap pr1^-1(0)``, 0 when it is
        not of full rank.
        """
        if self.is_empty:
            return 0
        slice_ = self.lattice.first_coordinate_slice()
        if slice_.rank < slice_.ambient_rank:
            return 0
        return slice_.determinant()

    def count(self, level):
        return len(self.images.get(level, ()))

    def to_json(self):
        return {"face": list(self.face), "flag": self.flag.to_json(),
                "levels": self.levels, "rank": self.rank,
                "index": self.index, "generates": self.generates,
                "reduced": self.reduced,
                "counts": {str(m): len(image) for m, image in
                           sorted(self.images.items())}}


def _origin_image(sections, flag):
    """
    Image of the nonzero sections for a flag centred at the chart origin.

    The valuation of a section is that of its lexicographically smallest
    monomial term ``p^t x^a``, and that term is itself strictly small, so
    the image is ``{(t, beta(a)) : p^t < R_a}``.
    """
    image = set()
    for alpha, radius in zip(sections.monomials, sections.radii):
        beta = tuple(alpha[j] for j in flag.order)
        power = 1
        t = 0
        while power < radius:
            image.add((t,) + beta)
            power *= flag.prime
            t += 1
    return image


def _representative_image(sections, flag):
    """Image of the single- and two-term representatives."""
    prime = flag.prime
    residues = [b for b in range(-(prime // 2), prime // 2 + 1) if b]
    small = [(alpha, radius, scale) for alpha, radius, scale in
             zip(sections.monomials, sections.radii, sections.scales)
             if radius > 1]
    image = set()
    level = sections.level
    for alpha, radius, scale in small:
        power = 1
        while power < radius:
            image.add(valuation_vector(
                Section(level, {alpha: power * scale}), flag))
            power *= prime
    for (alpha, r_a, s_a), (beta, r_b, s_b) in itertools.combinations(small,
                                                                       2):
        for b in residues:
            power = 1
            while power * (1 / r_a + abs(b) / r_b) < 1:
                image.add(valuation_vector(Section(level, {
                    alpha: power * s_a, beta: power * b * s_b}), flag))
                power *= prime
    return image


def level_image(model, face, flag, level, exact_limit=10 ** 5):
    """
    Return ``(image, reduced)`` for the nonzero restricted strictly small
    sections of one level.

    Flags centred at the chart origin use the monomial description of the
    image. Otherwise levels with at most ``exact_limit`` sections are
    enumerated in full and larger ones are reduced to single- and two-term
    representatives, which sets ``reduced``.
    """
    sections = GradedSmallSections(model, level, face, strict=True)
    if sections.is_trivial:
        return set(), False
    if flag.is_centered_at_origin:
        return _origin_image(sections, flag), False
    count = sections.count()
    if count.exact and count.count <= exact_limit:
        image, _ = valuation_image(sections.sections(), flag)
        return image, False
    logger.info("Level %d reduced to two-term representatives.", level)
    return _representative_image(sections, flag), True


def build_semigroup(model, face, flag, m_max, exact_limit=10 ** 5):
    """
    Sample the semigroup of ``face`` along ``flag`` for levels ``1..m_max``.

    See ``level_image`` for how each level is computed.
    """
    face = model.check_face(face)
    if tuple(flag.face) != face:
        raise FaceMismatchError("Flag lives on face {}, not {}.".format(
            flag.face, face))
    flag.check_model(model)
    images = {}
    reduced = False
    for level in range(1, m_max + 1):
        images[level], level_reduced = level_image(model, face, flag, level,
                                                   exact_limit)
        reduced = reduced or level_reduced
    sample = SemigroupSample(face, flag, images, reduced)

    logger.info("Semigroup on face %s: levels %s, rank %d", face,
                sample.levels, sample.rank)
    return sample


def _unweighted_prime(model):
    prime = 2
    while Place(prime) in model.weights:
        prime = int(nextprime(prime))
    return prime


def kappa_hat_from_rank(model, face, m_max):
    """
    ``rank <S> - 2`` for the semigroup sampled up to ``m_max``.

    The valuations are taken along the origin flag of the first chart of
    the face over the smallest prime without a weight. Sampling stops at
    the first level where the span has full rank. ``NEGATIVE_INFINITY``
    when every level is empty.
    """
    face = model.check_face(face)
    flag = GoodFlag(_unweighted_prime(model), face[0],
                    (0,) * (len(face) - 1), face[1:], face)
    ambient_rank = len(face) + 1
    span = Lattice((), ambient_rank)
    for level in range(1, m_max + 1):
        sections = GradedSmallSections(model, level, face, strict=True)
        if sections.is_trivial:
            continue
        pairs = [(level,) + w for w in _origin_image(sections, flag)]
        span = lattice_span(list(span.basis) + pairs, ambient_rank)
        if span.rank == ambient_rank:
            break
    if not span.rank:
        return NEGATIVE_INFINITY
    return span.rank - 2


def kappa_hat(model, face, m_max):
    """
    Iitaka dimension of the restricted strictly small algebra.

    ``NEGATIVE_INFINITY`` when the face lies in the stable base locus of
    levels up to ``m_max``, otherwise the dimension of the face. The value
    is cross-checked against ``kappa_hat_from_rank``; a disagreement means
    ``m_max`` is too small and is logged.
    """
    face = model.check_face(face)
    if stable_base_locus_ss(model, m_max).contains_face(face):
        kappa = NEGATIVE_INFINITY
    else:
        kappa = len(face) - 1
    ranked = kappa_hat_from_rank(model, face, m_max)
    if ranked != kappa:
        logger.warning("Iitaka dimension of face %s up to m=%d: %s from the "
                       "base locus, %s from the rank of the span.", face,
                       m_max, kappa, ranked)
    return kappa


class OkounkovBase(object):

    """Convex hull of the normalised valuation vectors ``w / m``."""

    def __init__(self, sample):
        points = [tuple(w_i / m for w_i in w) for m in sample.levels
                  for w in sample.images[m]]
        #: Sample the base was built from
        self.sample = sample
        #: Normalised points
        self.points = np.array(sorted(set(points)), dtype=float)

    @property
    def dimension(self):
        return self.points.shape[1] if len(self.points) else 0

    def volume(self):
        """Lebesgue volume of the hull, 0 when it is degenerate."""
        if not len(self.points):
            return 0.0
        if self.dimension == 1:
            return float(self.points.max() - self.points.min())
        try:
            return float(ConvexHull(self.points).volume)
        except QhullError:
            return 0.0

    def normalized_volume(self):
        """Volume with respect to the slice lattice of the semigroup."""
        index = self.sample.index
        return self.volume() / index if index else 0.0


class LevelCount(object):

    """Count of level ``m`` and its normalisation by ``m^(k+1) / (k+1)!``."""

    def __init__(self, level, count, dimension):
        #: Level
        self.level = level
        #: ``CountResult``
        self.count = count
        #: Dimension k of the face
        self.dimension = dimension

    @property
    def normalization(self):
        return (self.level ** (self.dimension + 1) /
                math.factorial(self.dimension + 1))

    @property
    def normalized_lo(self):
        return self.count.log_lo / self.normalization

    @property
    def normalized_hi(self):
        return self.count.log_hi / self.normalization

    @property
    def normalized_central(self):
        return self.count.log_central / self.normalization

    def row(self):
        return [self.level, self.count.log_lo, self.count.log_hi,
                self.normalized_lo, self.normalized_hi]

    def to_json(self):
        data = {"m": self.level, "normalized_lo": self.normalized_lo,
                "normalized_hi": self.normalized_hi,
                "normalized_central": self.normalized_central}
        data.update(self.count.as_dict())
        return data


def extrapolate(levels, values):
    """
    Fit ``c0 + c1 log(m) / m`` through the two largest levels, return
    ``c0``.
    """
    order = np.argsort(levels)
    levels = np.asarray(levels, dtype=float)[order][-2:]
    values = np.asarray(values, dtype=float)[order][-2:]
    if len(levels) < 2:
        return float(values[-1])
    system = np.column_stack([np.ones(2), np.log(levels) / levels])
    c0, _ = np.linalg.solve(system, values)
    return float(c0)


class VolumeReport(object):

    """
    Restricted volume estimate of a face.

    ``avol`` is the extrapolated value when extrapolation was requested and
    the central estimate at the largest level otherwise. ``e_hat`` agrees
    with ``avol`` whenever the Iitaka dimension equals the face dimension and
    is ``None`` when the face lies in the base locus.
    """

    def __init__(self, face, levels, kappa, extrapolated=None,
                 generation=None):
        #: Coordinate face
        self.face = tuple(face)
        #: ``LevelCount`` per sampled level, ascending
        self.levels = sorted(levels, key=lambda c: c.level)
        #: Iitaka dimension
        self.kappa = kappa
        #: Extrapolated estimate, or ``None``
        self.extrapolated = extrapolated
        #: Whether a semigroup sample generated ``Z x Z^(k+1)``, if known
        self.generation = generation

    @property
    def dimension(self):
        return len(self.face) - 1

    @property
    def raw(self):
        return self.levels[-1].normalized_central

    @property
    def interval(self):
        last = self.levels[-1]
        return last.normalized_lo, last.normalized_hi

    @property
    def avol(self):
        if self.kappa == NEGATIVE_INFINITY:
            return 0.0
        return self.raw if self.extrapolated is None else self.extrapolated

    @property
    def e_hat(self):
        if self.kappa == NEGATIVE_INFINITY:
            return None
        return self.avol

    def differences(self):
        """Successive differences of the central normalised estimates."""
        values = np.array([c.normalized_central for c in self.levels])
        return np.diff(values)

    def oscillation(self, window=3):
        """Spread of the central estimates over the last ``window`` levels."""
        values = np.array([c.normalized_central for c in
                           self.levels[-window:]])
        return float(values.max() - values.min())

    def to_json(self):
        data = {"schema_version": SCHEMA_VERSION, "face": list(self.face),
                "kappa_hat": (None if self.kappa == NEGATIVE_INFINITY
                              else self.kappa),
                "levels": [c.to_json() for c in self.levels],
                "raw": self.raw, "extrapolated": self.extrapolated,
                "avol": self.avol, "e_hat": self.e_hat,
                "interval": list(self.interval),
                "generation": self.generation,
                "differences": [float(x) for x in self.differences()],
                "oscillation": self.oscillation()}
        return data

    def save_json(self, path):
        with open(path, "w") as report_file:
            simplejson.dump(self.to_json(), report_file, sort_keys=True,
                            indent=2)

    def save_csv(self, path):
        """Write the per-level series as CSV."""
        rows = np.array([c.row() for c in self.levels], dtype=float)
        np.savetxt(path, rows, delimiter=",", header=",".join(CSV_COLUMNS),
                   comments="", fmt=["%d"] + ["%.17g"] * 4)


def _count_level(arguments):
    model, level, face = arguments
    return GradedSmallSections(model, level, face, strict=True).count()


def volume_estimate(model, face, m_range, extrapolate_estimate=False,
                    jobs=1, cache=None, progress=None):
    """
    Count the restricted strictly small sections for every level of
    ``m_range``.

    ``cache`` is any object with ``get(model, face, m)`` and
    ``put(model, face, m, count)``; ``progress`` is called with the number
    of finished levels.
    """
    face = model.check_face(face)
    m_range = sorted(set(m_range))
    if not m_range:
        raise ValueError("Need at least one level.")
    counts = {}
    missing = []
    for level in m_range:
        known = cache.get(model, face, level) if cache is not None else None
        if known is None:
            missing.append(level)
        else:
            counts[level] = known
    tasks = [(model, level, face) for level in missing]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as executor:
            results = executor.map(_count_level, tasks)
            for done, (level, result) in enumerate(zip(missing, results)):
                counts[level] = result
                if progress is not None:
                    progress(done + 1)
    else:
        for done, task in enumerate(tasks):
            counts[task[1]] = _count_level(task)
            if progress is not None:
                progress(done + 1)
    if cache is not None:
        for level in missing:
            cache.put(model, face, level, counts[level])
    dimension = len(face) - 1
    levels = [LevelCount(level, counts[level], dimension) for level in m_range
              if level > 0]
    kappa = kappa_hat(model, face, max(m_range))
    extrapolated = None
    if extrapolate_estimate and kappa != NEGATIVE_INFINITY:
        extrapolated = extrapolate([c.level for c in levels],
                                   [c.normalized_central for c in levels])
    report = VolumeReport(face, levels, kappa, extrapolated)
    logger.info("Volume estimate on face %s: raw %.6g, extrapolated %s",
                face, report.raw, extrapolated)
    return report


class KKOkResult(object):

    """Valuation count limit against the normalised volume of the base."""

    def __init__(self, count_estimate, volume, sample, kappa):
        #: ``#w(level) / m^(kappa+1)`` at the largest level
        self.count_estimate = count_estimate
        #: Normalised volume of the Okounkov base
        self.volume = volume
        #: Semigroup sample both sides come from
        self.sample = sample
        #: Iitaka dimension used for the normalisation
        self.kappa = kappa

    @property
    def relative_difference(self):
        scale = max(abs(self.count_estimate), abs(self.volume))
        if not scale:
            return 0.0
        return abs(self.count_estimate - self.volume) / scale

    def to_json(self):
        return {"count_estimate": self.count_estimate, "volume": self.volume,
                "relative_difference": self.relative_difference,
                "kappa_hat": self.kappa, "semigroup": self.sample.to_json()}


def kkok_cross_check(model, face, flag, m_range):
    """
    Compare ``#w(H_ss(m) - 0) / m^(kappa+1)`` at the largest level with the
    volume of the Okounkov base built from all levels of ``m_range``.
    """
    face = model.check_face(face)
    m_max = max(m_range)
    kappa = kappa_hat(model, face, m_max)
    if kappa == NEGATIVE_INFINITY:
        raise DomainExitError("The face lies in the stable base locus.")
    sample = build_semigroup(model, face, flag, m_max)
    level = max(sample.levels)
    count_estimate = sample.count(level) / level ** (kappa + 1)
    volume = OkounkovBase(sample).normalized_volume()
    logger.info("KKOk at m=%d: counts %.6g, base volume %.6g", level,
                count_estimate, volume)
    return KKOkResult(count_estimate, volume, sample, kappa)


def geometric_mult_estimate(model, face, m_range):
    """
    Multiplicity of the algebra spanned by restricted strictly small
    sections, from ``dim(m) ~ e m^kappa / kappa!``.

    The ratio ``dim(m) kappa! / m^kappa`` is fitted as ``c0 + c1 / m``
    through the two largest levels.
    """
    face = model.check_face(face)
    m_range = sorted(m for m in set(m_range) if m > 0)
    kappa = kappa_hat(model, face, m_range[-1])
    if kappa == NEGATIVE_INFINITY:
        raise DomainExitError("The face lies in the stable base locus.")
    ratios = [GradedSmallSections(model, m, face).dimension *
              math.factorial(kappa) / m ** kappa for m in m_range]
    if kappa == 0 or len(m_range) < 2:
        return float(ratios[-1])
    levels = np.array(m_range[-2:], dtype=float)
    system = np.column_stack([np.ones(2), 1 / levels])
    c0, _ = np.linalg.solve(system, np.array(ratios[-2:]))
    return float(c0)

