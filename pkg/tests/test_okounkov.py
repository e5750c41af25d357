# This file is part of AdelicOkounkov.
# Code licensed under the GNU General Public License v3 or later.

import math

import numpy as np
import pytest
import simplejson

from adelic_okounkov.adelic_model import GradedSmallSections
from adelic_okounkov.exceptions import DomainExitError, FaceMismatchError
from adelic_okounkov.flags_valuations import GoodFlag, valuation_image
from adelic_okounkov.okounkov import (NEGATIVE_INFINITY, OkounkovBase,
                                      build_semigroup, extrapolate,
                                      geometric_mult_estimate, kappa_hat,
                                      kappa_hat_from_rank, kkok_cross_check,
                                      level_image, volume_estimate)


class MemoryCache(object):

    def __init__(self):
        self.counts = {}
        self.stored = []

    def get(self, model, face, m):
        return self.counts.get((tuple(face), m))

    def put(self, model, face, m, count):
        self.stored.append(m)
        self.counts[(tuple(face), m)] = count


@pytest.fixture
def origin_flag():
    return GoodFlag(11, 0, (0,), (1,), (0, 1))


def test_semigroup_of_the_flagship(flagship, origin_flag):
    sample = build_semigroup(flagship, (0, 1), origin_flag, 8)
    assert sample.levels == list(range(1, 9))
    assert sample.l0 == 1
    assert sample.count(1) == 2
    # p^t < 2^m allows t = 1 from m = 4 on
    assert sample.count(4) == 2 * 5
    assert sample.rank == 3
    assert sample.generates
    assert sample.index == 1
    assert not sample.reduced
    data = sample.to_json()
    assert data["counts"]["1"] == 2
    assert data["flag"] == origin_flag.to_json()


def test_semigroup_flag_must_match_face(flagship_p2):
    flag = GoodFlag(5, 0, (0,), (1,), (0, 1))
    with pytest.raises(FaceMismatchError):
        build_semigroup(flagship_p2, (0, 2), flag, 2)


def test_origin_image_matches_enumeration(flagship):
    flag = GoodFlag(3, 0, (0,), (1,), (0, 1))
    sections = GradedSmallSections(flagship, 3, (0, 1))
    expected, _ = valuation_image(sections.sections(), flag)
    image, reduced = level_image(flagship, (0, 1), flag, 3)
    assert image == expected
    assert not reduced


def test_representatives_stay_inside_the_image(flagship):
    flag = GoodFlag(11, 0, (1,), (1,), (0, 1))
    sections = GradedSmallSections(flagship, 2, (0, 1))
    expected, _ = valuation_image(sections.sections(), flag)
    image, reduced = level_image(flagship, (0, 1), flag, 2, exact_limit=0)
    assert reduced
    assert image
    assert image <= expected


def test_empty_levels_of_a_base_locus_face(negative_vertex):
    flag = GoodFlag(11, 0, (), (), (0,))
    sample = build_semigroup(negative_vertex, (0,), flag, 4)
    assert sample.is_empty
    assert sample.l0 is None
    assert sample.index == 0


def test_kappa_hat(flagship, flagship_p2, negative_vertex, max_family,
                   caplog):
    assert kappa_hat(flagship, (0, 1), 8) == 1
    assert kappa_hat(flagship_p2, (0,), 4) == 0
    assert kappa_hat(flagship_p2, (0, 1, 2), 4) == 2
    assert kappa_hat(negative_vertex, (0,), 8) == NEGATIVE_INFINITY
    assert kappa_hat(max_family, (0,), 6) == NEGATIVE_INFINITY
    assert "rank of the span" not in caplog.text


def test_kappa_hat_from_rank(positive, flagship, negative_vertex,
                             weighted_at_three):
    # the edge of P^2 spans a rank 3 lattice
    assert kappa_hat_from_rank(positive, (0, 1), 8) == 1
    assert kappa_hat(positive, (0, 1), 8) == 1
    assert kappa_hat_from_rank(positive, (0, 1, 2), 8) == 2
    assert kappa_hat_from_rank(flagship, (1,), 4) == 0
    assert kappa_hat_from_rank(negative_vertex, (0,), 8) == \
        NEGATIVE_INFINITY
    assert kappa_hat_from_rank(weighted_at_three, (0, 1), 4) == 1


def test_kappa_hat_logs_a_rank_disagreement(flagship, caplog):
    # level 1 alone only reaches rank 2
    assert kappa_hat_from_rank(flagship, (0, 1), 1) == 0
    assert kappa_hat(flagship, (0, 1), 1) == 1
    assert "rank of the span" in caplog.text


def test_okounkov_base(flagship, origin_flag):
    base = OkounkovBase(build_semigroup(flagship, (0, 1), origin_flag, 8))
    assert base.dimension == 2
    assert base.volume() > 0
    assert base.normalized_volume() == pytest.approx(base.volume())


def test_extrapolation_recovers_the_limit():
    levels = [8, 16, 32]
    values = [1.5 + 0.7 * math.log(m) / m for m in levels]
    assert extrapolate(levels, values) == pytest.approx(1.5)
    assert extrapolate([4], [2.0]) == 2.0


def test_volume_of_the_flagship(flagship):
    report = volume_estimate(flagship, (0, 1), [32, 64],
                             extrapolate_estimate=True)
    assert report.kappa == 1
    assert report.avol == pytest.approx(2 * math.log(2), rel=0.15)
    assert report.e_hat == report.avol
    assert report.raw < report.avol


def test_volume_of_the_plane(flagship_p2):
    report = volume_estimate(flagship_p2, (0, 1, 2), [12, 24],
                             extrapolate_estimate=True)
    assert report.avol == pytest.approx(3 * math.log(2), rel=0.25)


def test_volume_of_an_edge(flagship_p2):
    report = volume_estimate(flagship_p2, (0, 1), [12, 24],
                             extrapolate_estimate=True)
    assert report.avol == pytest.approx(2 * math.log(2), rel=0.2)


def test_volume_of_a_base_locus_face(negative_vertex):
    report = volume_estimate(negative_vertex, (0,), [2, 4])
    assert report.kappa == NEGATIVE_INFINITY
    assert report.avol == 0.0
    assert report.e_hat is None
    assert report.to_json()["kappa_hat"] is None


def test_single_level_count(flagship):
    report = volume_estimate(flagship, (0, 1), [1])
    # five strictly small sections, normalised by 1/2
    assert report.raw == pytest.approx(2 * math.log(5))
    assert report.interval == (report.raw, report.raw)


def test_volume_report_files(flagship, tmp_path):
    report = volume_estimate(flagship, (0, 1), [4, 8, 12])
    report.save_json(str(tmp_path / "avol.json"))
    report.save_csv(str(tmp_path / "avol.csv"))
    with open(str(tmp_path / "avol.json")) as report_file:
        data = simplejson.load(report_file)
    assert data["schema_version"] == 1
    assert [level["m"] for level in data["levels"]] == [4, 8, 12]
    assert len(data["differences"]) == 2
    rows = np.loadtxt(str(tmp_path / "avol.csv"), delimiter=",", skiprows=1)
    assert rows.shape == (3, 5)
    assert list(rows[:, 0]) == [4, 8, 12]
    with open(str(tmp_path / "avol.csv")) as csv_file:
        assert csv_file.readline().strip() == \
            "m,count_lo,count_hi,normalized_lo,normalized_hi"


def test_parallel_counts_are_deterministic(flagship_p2):
    serial = volume_estimate(flagship_p2, (0, 1, 2), [2, 3, 4])
    parallel = volume_estimate(flagship_p2, (0, 1, 2), [2, 3, 4], jobs=2)
    assert simplejson.dumps(serial.to_json(), sort_keys=True) == \
        simplejson.dumps(parallel.to_json(), sort_keys=True)


def test_cache_is_used(flagship):
    cache = MemoryCache()
    finished = []
    first = volume_estimate(flagship, (0, 1), [2, 4], cache=cache,
                            progress=finished.append)
    assert cache.stored == [2, 4]
    assert finished == [1, 2]
    second = volume_estimate(flagship, (0, 1), [2, 4, 6], cache=cache)
    assert cache.stored == [2, 4, 6]
    assert second.levels[1].count.count == first.levels[1].count.count


def test_volume_estimate_needs_a_level(flagship):
    with pytest.raises(ValueError):
        volume_estimate(flagship, (0, 1), [])


def test_kkok_cross_check(flagship, origin_flag):
    result = kkok_cross_check(flagship, (0, 1), origin_flag, range(1, 41))
    assert result.kappa == 1
    assert result.relative_difference < 0.15
    assert result.to_json()["semigroup"]["generates"]


def test_kkok_on_a_base_locus_face(negative_vertex):
    flag = GoodFlag(11, 0, (), (), (0,))
    with pytest.raises(DomainExitError):
        kkok_cross_check(negative_vertex, (0,), flag, [1, 2])


def test_geometric_multiplicity(flagship, negative_vertex):
    assert geometric_mult_estimate(flagship, (0, 1), [4, 8]) == \
        pytest.approx(1.0)
    with pytest.raises(DomainExitError):
        geometric_mult_estimate(negative_vertex, (0,), [2, 4])
