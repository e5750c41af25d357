# This file is part of AdelicOkounkov.
# Code licensed under the GNU General Public License v3 or later.

from fractions import Fraction
import math
import random

import pytest
import simplejson

from adelic_okounkov.adelic_model import DiagonalModel, face_label
from adelic_okounkov.exceptions import (AsymmetricSetError, BadPrimeError,
                                        DomainExitError,
                                        InfeasibleGridError, NotNefError,
                                        NotSurjectiveError,
                                        VerificationError)
from adelic_okounkov.flags_valuations import GoodFlag, find_good_flag
from adelic_okounkov.lattice_core import ConvexBody, CountResult, Lattice
from adelic_okounkov.okounkov import NEGATIVE_INFINITY
from adelic_okounkov import verify
from adelic_okounkov.verify import (Certificate, check_baselocus_duality,
                                    check_brunn_minkowski,
                                    check_continuity, check_counting_lemma,
                                    check_dilation_lemma, check_homogeneity,
                                    check_kkok, check_nef_equality,
                                    check_prop_yuan, check_w_ample_openness,
                                    check_yuan_theorem, check_zhang_moriwaki,
                                    exit_status, fujita_lower_bound,
                                    interval_slack,
                                    random_counting_instance,
                                    random_dilation_instance)

CROSS = {(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)}


def test_counting_lemma_on_a_cross():
    certificate = check_counting_lemma([[1, 0]], CROSS)
    assert certificate.status == verify.PASS
    counts = certificate.constants["counts"]
    assert counts == {"set": 5, "image": 3, "doubled": 13, "kernel": 3,
                      "kernel_doubled": 5}
    assert certificate.lhs == [5, 9]
    assert certificate.rhs == [15, 13]


def test_counting_lemma_rejects_bad_input():
    with pytest.raises(AsymmetricSetError):
        check_counting_lemma([[1, 0]], {(1, 0)})
    with pytest.raises(NotSurjectiveError):
        check_counting_lemma([[2, 0]], CROSS)
    with pytest.raises(VerificationError):
        check_counting_lemma([[1, 0, 0]], CROSS)
    with pytest.raises(VerificationError):
        check_counting_lemma([[1, 0]], set())


def test_random_counting_instances():
    rng = random.Random(0)
    for _ in range(100):
        matrix, points = random_counting_instance(rng)
        assert check_counting_lemma(matrix, points).status == verify.PASS


def test_dilation_lemma_on_a_segment():
    body = ConvexBody([(1,), (-1,)])
    certificate = check_dilation_lemma(Lattice.standard(1), body, 2)
    assert certificate.status == verify.PASS
    assert certificate.constants["small"] == 3
    assert certificate.constants["large"] == 5
    assert certificate.constants["multiplier"] == 4


def test_random_dilation_instances():
    rng = random.Random(0)
    for _ in range(100):
        lattice, body, factor = random_dilation_instance(rng)
        assert check_dilation_lemma(lattice, body, factor).status == \
            verify.PASS


@pytest.mark.parametrize("prime", [11, 13, 17, 19])
def test_yuan_theorem_at_low_levels(flagship, prime):
    flag = find_good_flag(flagship, (0, 1), None, prime)
    for level in range(1, 7):
        certificate = check_yuan_theorem(flagship, (0, 1), flag, level)
        assert certificate.status in (verify.PASS, verify.VACUOUS)
        assert certificate.passed
        assert certificate.constants["delta_substitution"]


def test_yuan_theorem_at_a_higher_level(flagship):
    flag = find_good_flag(flagship, (0, 1), None, 11)
    certificate = check_yuan_theorem(flagship, (0, 1), flag, 16)
    assert certificate.passed
    assert certificate.witness["slack"] >= 0


def test_yuan_theorem_needs_sections(negative_vertex):
    flag = GoodFlag(11, 0, (), (), (0,))
    with pytest.raises(VerificationError):
        check_yuan_theorem(negative_vertex, (0,), flag, 1)


def test_yuan_theorem_rejects_weighted_primes(weighted_at_three):
    flag = GoodFlag(3, 0, (0,), (1,), (0, 1))
    with pytest.raises(BadPrimeError):
        check_yuan_theorem(weighted_at_three, (0, 1), flag, 1)


def test_prop_yuan(flagship):
    flag = find_good_flag(flagship, (0, 1), None, 11)
    certificate = check_prop_yuan(flagship, (0, 1), flag, [8, 16])
    assert certificate.status == verify.PASS
    assert certificate.constants["kappa_hat"] == 1
    assert certificate.constants["series"]["m"] == [8, 16]


def test_interval_slack_uses_the_far_end():
    count = CountResult(None, 1.0, 5.0, 2.0, method="interval")
    assert interval_slack(count, 2) == 1.5
    assert interval_slack(CountResult(9), 4) == 0


def test_prop_yuan_on_a_base_locus_face(negative_vertex):
    flag = GoodFlag(11, 0, (), (), (0,))
    certificate = check_prop_yuan(negative_vertex, (0,), flag, [2, 4])
    assert certificate.status == verify.VACUOUS


def test_brunn_minkowski(flagship, log3_model):
    certificate = check_brunn_minkowski(flagship, log3_model, (0, 1),
                                        [24, 48])
    assert certificate.status == verify.PASS
    terms = certificate.constants["terms"]
    assert terms["L"]["index"] == 1
    assert terms["L+M"]["generates"]


def test_brunn_minkowski_base_locus_exit(negative_vertex):
    with pytest.raises(DomainExitError):
        check_brunn_minkowski(negative_vertex, negative_vertex, (0,),
                              [2, 4])


def test_continuity(flagship):
    lambdas = [Fraction(-1, 10), Fraction(-1, 20), Fraction(1, 20),
               Fraction(1, 10)]
    certificate = check_continuity(flagship, (0, 1), lambdas, [16, 32])
    assert certificate.status == verify.PASS
    assert len(certificate.lhs) == 4
    assert certificate.witness["domain_exits"] == []
    assert certificate.constants["sandwich_constant"] == \
        pytest.approx(1 / math.log(2))


def test_continuity_reports_domain_exits(flagship):
    certificate = check_continuity(flagship, (0, 1), [-1, Fraction(1, 20)],
                                   [8, 16])
    assert certificate.witness["domain_exits"] == ["-1/1"]
    assert len(certificate.lhs) == 1


def test_nef_equality(flagship):
    certificate = check_nef_equality(flagship, (0, 1), [32, 64])
    assert certificate.status == verify.PASS
    assert certificate.constants["oracle"] == pytest.approx(2 * math.log(2))


def test_nef_equality_needs_a_nef_model(positive, max_family):
    with pytest.raises(NotNefError):
        check_nef_equality(positive, (0, 1, 2), [2, 4])
    with pytest.raises(NotNefError):
        check_nef_equality(max_family, (0, 1, 2), [2, 4],
                           allow_undetermined=True)


def test_fujita_bound_of_the_tent(tent):
    certificate = fujita_lower_bound(tent, (0, 1), [16, 32])
    assert certificate.status == verify.PASS
    assert certificate.witness["gap"] > 0
    assert certificate.witness["below_interval"]
    assert certificate.constants["positive_part_integral"] == \
        pytest.approx(2.88)


def test_fujita_bound_of_a_nef_model(flagship):
    certificate = fujita_lower_bound(flagship, (0, 1), [32, 64])
    assert certificate.status == verify.PASS
    assert certificate.constants["bound"] == \
        pytest.approx(2 * math.log(2), rel=1e-6)
    assert certificate.constants["avol"] == \
        pytest.approx(certificate.constants["bound"], rel=0.15)


def test_fujita_grid_limits(flagship_p2):
    with pytest.raises(InfeasibleGridError):
        fujita_lower_bound(flagship_p2, (0, 1, 2), [2, 4], steps=30)
    with pytest.raises(InfeasibleGridError):
        fujita_lower_bound(DiagonalModel(1, 0), (0, 1), [2, 4])


def test_baselocus_duality(duality_suite):
    for model in duality_suite:
        certificate = check_baselocus_duality(model)
        assert certificate.status == verify.PASS, certificate.witness


def test_baselocus_duality_reads_the_volume_side(max_family):
    certificate = check_baselocus_duality(max_family)
    faces = certificate.witness["faces"]
    point = faces.index(face_label((0,), 2))
    assert certificate.lhs[point]
    assert certificate.witness["kappa_from_rank"][point] is None
    assert certificate.witness["interval_upper"][point] == 0.0
    edge = faces.index(face_label((0, 1), 2))
    assert not certificate.lhs[edge]
    assert certificate.witness["kappa_from_rank"][edge] == 1
    assert certificate.witness["interval_upper"][edge] > 0


def test_baselocus_duality_fails_on_a_null_volume(flagship, monkeypatch):
    monkeypatch.setattr(verify, "kappa_hat_from_rank",
                        lambda model, face, m_max: NEGATIVE_INFINITY)
    certificate = check_baselocus_duality(flagship)
    assert certificate.status == verify.FAIL
    assert not any(certificate.lhs)
    assert all(certificate.rhs)


def test_baselocus_duality_fails_on_a_positive_volume(negative_vertex,
                                                      monkeypatch):
    class Positive(object):
        interval = (1.0, 1.0)

    monkeypatch.setattr(verify, "kappa_hat_from_rank",
                        lambda model, face, m_max: len(face) - 1)
    monkeypatch.setattr(verify, "volume_estimate",
                        lambda model, face, levels: Positive())
    certificate = check_baselocus_duality(negative_vertex)
    assert certificate.status == verify.FAIL
    assert certificate.witness["failing"]


def test_homogeneity(flagship, tent):
    for model in (flagship, tent):
        certificate = check_homogeneity(model, (0, 1), m_max=6)
        assert certificate.status == verify.PASS
        assert len(certificate.lhs) == 12


def test_kkok(flagship):
    flag = find_good_flag(flagship, (0, 1), None, 11)
    certificate = check_kkok(flagship, (0, 1), flag, range(1, 41))
    assert certificate.status == verify.PASS


def test_w_ample_openness(positive, max_family):
    certificate = check_w_ample_openness(positive)
    assert certificate.status == verify.PASS
    assert certificate.constants["lambda_hat"] > 0
    assert check_w_ample_openness(max_family).status == verify.VACUOUS


def test_zhang_moriwaki(positive, negative_vertex):
    assert check_zhang_moriwaki(positive).status == verify.PASS
    certificate = check_zhang_moriwaki(negative_vertex)
    assert certificate.status == verify.PASS
    assert certificate.lhs == [False]


def test_certificate_round_trip(flagship):
    certificate = check_homogeneity(flagship, (0, 1), m_max=3)
    data = simplejson.loads(certificate.dumps())
    assert data["pass"]
    restored = Certificate.from_json(data)
    assert restored.status == certificate.status
    assert restored.inputs_digest == certificate.inputs_digest
    assert restored.reevaluate()


def test_certificate_digest_detects_tampering(flagship):
    data = simplejson.loads(check_homogeneity(flagship, (0, 1),
                                              m_max=3).dumps())
    data["inputs"]["m_max"] = 4
    with pytest.raises(VerificationError):
        Certificate.from_json(data)


def test_certificate_fractions_survive_json():
    certificate = Certificate("demo", {"x": Fraction(1, 3)},
                              [Fraction(1, 3)], [Fraction(1, 2)], "<")
    restored = Certificate.from_json(simplejson.loads(certificate.dumps()))
    assert restored.lhs == [Fraction(1, 3)]
    assert restored.status == verify.PASS


def test_failing_certificate():
    certificate = Certificate("demo", {}, [2, 1], [1, 1], "<=")
    assert certificate.status == verify.FAIL
    assert certificate.witness["failing"] == [0]
    assert not certificate.passed


def test_certificate_validation():
    with pytest.raises(VerificationError):
        Certificate("demo", {}, [1], [1, 2], "<=")
    with pytest.raises(VerificationError):
        Certificate("demo", {}, [1], [1], "~")


def test_exit_status(caplog):
    passing = Certificate("demo", {}, [1], [2], "<=")
    failing = Certificate("demo", {}, [3], [2], "<=")
    open_ = Certificate("demo", {}, [3], [2], "<=",
                        status=verify.INCONCLUSIVE)
    assert exit_status([passing]) == 0
    assert exit_status([passing, failing]) == 1
    assert exit_status([passing, open_]) == 0
    assert "inconclusive" in caplog.text
