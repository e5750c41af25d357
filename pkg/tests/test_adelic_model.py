# This file is part of AdelicOkounkov.
# Code licensed under the GNU General Public License v3 or later.

from fractions import Fraction
import glob
import math
import os
import random

import pytest

from adelic_okounkov.adelic_model import (INFINITY, NEF, NOT_NEF,
                                          UNDETERMINED, DiagonalModel, Place,
                                          Section, GradedSmallSections,
                                          adeg_diagonal_nef, all_faces,
                                          augmented_base_locus, delta_upper,
                                          face_label, height, is_nef,
                                          is_w_ample, norm,
                                          positive_part_integral,
                                          restrict_to_face,
                                          stable_base_locus_s,
                                          stable_base_locus_ss,
                                          vertical_degree_identity,
                                          zhang_moriwaki_check)
from adelic_okounkov.exceptions import (DegreeError, InadmissibleSectionError,
                                        InvalidFaceError, ModelFormatError,
                                        NonConcaveWeightError, NotNefError,
                                        VerificationError)
from adelic_okounkov.log_linear import LogLinear

from conftest import MODEL_DIRECTORY, model_path

LOG2 = math.log(2)


def _valid_model_files():
    return sorted(path for path in glob.glob(os.path.join(MODEL_DIRECTORY,
                                                          "*.json"))
                  if "non_concave" not in path)


@pytest.mark.parametrize("path", _valid_model_files())
def test_model_files_survive_a_round_trip(path):
    model = DiagonalModel.load(path)
    again = DiagonalModel.loads(model.dumps())
    assert again == model
    assert again.digest() == model.digest()


def test_flagship_model(flagship):
    assert (flagship.dim, flagship.degree) == (1, 1)
    assert flagship.places == [INFINITY]
    assert flagship.phi(INFINITY, (Fraction(1, 3),)) == LogLinear.log_of(2)
    assert flagship.exponent(INFINITY, (3, 2), 5) == 5
    assert flagship.radius((1, 0), 1) == 2


def test_non_concave_weights_are_rejected():
    with pytest.raises(NonConcaveWeightError) as error:
        DiagonalModel.load(model_path("non_concave_p1"))
    assert "weights must be min-of-affines" in str(error.value)


def test_malformed_json_reports_its_position():
    with pytest.raises(ModelFormatError) as error:
        DiagonalModel.loads('{"dim": 1,\n "degree": }')
    assert error.value.line == 2


@pytest.mark.parametrize("data, field", [
    ({"degree": 1}, "dim"),
    ({"dim": 1, "degree": "one"}, "degree"),
    ({"dim": 1, "degree": 1, "places": {}}, "places"),
    ({"dim": 1, "degree": 1, "places": [{"place": "inf", "affine_pieces": [
        {"gradient": ["0"], "offset": "lg(2)"}]}]},
     "places[0].affine_pieces[0].offset"),
    ({"dim": 1, "degree": 1, "max_family": {"inf": 2}}, "max_family.inf"),
    ({"dim": 1, "degree": 1, "max_family": {"6": ["1", "1"]}},
     "max_family.6"),
    ({"dim": 1, "degree": 1, "max_family": {"inf": ["1", "x"]}},
     "max_family.inf"),
])
def test_format_errors_name_the_field(data, field):
    with pytest.raises(ModelFormatError) as error:
        DiagonalModel.from_json(data)
    assert error.value.field == field


def test_max_family_must_match_the_weights(flagship):
    data = flagship.to_json()
    data["max_family"] = {"inf": ["3", "3"]}
    with pytest.raises(ModelFormatError):
        DiagonalModel.from_json(data)


def test_zero_weights_are_dropped():
    model = DiagonalModel.from_json({"dim": 1, "degree": 2, "places": [
        {"place": 5, "affine_pieces": [{"gradient": ["0"], "offset": "0"}]}]})
    assert model.places == []


def test_places():
    assert Place.parse("inf") == INFINITY
    assert Place(3) < Place(5)
    assert INFINITY < Place(2)
    assert Place(3).absolute_value(Fraction(9, 2)) == Fraction(1, 9)
    with pytest.raises(ModelFormatError):
        Place(6)


def test_monomials_are_lexicographically_decreasing(flagship, flagship_p2):
    assert flagship.monomials(2) == [(2, 0), (1, 1), (0, 2)]
    assert flagship_p2.monomials(1, (1, 2)) == [(0, 1, 0), (0, 0, 1)]
    with pytest.raises(InvalidFaceError):
        flagship.monomials(1, (0, 2))


def test_strictly_small_counts(flagship):
    assert GradedSmallSections(flagship, 1, None).count().count == 5
    assert GradedSmallSections(flagship, 2, None).count().count == 63
    small = GradedSmallSections(flagship, 1, None, strict=False)
    assert small.count().count == 13


def test_sections_and_norms(flagship):
    sections = GradedSmallSections(flagship, 1, None)
    assert len(list(sections.sections())) == 5
    x0 = Section.monomial(1, (1, 0))
    assert sections.contains_section(x0)
    assert not sections.contains_section(Section.monomial(1, (1, 0), 2))
    assert not sections.contains_section(Section.monomial(1, (1, 0),
                                                          Fraction(1, 2)))
    assert norm(flagship, x0, INFINITY) == Fraction(1, 2)
    assert norm(flagship, Section(1, {(1, 0): 1, (0, 1): -1}),
                INFINITY) == 1
    with pytest.raises(InadmissibleSectionError):
        norm(flagship, Section.monomial(1, (2, 0)), INFINITY)


def test_finite_place_admits_denominators(weighted_at_three):
    sections = GradedSmallSections(weighted_at_three, 1, None)
    assert sections.scales == (Fraction(1, 3), Fraction(1, 3))
    assert sections.count().count == 13
    third = Section.monomial(1, (1, 0), Fraction(1, 3))
    assert sections.contains_section(third)
    assert norm(weighted_at_three, third, Place(3)) == 1
    assert norm(weighted_at_three, third, INFINITY) == Fraction(1, 3)


def test_restriction_to_a_face(flagship_p2):
    image, hull = restrict_to_face(flagship_p2, 2, (0, 1))
    assert image.monomials == ((2, 0, 0), (1, 1, 0), (0, 2, 0))
    assert hull.elements() == image.cl_subset.elements()
    assert Section(2, {(2, 0, 0): 1, (0, 1, 1): 1}).restrict((0, 1)) == \
        Section.monomial(2, (2, 0, 0))


def test_twists_scaling_and_sums(flagship, log3_model):
    assert flagship.twist_infinity(0) is flagship
    twisted = flagship.twist_infinity(Fraction(1, 10))
    assert twisted.phi(INFINITY, (0,)) == LogLinear.log_of(2) + Fraction(1,
                                                                         10)
    double = flagship.scale(2)
    assert double.degree == 2
    assert (GradedSmallSections(double, 3, None).radii ==
            GradedSmallSections(flagship, 6, None).radii)
    total = flagship.add(log3_model)
    assert total.degree == 2
    assert total.phi(INFINITY, (1,)) == LogLinear.log_of(6)
    with pytest.raises(DegreeError):
        flagship.scale(0)


def test_tent_sum_is_a_sup_convolution(tent, flagship):
    total = tent.add(flagship)
    assert total.degree == 4
    # peak of the tent plus log 2
    assert total.Phi((Fraction(5, 2),)) == (LogLinear(Fraction(6, 5)) +
                                            LogLinear.log_of(2))


def test_base_locus_of_the_max_family(max_family):
    locus = stable_base_locus_ss(max_family, 10)
    assert locus.components == ((0,),)
    assert locus.labels() == ["(1:0:0)"]
    assert locus.stabilized
    assert is_w_ample(max_family, 10) == (False, None)
    assert augmented_base_locus(max_family, 10).contains_face((0,))
    assert stable_base_locus_s(max_family, 10).contains_face((0,))


def test_generation_of_a_positive_model(positive):
    report = zhang_moriwaki_check(positive, 20)
    assert report.base_locus.is_empty
    assert report.onset == 4
    assert all(report.generation[m] for m in range(4, 21))
    assert not any(report.generation[m] for m in range(1, 4))
    assert not report.counterexample


def test_generation_fails_with_a_negative_vertex(negative_vertex):
    report = zhang_moriwaki_check(negative_vertex, 20)
    assert report.base_locus.contains_face((0,))
    assert report.onset is None
    assert not any(report.generation[m] for m in range(1, 21))


def test_nef_verdicts(flagship, max_family, positive):
    assert is_nef(flagship) == NEF
    verdict = is_nef(max_family)
    assert verdict == NOT_NEF
    assert height(max_family, verdict.witness).sign() < 0
    assert is_nef(positive) == UNDETERMINED


def test_heights(flagship, max_family):
    assert height(flagship, (1, 0)) == LogLinear.log_of(2)
    assert height(flagship, (Fraction(1, 3), Fraction(2, 3))) == \
        LogLinear.log_of(4)
    assert height(max_family, (1, 0, 0)) == -LogLinear.log_of(2)


def test_arithmetic_degrees(flagship, flagship_p2, positive):
    assert positive_part_integral(flagship) == pytest.approx(2 * LOG2)
    assert positive_part_integral(flagship_p2) == pytest.approx(3 * LOG2)
    assert positive_part_integral(flagship_p2, (0, 1)) == pytest.approx(
        2 * LOG2)
    assert adeg_diagonal_nef(flagship) == pytest.approx(2 * LOG2)
    with pytest.raises(NotNefError):
        adeg_diagonal_nef(positive)
    assert adeg_diagonal_nef(positive, allow_undetermined=True) == \
        pytest.approx(0.6)
    assert delta_upper(flagship) == pytest.approx(2 * LOG2)


def test_vertical_degree_identity(flagship):
    left, right = vertical_degree_identity(flagship, 5)
    assert left == pytest.approx(math.log(5))
    assert right == pytest.approx(math.log(5))
    plane = DiagonalModel.from_max_family(2, 2, {INFINITY: [2, 2, 2]})
    left, right = vertical_degree_identity(plane, 3)
    assert left == pytest.approx(4 * math.log(3))
    assert right == pytest.approx(4 * math.log(3))
    assert vertical_degree_identity(DiagonalModel(1, 0), 7) == (0.0, 0.0)


def test_vertical_degree_identity_needs_a_nef_model(positive, max_family,
                                                    negative_vertex):
    with pytest.raises(NotNefError):
        vertical_degree_identity(max_family, 3)
    with pytest.raises(NotNefError):
        vertical_degree_identity(positive, 3)
    left, right = vertical_degree_identity(positive, 3,
                                           allow_undetermined=True)
    assert left == pytest.approx(right)
    # a negative region breaks the identity
    with pytest.raises(VerificationError):
        vertical_degree_identity(negative_vertex, 3, allow_undetermined=True)


def _random_section(rng, model, level, terms=4):
    monomials = model.monomials(level)
    support = rng.sample(monomials, min(terms, len(monomials)))
    return Section(level, {alpha: Fraction(rng.randint(-9, 9),
                                           rng.randint(1, 9))
                           for alpha in support})


def test_norms_are_submultiplicative(tent, weighted_at_three, max_family):
    rng = random.Random(3)
    for model in (tent, weighted_at_three, max_family):
        for _ in range(40):
            s = _random_section(rng, model, rng.randint(1, 3))
            t = _random_section(rng, model, rng.randint(1, 3))
            for place in (INFINITY, Place(3), Place(5)):
                assert norm(model, s * t, place) <= \
                    norm(model, s, place) * norm(model, t, place)


def test_height_does_not_depend_on_the_chart(flagship, max_family):
    rng = random.Random(5)
    for model in (flagship, max_family):
        for _ in range(30):
            point = [rng.choice([-1, 1]) * rng.randint(1, 30)
                     for _ in range(model.dim + 1)]
            values = [height(model, point, chart=j)
                      for j in range(model.dim + 1)]
            assert all(value == values[0] for value in values)


@pytest.mark.parametrize("name, levels", [
    ("flagship_p1", (1, 2, 3)), ("tent_p1", (1, 2))])
def test_twists_only_add_small_sections(name, levels):
    model = DiagonalModel.load(model_path(name))
    larger = [model.twist_infinity(Fraction(1, 10)),
              model.twist_finite(5, 1)]
    for level in levels:
        sections = GradedSmallSections(model, level, None)
        for twisted in larger:
            bigger = GradedSmallSections(twisted, level, None)
            assert all(bigger.contains_section(s)
                       for s in sections.sections())


def test_small_sections_form_finite_lattice_sets(flagship, tent,
                                                 weighted_at_three):
    for model in (flagship, tent, weighted_at_three):
        for level in (1, 2):
            small = GradedSmallSections(model, level, None, strict=False)
            strict = GradedSmallSections(model, level, None, strict=True)
            # admissible coefficients form a full-rank lattice
            assert len(small.monomials) == math.comb(
                level * model.degree + model.dim, model.dim)
            assert small.cl_subset.lattice.rank == len(small.monomials)
            assert small.body.bounded
            assert strict.count().count <= small.count().count
            assert all(small.contains_section(s) for s in strict.sections())


def test_faces():
    assert len(all_faces(2)) == 7
    assert face_label((0,), 2) == "(1:0:0)"
    assert face_label((1, 2), 2) == "{x0=0}"
    assert face_label((2,), 3) == "(0:0:1:0)"
    assert face_label((0, 1, 2), 2) == "P^2"
