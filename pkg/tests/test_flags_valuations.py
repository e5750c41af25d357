# This file is part of AdelicOkounkov.
# Code licensed under the GNU General Public License v3 or later.

import random

import pytest

from adelic_okounkov.adelic_model import Section
from adelic_okounkov.exceptions import (BadPrimeError, FaceMismatchError,
                                        ZeroSectionError)
from adelic_okounkov.flags_valuations import (GoodFlag, find_good_flag,
                                              valuation_image,
                                              valuation_vector)


def test_first_flag_is_centered_at_origin(flagship):
    flag = find_good_flag(flagship, (0, 1), None, 11)
    assert flag.chart == 0
    assert flag.center == (0,)
    assert flag.order == (1,)
    assert flag.is_centered_at_origin


def test_flag_avoids_a_section(flagship):
    flag = find_good_flag(flagship, (0, 1), Section.monomial(1, (0, 1)), 11)
    assert flag.center == (1,)
    assert not flag.is_centered_at_origin


def test_no_flag_when_section_vanishes_on_face(flagship_p2):
    avoid = Section.monomial(1, (0, 0, 1))
    assert find_good_flag(flagship_p2, (0, 1), avoid, 5) is None


def test_no_flag_when_every_point_is_a_zero(flagship):
    # x0 x1 (x0 + x1) vanishes on all of P^1(F_2)
    avoid = Section(3, {(2, 1): 1, (1, 2): 1})
    assert find_good_flag(flagship, (0, 1), avoid, 2) is None
    assert find_good_flag(flagship, (0, 1), avoid, 3) is not None


@pytest.mark.parametrize("prime", [1, 12, 15])
def test_composite_primes_are_rejected(flagship, prime):
    with pytest.raises(BadPrimeError):
        find_good_flag(flagship, (0, 1), None, prime)


def test_weighted_primes_are_rejected(weighted_at_three):
    with pytest.raises(BadPrimeError):
        find_good_flag(weighted_at_three, (0, 1), None, 3)
    flag = GoodFlag(3, 0, (0,), (1,), (0, 1))
    with pytest.raises(BadPrimeError):
        flag.check_model(weighted_at_three)


def test_flag_construction_is_checked():
    with pytest.raises(FaceMismatchError):
        GoodFlag(5, 2, (0,), (1,), (0, 1))
    with pytest.raises(FaceMismatchError):
        GoodFlag(5, 0, (0,), (2,), (0, 1))
    with pytest.raises(FaceMismatchError):
        GoodFlag(5, 0, (0, 0), (1,), (0, 1))


def test_flag_json_round_trip():
    flag = GoodFlag(7, 1, (3, 9), (2, 0), (0, 1, 2))
    assert flag.center == (3, 2)
    assert GoodFlag.from_json(flag.to_json(), (0, 1, 2)) == flag


@pytest.mark.parametrize("level, coefficients, expected", [
    (1, {(1, 0): 11, (0, 1): 22}, (1, 0)),
    (1, {(0, 1): 1}, (0, 1)),
    (2, {(1, 1): 121}, (2, 1)),
    (2, {(0, 2): 1, (1, 1): 3}, (0, 1)),
    (1, {(1, 0): 1, (0, 1): 11}, (0, 0)),
])
def test_valuation_at_the_origin(level, coefficients, expected):
    flag = GoodFlag(11, 0, (0,), (1,), (0, 1))
    assert valuation_vector(Section(level, coefficients), flag) == expected


def test_valuation_at_a_translated_centre():
    flag = GoodFlag(11, 0, (1,), (1,), (0, 1))
    section = Section(1, {(0, 1): 1, (1, 0): -1})
    assert valuation_vector(section, flag) == (0, 1)
    assert valuation_vector(Section.monomial(1, (0, 1)), flag) == (0, 0)


def test_valuation_follows_the_order():
    section = Section(1, {(0, 1, 0): 1, (0, 0, 1): 1})
    first = GoodFlag(5, 0, (0, 0), (1, 2), (0, 1, 2))
    second = GoodFlag(5, 0, (0, 0), (2, 1), (0, 1, 2))
    assert valuation_vector(section, first) == (0, 0, 1)
    assert valuation_vector(section, second) == (0, 0, 1)
    assert valuation_vector(Section.monomial(1, (0, 1, 0)), first) == \
        (0, 1, 0)
    assert valuation_vector(Section.monomial(1, (0, 1, 0)), second) == \
        (0, 0, 1)


def test_valuation_on_a_point_face():
    flag = GoodFlag(3, 1, (), (), (1,))
    assert valuation_vector(Section.monomial(2, (0, 2), 18), flag) == (2,)


def test_valuation_errors():
    flag = GoodFlag(5, 0, (0,), (1,), (0, 1))
    with pytest.raises(ZeroSectionError):
        valuation_vector(Section(1, {}), flag)
    with pytest.raises(FaceMismatchError):
        valuation_vector(Section.monomial(1, (0, 0, 1)), flag)


def test_valuation_image_skips_zero_sections():
    flag = GoodFlag(11, 0, (0,), (1,), (0, 1))
    sections = [Section.monomial(1, (1, 0)), Section.monomial(1, (1, 0), 2),
                Section.monomial(1, (0, 1)), Section(1, {})]
    image, count = valuation_image(sections, flag)
    assert image == {(0, 0), (0, 1)}
    assert count == 2


def _random_section(rng, level):
    coefficients = {}
    for a in range(level + 1):
        for b in range(level + 1 - a):
            coefficients[(a, b, level - a - b)] = \
                rng.choice([0, 1, 5]) * rng.randint(-6, 6)
    return Section(level, coefficients)


def test_valuation_is_multiplicative():
    flag = GoodFlag(5, 0, (1, 2), (1, 2), (0, 1, 2))
    rng = random.Random(7)
    checked = 0
    while checked < 25:
        f = _random_section(rng, rng.randint(1, 2))
        g = _random_section(rng, rng.randint(1, 2))
        if f.is_zero or g.is_zero:
            continue
        expected = tuple(a + b for a, b in zip(valuation_vector(f, flag),
                                               valuation_vector(g, flag)))
        assert valuation_vector(f * g, flag) == expected
        checked += 1
