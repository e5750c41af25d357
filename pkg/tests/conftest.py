# This file is part of AdelicOkounkov.
# Code licensed under the GNU General Public License v3 or later.

"""Shared models for the test suite."""

import os

import pytest

from adelic_okounkov.adelic_model import (DiagonalModel, Place,
                                          WeightFunction)
from adelic_okounkov.log_linear import LogLinear

MODEL_DIRECTORY = os.path.join(os.path.dirname(__file__), os.pardir, "models")


def model_path(name):
    return os.path.join(MODEL_DIRECTORY, name + ".json")


@pytest.fixture
def models_dir():
    return MODEL_DIRECTORY


@pytest.fixture
def flagship():
    """P^1, O(1), weight log 2 at infinity."""
    return DiagonalModel.load(model_path("flagship_p1"))


@pytest.fixture
def flagship_p2():
    return DiagonalModel.load(model_path("flagship_p2"))


@pytest.fixture
def log3_model():
    return DiagonalModel.load(model_path("log3_p1"))


@pytest.fixture
def max_family():
    """Scaling factors (1/2, 2, 2) at infinity on P^2."""
    return DiagonalModel.load(model_path("max_family_p2"))


@pytest.fixture
def tent():
    return DiagonalModel.load(model_path("tent_p1"))


@pytest.fixture
def positive():
    return DiagonalModel.load(model_path("positive_p2"))


@pytest.fixture
def negative_vertex():
    return DiagonalModel.load(model_path("negative_vertex_p2"))


@pytest.fixture
def weighted_at_three():
    """P^1, O(1), weight log 3 at p = 3 and nothing at infinity."""
    weight = WeightFunction.constant(LogLinear.log_of(3), 1)
    return DiagonalModel(1, 1, {Place(3): weight})


@pytest.fixture
def duality_suite(flagship, flagship_p2, max_family, tent, positive,
                  negative_vertex):
    return [flagship, flagship_p2, max_family, tent, positive,
            negative_vertex]
