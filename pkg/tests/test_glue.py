"""Tests for coarse gluing and coequaliser spaces."""

import os
import sys

import numpy as np
import pytest
from hypothesis import given, settings

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))

from coarse_toolkit.core.errors import DomainError
from coarse_toolkit.gallery.random_spaces import random_instance
from coarse_toolkit.glue import coarse_glue, coeq_space, double_glue_comparison
from coarse_toolkit.metric_core import AffineWitness, FiniteExtMetricSpace, MappedPair, check_affine_upper, check_metric
from tests.strategies import parallel_maps


def line(values, name="line"):
    values = np.asarray(values, dtype=np.int64)
    return FiniteExtMetricSpace(tuple(int(v) for v in values), np.abs(values[:, None] - values[None, :]), name=name)


def test_glue_two_segments_at_a_point():
    """Gluing two segments at their ends adds one unit edge between them."""
    A = line([0], "A")
    X, Y = line([0, 1, 2], "X"), line([0, 1, 2], "Y")
    f = MappedPair(A, X, [0])
    g = MappedPair(A, Y, [0])
    result = coarse_glue(f, g)
    assert result.space.size == 6
    assert result.space.distance((0, 2), (1, 2)) == 5.0
    assert result.space.distance((0, 0), (1, 0)) == 1.0
    assert result.graph.kind_counts()["glued"] == 1
    assert np.array_equal(result.left.image_distances, X.dist)


def test_glue_without_common_point_is_disconnected():
    """An empty source leaves the summands at infinite distance."""
    A = FiniteExtMetricSpace((), [])
    X, Y = line([0, 1], "X"), line([0], "Y")
    result = coarse_glue(MappedPair(A, X, []), MappedPair(A, Y, []))
    assert result.space.distance((0, 0), (1, 0)) == np.inf


def test_glue_requires_common_source():
    X = line([0, 1])
    with pytest.raises(DomainError):
        coarse_glue(MappedPair(line([0]), X, [0]), MappedPair(line([5]), X, [0]))


def test_coequaliser_of_a_shift():
    """Identifying x with x + 3 on a segment of length 6 shortens the ends to 1 step apart."""
    X = line(range(7), "X")
    A = line(range(4), "A")
    f = MappedPair(A, X, [0, 1, 2, 3])
    g = MappedPair(A, X, [3, 4, 5, 6])
    result = coeq_space(f, g)
    assert result.space.distance(0, 3) == 1.0
    assert result.space.distance(0, 6) == 2.0
    assert result.closeness == 1.0
    assert result.graph.kind_counts()["glued"] == 4
    assert check_metric(result.space).ok


def test_coequaliser_joins_segment_ends():
    """Identifying the ends of a segment of length 10 makes a cycle of length 11."""
    X = line(range(11), "X")
    A = line([0], "A")
    result = coeq_space(MappedPair(A, X, [0]), MappedPair(A, X, [10]))
    assert result.space.distance(0, 10) == 1.0
    assert result.space.distance(0, 5) == 5.0
    assert result.space.distance(1, 9) == 3.0


def test_double_gluing_constants_on_a_cycle():
    """s stretches the identified ends to distance 2 and no further."""
    X = line(range(11), "X")
    A = line([0], "A")
    report = double_glue_comparison(MappedPair(A, X, [0]), MappedPair(A, X, [10]))
    assert report.ok, report.to_dict()
    assert report.s_lipschitz.observed == 2.0
    assert report.s_lipschitz.observed <= report.s_lipschitz.claimed
    assert report.r_lipschitz.observed <= 1.0
    assert report.sr_closeness.observed <= 1.0


def test_coequaliser_requires_parallel_maps():
    X, Y = line([0, 1]), line([0, 1, 2])
    A = line([0])
    with pytest.raises(DomainError):
        coeq_space(MappedPair(A, X, [0]), MappedPair(A, Y, [0]))


@given(parallel_maps())
@settings(max_examples=40, deadline=None)
def test_gluing_maps_are_1_lipschitz(maps):
    """The inclusions into a gluing and the coequaliser quotient never stretch distances."""
    f, g = maps
    glued = coarse_glue(f, g)
    for inclusion in (glued.left, glued.right):
        assert check_affine_upper(inclusion, AffineWitness(1.0, 0.0)).ok
    result = coeq_space(f, g)
    assert check_affine_upper(result.quotient, AffineWitness(1.0, 0.0)).ok
    assert result.closeness <= 1.0


@given(parallel_maps())
@settings(max_examples=40, deadline=None)
def test_double_gluing_comparison_properties(maps):
    """r is 1-Lipschitz, s is 2-Lipschitz, r.s = id and s.r is 1-close to id."""
    report = double_glue_comparison(*maps)
    assert report.ok, report.to_dict()
    assert [check.name for check in report.checks] == ["r_lipschitz", "s_lipschitz", "rs_identity", "sr_closeness"]


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_double_gluing_on_random_instances(seed):
    instance = random_instance(seed)
    report = double_glue_comparison(instance.f, instance.g)
    assert report.ok, report.to_dict()
    assert report.double.size == 2 * instance.X.size
