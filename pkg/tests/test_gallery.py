"""Tests for the example families."""

import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))

from coarse_toolkit.core.errors import DomainError
from coarse_toolkit.gallery import (
    CombFamily,
    CombRetractionFamily,
    CubesFamily,
    HeisenbergFamily,
    LatticeQuotientFamily,
    ball_growth,
    ball_sizes,
    comb,
    comb_retraction,
    commutator,
    cubes_squares,
    discrete_copy,
    enumerate_words_ball,
    heisenberg,
    heisenberg_cayley_ball,
    lattice_ball,
    lattice_points,
    lattice_quotient,
    multiply,
    octahedral_size,
    random_instance,
    random_rips_instance,
)
from coarse_toolkit.gallery.comb import comb_stages
from coarse_toolkit.gallery.groups import LengthTable, inverse, word_lengths
from coarse_toolkit.gallery.random_spaces import greedy_net
from coarse_toolkit.metric_core import (
    AffineWitness,
    check_affine_upper,
    check_metric,
    lipschitz_constant,
    min_affine_lower,
    surjectivity_radius,
)


class TestComb:
    def test_stages(self):
        """Stage n places n teeth with gaps 1..n."""
        stages, x_final = comb_stages(3)
        assert stages == ((0,), (1, 2), (4, 5, 7))
        assert x_final == 10
        with pytest.raises(DomainError):
            comb_stages(0)

    def test_sizes(self):
        c = comb(5)
        assert c.x_final == 35
        assert c.X.size == 91
        assert comb(6).X.size == 148

    def test_metrics(self):
        """The comb's path metric dominates its l1 metric."""
        c = comb(4)
        assert check_metric(c.X).ok
        assert c.X.distance((4, 3), (5, 3)) == 7.0
        assert c.Y.distance((4, 3), (5, 3)) == 1.0
        assert check_affine_upper(c.f, AffineWitness(1.0, 0.0)).ok

    def test_locate_pair(self):
        """The located tips sit sigma + 1 apart on stage n."""
        c = comb(6)
        assert c.locate_pair(2, 5) == ((23, 5), (26, 5))
        assert c.locate_pair(4, 5) == ((30, 5), (35, 5))
        assert c.tip(23) == (23, 5)
        with pytest.raises(DomainError):
            c.locate_pair(5, 5)
        with pytest.raises(DomainError):
            c.locate_pair(2, 7)
        with pytest.raises(DomainError):
            comb(5).locate_pair(4, 5)

    def test_window_drops_last_stage(self):
        c = comb(3)
        window_points = {c.X.points[i] for i in c.window().indices}
        assert (7, 3) not in window_points
        assert (7, 0) in window_points
        assert (2, 2) in window_points

    def test_retraction(self):
        """The projection onto the ray is 1-Lipschitz with an isometric section."""
        retraction = comb_retraction(4)
        assert lipschitz_constant(retraction.f)[0] == 1.0
        s = retraction.section
        assert np.array_equal(retraction.comb.X.dist[np.ix_(s.assign, s.assign)], retraction.ray.dist)
        assert retraction.f((4, 3)) == 4


class TestHeisenberg:
    def test_group_law(self):
        a, b = (1, 0, 0), (0, 1, 0)
        assert multiply(a, b) == (1, 1, 1)
        assert multiply(b, a) == (1, 1, 0)
        assert commutator(a, b) == (0, 0, 1)
        g = (2, -3, 5)
        assert multiply(g, inverse(g)) == (0, 0, 0)
        assert multiply(inverse(g), g) == (0, 0, 0)

    def test_ball_sizes(self):
        assert ball_sizes(3) == {0: 1, 1: 7, 2: 29, 3: 83}

    def test_ball_sizes_to_radius_eight(self):
        sizes = ball_sizes(8)
        assert [sizes[R] for R in range(9)] == [1, 7, 29, 83, 189, 379, 697, 1199, 1953]

    def test_bfs_matches_words(self):
        """Breadth-first lengths agree with brute-force word enumeration."""
        lengths = word_lengths(3)
        for radius in (1, 2, 3):
            assert {g for g, n in lengths.items() if n <= radius} == enumerate_words_ball(radius)

    def test_length_table(self):
        table = LengthTable(2)
        assert table.lookup(np.array([0, 1]), np.array([0, 1]), np.array([0, 1])).tolist() == [0, 2]
        with pytest.raises(DomainError):
            table.lookup(np.array([2]), np.array([2]), np.array([0]))

    def test_ball(self):
        """The ball carries the word metric; the projection to Z^2 is 1-Lipschitz."""
        ball = heisenberg(2)
        assert ball.E.size == 29
        assert check_metric(ball.E).ok
        assert ball.E.distance((0, 0, 0), (0, 0, 1)) == 1.0
        assert ball.E.distance((1, 0, 0), (0, 1, 0)) == 2.0
        assert lipschitz_constant(ball.f)[0] == 1.0
        assert surjectivity_radius(ball.f) == 0.0
        assert ball.interior(1).size == 7
        with pytest.raises(DomainError):
            heisenberg(0)

    def test_cayley_ball(self):
        """Coset edges join every pair with the same (x, y)."""
        graph = heisenberg_cayley_ball(1)
        assert graph.order == 7
        assert graph.size == 4 + 3

    def test_growth(self):
        assert [octahedral_size(R) for R in range(4)] == [1, 7, 25, 63]
        assert all(octahedral_size(R) == len(lattice_points(3, R)) for R in range(5))
        assert ball_growth({1: 1, 2: 4, 3: 9, 4: 16}) == pytest.approx(2.0)
        with pytest.raises(DomainError):
            ball_growth({1: 1})


class TestLattices:
    def test_lattice_ball(self):
        ball = lattice_ball(2, 2)
        assert ball.size == 13
        assert ball.distance((2, 0), (-2, 0)) == 4.0
        with pytest.raises(DomainError):
            lattice_points(0, 1)

    def test_lattice_quotient(self):
        quotient = lattice_quotient(2, 1, 3)
        assert quotient.f((1, -2)) == (1,)
        assert surjectivity_radius(quotient.f) == 0.0
        assert quotient.zhang_window(1).size == lattice_points(2, 2).shape[0]
        with pytest.raises(DomainError):
            lattice_quotient(1, 2, 3)


class TestCubes:
    def test_cubes_squares(self):
        """n^3 -> n^2 is 1-Lipschitz with lower offsets that grow with N."""
        small, large = cubes_squares(10), cubes_squares(50)
        assert check_affine_upper(small.f, AffineWitness(1.0, 0.0)).ok
        offset = lambda cs: min_affine_lower(cs.f, [1.0])[0].offset
        assert offset(large) > offset(small)
        assert small.X.points[:3] == (1, 8, 27)
        with pytest.raises(DomainError):
            cubes_squares(1)


class TestRandom:
    def test_random_instance_is_seeded(self):
        a, b = random_instance(11), random_instance(11)
        assert a.X.points == b.X.points
        assert np.array_equal(a.f.assign, b.f.assign)
        assert a.A.size <= 10
        assert a.X.size <= 20
        assert check_metric(a.X).ok
        assert a.X.diameter <= 20

    def test_random_rips_instance(self):
        """The image is an r-net, so f is coarsely surjective within the drawn radius."""
        for seed in range(5):
            instance = random_rips_instance(seed)
            assert instance.X.size <= 40
            assert surjectivity_radius(instance.f) <= instance.radius
            assert instance.radius <= 2

    def test_greedy_net(self):
        Y = lattice_ball(1, 4)
        net = greedy_net(Y, 1)
        covered = Y.dist[:, net].min(axis=1)
        assert covered.max() <= 1

    def test_discrete_copy(self):
        Y = lattice_ball(1, 2)
        f = discrete_copy(Y)
        assert f.source.points == Y.points
        assert np.isinf(f.source.dist[0, 1])


class TestFamilies:
    def test_comb_family_is_monotone(self):
        assert CombFamily([3, 4, 5]).is_monotone()

    def test_bundle_form(self):
        """Instances export spaces, maps and the interior window."""
        instance = CombRetractionFamily([3]).generate(3)
        bundle = instance.to_bundle()
        assert set(bundle["spaces"]) == {"X", "ray"}
        assert bundle["maps"]["f"]["source"] == "X"
        assert bundle["maps"]["f"]["target"] == "ray"
        assert bundle["maps"]["s"]["source"] == "ray"
        assert bundle["windows"]["interior"]["space"] == "X"
        assert "(7,3)" not in bundle["windows"]["interior"]["points"]

    def test_other_families(self):
        assert HeisenbergFamily([2], interior_margin=1).generate(2).window.size == 7
        assert CubesFamily([5]).generate(5).spaces["X"].size == 5
        assert LatticeQuotientFamily([2], k=3, m=2).generate(2).spaces["Y"].size == 13
