"""Tests for equaliser sublevels, kernel and quotient filtrations, and Zhang witnesses."""

import io
import os
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..", "src")))

from coarse_toolkit.core.errors import DomainError
from coarse_toolkit.filtration import (
    CSV_COLUMNS,
    RecordKind,
    Window,
    eq_sublevel,
    kernel_stability_profile,
    kernel_sublevel,
    pair_witness_distance,
    quotient_space,
    quotient_stability_profile,
    stabilisation_trend,
    write_profiles_csv,
    zhang_delta,
    zhang_table,
)
from coarse_toolkit.gallery.comb import comb, comb_retraction
from coarse_toolkit.gallery.groups import lattice_quotient
from coarse_toolkit.metric_core import (
    AffineWitness,
    FiniteExtMetricSpace,
    MappedPair,
    check_affine_upper,
    closeness_distance,
    compose,
    identity_map,
    product_linf,
)
from tests.strategies import grid_spaces, maps_between


def line(values, name="line"):
    values = np.asarray(values, dtype=np.int64)
    return FiniteExtMetricSpace(tuple(int(v) for v in values), np.abs(values[:, None] - values[None, :]), name=name)


class TestSublevels:
    def test_eq_sublevel(self):
        """Points whose images are within kappa, with an isometric inclusion."""
        X, Y = line([0, 1, 2]), line([0, 1, 5])
        f = MappedPair(X, Y, [0, 1, 2])
        g = MappedPair(X, Y, [0, 0, 0])
        result = eq_sublevel(f, g, 1)
        assert result.space.points == (0, 1)
        assert result.inclusion.assign.tolist() == [0, 1]
        with pytest.raises(DomainError):
            eq_sublevel(f, g, -1)

    def test_kernel_contains(self):
        retraction = comb_retraction(3)
        kernel = kernel_sublevel(retraction.f, 0)
        assert kernel.contains((4, 3), (4, 0))
        assert not kernel.contains((4, 3), (5, 3))
        assert kernel.size == sum(len(p) ** 2 for p in retraction.f.preimages.values())

    def test_kernel_is_equaliser_of_projections(self):
        """K_sigma(f) equals Eq_sigma(f.pi1, f.pi2) inside the product."""
        f = comb_retraction(2).f
        product = product_linf(f.source, f.source)
        for sigma in (0, 1, 2):
            eq = eq_sublevel(compose(product.first, f), compose(product.second, f), sigma).space
            kernel = kernel_sublevel(f, sigma).as_space()
            assert kernel.points == eq.points
            assert np.array_equal(kernel.dist, eq.dist)
            first, second = kernel_sublevel(f, sigma).projections(kernel)
            assert closeness_distance(compose(first, f), compose(second, f)) <= sigma

    def test_quotient_of_identity_is_trivial(self):
        """Q_0 of an injective isometry is the source itself."""
        X = line([0, 2, 3, 7])
        Q = quotient_space(identity_map(X), 0)
        assert np.array_equal(Q.space.dist, X.dist)

    def test_quotient_glues_close_images(self):
        """Q_sigma adds a unit edge between points whose images are within sigma."""
        c = comb(6)
        v, w = c.locate_pair(2, 5)
        assert quotient_space(c.f, 3).space.distance(v, w) == 1.0
        assert quotient_space(c.f, 2).space.distance(v, w) >= 5.0

    @given(grid_spaces(max_size=6), grid_spaces(max_size=5, name="Y"), st.data())
    @settings(max_examples=30, deadline=None)
    def test_quotient_maps_are_1_lipschitz(self, X, Y, data):
        """q is 1-Lipschitz and the factor into Y is 1-close to f."""
        f = data.draw(maps_between(X, Y))
        for sigma in (0, 1, 3):
            result = quotient_space(f, sigma)
            assert check_affine_upper(result.quotient, AffineWitness(1.0, 0.0)).ok
            assert np.array_equal(result.factor.assign, f.assign)


class TestProfiles:
    def test_kernel_profile_shape(self):
        """One record per sigma <= tau, monotone in both arguments."""
        f = comb_retraction(4).f
        profile = kernel_stability_profile(f, [0, 1, 2])
        assert profile.kind is RecordKind.INCLUSION_DENSITY
        assert len(profile.records) == 6
        assert profile.monotonicity_violations() == []
        assert all(profile.value(s, s) == 0 for s in (0, 1, 2))

    def test_quotient_profile_diagonal(self):
        """r(sigma, sigma) is at most 1."""
        c = comb(4)
        profile = quotient_stability_profile(c.f, [1, 2, 3], c.window(), truncation_param=4)
        assert profile.kind is RecordKind.BONDING_DISTORTION
        assert all(profile.value(s, s) <= 1 for s in (1, 2, 3))
        assert profile.truncation_param == 4
        assert profile.window_size == c.window().size

    @pytest.mark.parametrize("N", [3, 4])
    def test_projection_quotient_profile_is_bounded(self, N):
        """For Z^2 -> Z every pair glued at tau + 1 is at most 2 apart at tau."""
        f = lattice_quotient(2, 1, N).f
        profile = quotient_stability_profile(f, [0, 1, 2])
        for tau in (0, 1):
            assert 1 <= profile.value(tau, tau + 1) <= 2

    def test_pair_witness_distance(self):
        """Pairs already in K_sigma are at distance 0; the comb tips need their tooth height."""
        retraction = comb_retraction(6)
        v, w = retraction.comb.locate_pair(2, 5)
        assert pair_witness_distance(retraction.f, 3, [(v, w)]).tolist() == [0.0]
        assert pair_witness_distance(retraction.f, 2, [(v, w)])[0] > 5

    def test_bad_grid(self):
        f = comb_retraction(2).f
        with pytest.raises(DomainError):
            kernel_stability_profile(f, [2, 1])
        with pytest.raises(DomainError):
            quotient_stability_profile(f, [])

    def test_csv(self):
        """Profiles write the standard CSV columns."""
        f = comb_retraction(3).f
        profile = kernel_stability_profile(f, [0, 1], truncation_param=3)
        stream = io.StringIO()
        write_profiles_csv([profile], stream)
        lines = stream.getvalue().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 4
        assert lines[1].split(",")[2] == "inclusion_density"
        assert lines[1].split(",")[-1] == "3"

    def test_window_restricts_pairs(self):
        f = comb_retraction(3).f
        window = Window(np.array([0, 1]), "two points")
        profile = kernel_stability_profile(f, [0, 1], window)
        assert profile.window_size == 2
        assert profile.window == "two points"


class TestTrend:
    def test_growing(self):
        trend = stabilisation_trend({4: 4.0, 6: 6.0, 8: 8.0})
        assert trend.growing
        assert trend.slope == pytest.approx(1.0)

    def test_bounded(self):
        trend = stabilisation_trend({4: 2.0, 6: 2.0, 8: 2.0})
        assert not trend.growing
        assert trend.slope == pytest.approx(0.0)

    def test_infinite_values_grow(self):
        assert stabilisation_trend({1: 1.0, 2: np.inf}).growing

    def test_needs_two_points(self):
        with pytest.raises(DomainError):
            stabilisation_trend({1: 1.0})


class TestZhang:
    def test_projection_delta_equals_epsilon(self):
        """Projecting Z^2 onto Z needs delta = epsilon on the interior windows."""
        quotient = lattice_quotient(2, 1, 5)
        results = zhang_table(quotient.f, 0, [1.0, 2.0, 3.0], quotient.zhang_window)
        assert [r.delta for r in results] == [1.0, 2.0, 3.0]
        assert all(r.feasible for r in results)

    def test_comb_retraction_delta_grows(self):
        """The tallest tooth tip must walk down to the ray: delta = n_max + epsilon."""
        deltas = [zhang_delta(comb_retraction(n).f, 0, 3).delta for n in (4, 6, 8)]
        assert deltas == [7.0, 9.0, 11.0]

    def test_uncovered_target_is_infeasible(self):
        """A point of Y far from the image has no witness at small R."""
        X, Y = line([0]), line([0, 5])
        f = MappedPair(X, Y, [0])
        result = zhang_delta(f, 0, 5)
        assert not result.feasible
        assert result.pair == ["0", "5"]
        assert zhang_delta(f, 5, 5).feasible

    def test_negative_scale(self):
        f = identity_map(line([0, 1]))
        with pytest.raises(DomainError):
            zhang_delta(f, -1, 0)
