import math

import numpy as np
import pytest

from koblab import UnitBall, ball_as_convex, kobayashi_distance
from koblab.domains import ConvexSmooth, EllipsoidConstraint, HalfspaceConstraint
from koblab.lempert import (estimate_lempert, halfplane_lower_bound,
                            kobayashi_ball_sample, slice_upper_bound,
                            supporting_functional)

BALL2 = ball_as_convex(2)
ELLIPSOID = ConvexSmooth((EllipsoidConstraint(np.array([1.0, 4.0]), np.array([1.0, 1.0])),))
HALF_LN3 = 0.5 * math.log(3.0)


class TestSupportingFunctional:
    def test_ball_at_e1(self):
        sd = supporting_functional(BALL2, [1.0, 0.0])
        assert np.allclose(sd.functional, [1.0, 0.0], atol=1e-12)
        assert sd.peak([1.0, 0.0]) == pytest.approx(1.0)
        assert not sd.nonunique

    def test_peak_value_at_contact(self):
        sd = supporting_functional(BALL2, [0.0, 1.0])
        assert sd.peak([0.0, 1.0]) == pytest.approx(1.0, abs=1e-12)

    def test_ellipsoid_normal_direction(self):
        sd = supporting_functional(ELLIPSOID, [0.0, 0.5])
        assert abs(sd.functional[0]) < 1e-12
        assert abs(abs(sd.functional[1]) - 1.0) < 1e-12
        rng = np.random.default_rng(0)
        pts = ELLIPSOID.sample_interior(rng, 100)
        lx = sd.pairing(sd.boundary_point).real
        assert all(sd.pairing(p).real < lx for p in pts)

    def test_peak_bounded_on_many_points(self):
        sd = supporting_functional(ELLIPSOID, [1.0, 0.0])
        rng = np.random.default_rng(1)
        pts = ELLIPSOID.sample_interior(rng, 1000)
        assert np.all(np.abs([sd.peak(p) for p in pts]) < 1)


class TestSliceUpperBound:
    def test_ball_slice_is_tight(self):
        got = slice_upper_bound(BALL2, [0, 0], [0.5, 0])
        assert got == pytest.approx(HALF_LN3, abs=1e-3)
        assert got >= HALF_LN3 - 1e-9  # upper bound stays an upper bound

    def test_equal_points(self):
        assert slice_upper_bound(BALL2, [0.1, 0.2], [0.1, 0.2]) == 0.0

    def test_dominates_halfplane_bound(self):
        z, w = [0.1, 0.1], [0.3, -0.2]
        assert (slice_upper_bound(ELLIPSOID, z, w)
                >= halfplane_lower_bound(ELLIPSOID, z, w) - 1e-9)


class TestHalfplaneLowerBound:
    def test_ball_example(self):
        got = halfplane_lower_bound(BALL2, [0, 0], [0.5, 0])
        assert 0 < got <= HALF_LN3 + 1e-12

    def test_equal_points(self):
        assert halfplane_lower_bound(BALL2, [0.2, 0], [0.2, 0]) == 0.0

    def test_monotone_in_candidates(self):
        z, w = [0.1, 0.0], [0.0, 0.3]
        few = halfplane_lower_bound(ELLIPSOID, z, w, extra_directions=2)
        many = halfplane_lower_bound(ELLIPSOID, z, w, extra_directions=24)
        assert many >= few - 1e-12

    def test_below_exact_on_ball(self):
        rng = np.random.default_rng(3)
        for _ in range(5):
            z = 0.4 * UnitBall(2).sample_interior(rng, 1)[0]
            w = 0.4 * UnitBall(2).sample_interior(rng, 1)[0]
            exact = kobayashi_distance(UnitBall(2), z, w)
            assert halfplane_lower_bound(BALL2, z, w) <= exact + 1e-9


class TestEstimateLempert:
    def test_degree1_ball_axis_pair(self):
        est = estimate_lempert(BALL2, [0, 0], [0.5, 0], degree=1)
        assert est.upper == pytest.approx(HALF_LN3, abs=1e-4)
        assert est.lower <= HALF_LN3 <= est.upper + 1e-12

    def test_equal_points(self):
        est = estimate_lempert(BALL2, [0.3, 0.1], [0.3, 0.1], degree=3)
        assert est.lower == 0.0 and est.upper == 0.0

    def test_sandwich_on_random_ball_pairs(self):
        rng = np.random.default_rng(11)
        ball = UnitBall(2)
        for _ in range(3):
            z = 0.25 * ball.sample_interior(rng, 1)[0]
            w = 0.25 * ball.sample_interior(rng, 1)[0]
            exact = kobayashi_distance(ball, z, w)
            est = estimate_lempert(BALL2, z, w, degree=4)
            assert est.lower <= exact + 1e-9
            assert exact <= est.upper + 1e-9
            assert est.upper - exact < 5e-3

    def test_degree_monotonicity_ellipsoid(self):
        z, w = np.array([0.0, 0.0]), np.array([0.4, 0.2])
        e1 = estimate_lempert(ELLIPSOID, z, w, degree=1)
        e4 = estimate_lempert(ELLIPSOID, z, w, degree=4, t_upper_hint=math.tanh(e1.upper))
        e6 = estimate_lempert(ELLIPSOID, z, w, degree=6, t_upper_hint=math.tanh(e4.upper))
        assert e4.upper <= e1.upper + 1e-9
        assert e6.upper <= e4.upper + 1e-9
        assert e6.lower <= e6.upper

    def test_witness_is_admissible_and_interpolates(self):
        z, w = np.array([0.1, -0.1]), np.array([0.3, 0.2])
        est = estimate_lempert(ELLIPSOID, z, w, degree=3)
        disc = est.witness
        assert disc.margin > 0
        assert disc.endpoint_residual(z, w) < 1e-7
        ang = np.exp(2j * np.pi * np.arange(512) / 512)
        assert np.max(ELLIPSOID.rho_max_many(disc(ang))) < 0

    def test_segment_contraction(self):
        # points on the segment between the pair are no farther apart
        z, w = np.array([0.0, 0.0]), np.array([0.35, 0.15])
        whole = estimate_lempert(ELLIPSOID, z, w, degree=3)
        inner = estimate_lempert(ELLIPSOID, 0.25 * w + 0.75 * z, 0.75 * w + 0.25 * z, degree=3)
        gap = whole.upper - whole.lower
        assert inner.upper <= whole.upper + gap + 1e-9


class TestKobayashiBallSample:
    def test_certified_sets_respect_exact_ball(self):
        r = 0.35
        out = kobayashi_ball_sample(BALL2, [0, 0], r, count=4, degree=2, seed=5)
        ball = UnitBall(2)
        for p in out.inside:
            assert kobayashi_distance(ball, [0, 0], p) < r
        for p in out.outside:
            assert kobayashi_distance(ball, [0, 0], p) > r

    def test_midpoint_convexity_ellipsoid(self):
        r = 0.3
        out = kobayashi_ball_sample(ELLIPSOID, [0, 0], r, count=4, degree=2, seed=7)
        pts = out.inside
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                mid = 0.5 * (pts[i] + pts[j])
                est = estimate_lempert(ELLIPSOID, [0, 0], mid, degree=2)
                assert not est.lower > r  # never certified outside

    def test_tiny_radius_only_near_center(self):
        out = kobayashi_ball_sample(BALL2, [0.1, 0.0], 0.05, count=2, degree=1, seed=3)
        for p in out.inside:
            assert np.linalg.norm(p - np.array([0.1, 0.0])) < 0.1


class TestIntersectionDomain:
    def test_halfspace_cut_ball(self):
        dom = ConvexSmooth((EllipsoidConstraint(np.ones(2), np.ones(2)),
                            HalfspaceConstraint(np.array([1.0, 0.0]), 0.5)))
        z, w = np.array([0.0, 0.0]), np.array([0.2, 0.3])
        est = estimate_lempert(dom, z, w, degree=3)
        # cutting the domain can only increase the distance
        exact_ball = kobayashi_distance(UnitBall(2), z, w)
        assert est.upper >= exact_ball - 1e-9
        assert est.lower <= est.upper
