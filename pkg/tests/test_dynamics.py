import math

import numpy as np
import pytest

from koblab import DomainError, Polydisk, UnitBall, UnitDisk
from koblab.dynamics import (divergence_probe, find_fixed_point, herve_classify,
                             iterate, target_set_probe, wolff_point)
from koblab.maps import (BallAut, Compose, Map, Mobius, Product, Scale, Select,
                         hyperbolic_mobius, map_from_json, rotation)

DISK = UnitDisk()
PUSH_HALF = Map(hyperbolic_mobius(0.5), DISK)  # (z + 1/2)/(1 + z/2)


def disk_map(node):
    return Map(node, DISK)


def bidisk_map(f_node, g_node):
    return Map(Product((f_node, g_node)), Polydisk(2))


class TestMapSpec:
    def test_self_map_verification_rejects_dilation(self):
        with pytest.raises(DomainError):
            disk_map(Mobius(2.0, 0, 0, 1.0))  # z -> 2z leaves the disk

    def test_json_roundtrip(self):
        m = disk_map(Scale(0.9, hyperbolic_mobius(0.3)))
        again = map_from_json(m.to_json())
        z = 0.2 + 0.1j
        assert again.apply_scalar(z) == pytest.approx(m.apply_scalar(z))

    def test_ball_automorphism_is_self_map(self):
        u = np.eye(2, dtype=complex)
        m = Map(BallAut(np.array([0.3, 0.1j]), u), UnitBall(2))
        assert m.verified

    def test_product_wiring(self):
        swap = Select((1, 0), 2)
        m = Map(swap, Polydisk(2))
        out = m(np.array([0.1, 0.5j]))
        assert out[0] == 0.5j and out[1] == 0.1


class TestIterate:
    def test_identity_constant_orbit(self):
        ident = disk_map(Mobius(1, 0, 0, 1))
        rec = iterate(ident, [0.3], 10)
        assert all(s == 0 for s in rec.kob_steps)
        assert not rec.overflow

    def test_push_half_climbs_to_one(self):
        rec = iterate(PUSH_HALF, [0.0], 60)
        xs = [p[0].real for p in rec.points]
        assert all(b > a for a, b in zip(xs, xs[1:]))
        assert xs[-1] > 1 - 1e-6

    def test_rotation_third_turn_periodic(self):
        rot = disk_map(rotation(2 * math.pi / 3))
        rec = iterate(rot, [0.5], 9)
        assert rec.points[2][0] == pytest.approx(0.5, abs=1e-12)
        assert rec.points[5][0] == pytest.approx(0.5, abs=1e-12)

    def test_steps_nonincreasing(self):
        m = disk_map(Compose(hyperbolic_mobius(0.4), Scale(0.95, Mobius(1, 0, 0, 1))))
        rec = iterate(m, [0.2j], 80)
        diffs = np.diff(rec.kob_steps)
        assert np.all(diffs <= 1e-9)

    def test_overflow_truncates(self):
        rec = iterate(PUSH_HALF, [0.0], 500)
        assert rec.overflow
        assert len(rec.points) < 500
        assert rec.boundary_gaps[-1] >= 1e-14


class TestFindFixedPoint:
    def test_elliptic_rotation_origin(self):
        fp = find_fixed_point(disk_map(rotation(1.0)))
        assert fp is not None
        assert abs(fp[0]) < 1e-10

    def test_contraction_half(self):
        fp = find_fixed_point(disk_map(Scale(0.5, Mobius(1, 0, 0, 1))))
        assert fp is not None and abs(fp[0]) < 1e-10

    def test_offcenter_contraction(self):
        # z -> (z + 0.4)/2 fixes 0.4
        m = disk_map(Mobius(0.5, 0.2, 0, 1.0))
        fp = find_fixed_point(m)
        assert fp is not None
        assert fp[0] == pytest.approx(0.4, abs=1e-10)

    def test_hyperbolic_automorphism_absent(self):
        assert find_fixed_point(PUSH_HALF) is None

    def test_bidisk_mixed_absent(self):
        m = bidisk_map(Compose(hyperbolic_mobius(0.5), Select((0,), 2)),
                       Compose(Scale(0.5, Mobius(1, 0, 0, 1)), Select((1,), 2)))
        assert find_fixed_point(m) is None


class TestWolffPoint:
    def test_push_half_wolff_one(self):
        wp = wolff_point(PUSH_HALF)
        assert wp.point[0] == pytest.approx(1.0, abs=1e-8)
        assert wp.residual < 1e-6

    def test_parabolic_wolff(self):
        # Cayley conjugate of w -> w + 1; unique boundary fixed point 1
        p = (1 + 2j) / 5
        th = float(np.angle((2j - 1) / (1 + 2j)))
        e = np.exp(1j * th)
        m = disk_map(Mobius(e, -e * p, -np.conj(p), 1.0))
        wp = wolff_point(m)
        assert wp.point[0] == pytest.approx(1.0, abs=1e-4)

    def test_bidisk_first_factor(self):
        m = bidisk_map(Compose(hyperbolic_mobius(0.5), Select((0,), 2)),
                       Select((1,), 2))
        wp = wolff_point(m)
        assert wp.point[0] == pytest.approx(1.0, abs=1e-8)

    def test_rejects_maps_with_fixed_point(self):
        with pytest.raises(DomainError):
            wolff_point(disk_map(Scale(0.5, Mobius(1, 0, 0, 1))))


class TestDivergenceProbe:
    def test_rational_rotation_interior(self):
        assert divergence_probe(disk_map(rotation(2 * math.pi / 5)), [0.4], 200) \
            == "interior-attracted"

    def test_push_half_divergent(self):
        assert divergence_probe(PUSH_HALF, [0.0], 500) == "compactly-divergent"

    def test_contraction_interior(self):
        m = disk_map(Scale(0.5, Mobius(1, 0, 0, 1)))
        assert divergence_probe(m, [0.3], 200) == "interior-attracted"


class TestTargetSetProbe:
    def test_single_cluster_at_one(self):
        starts = UnitDisk().sample_interior(np.random.default_rng(0), 20, radius=0.8)
        est = target_set_probe(PUSH_HALF, list(starts), steps=500, resolution=1e-6)
        assert len(est.clusters) == 1
        rep, mult = est.clusters[0]
        assert mult == 20
        assert rep[0] == pytest.approx(1.0, abs=1e-6)

    def test_bidisk_identity_second_factor_distinct_clusters(self):
        m = bidisk_map(Compose(hyperbolic_mobius(0.5), Select((0,), 2)),
                       Select((1,), 2))
        starts = [np.array([0.0, w]) for w in (0.0, 0.3, -0.5j)]
        est = target_set_probe(m, starts, steps=400, resolution=1e-6)
        assert len(est.clusters) == 3
        for rep, _ in est.clusters:
            assert abs(rep[0] - 1.0) < 1e-6
            assert abs(rep[1]) < 1  # stays in the closed disk slice

    def test_non_divergent_start_excluded(self):
        rot = disk_map(rotation(2 * math.pi / 7))
        est = target_set_probe(rot, [np.array([0.5])], steps=300)
        assert est.excluded == [0]
        assert est.clusters == []


class TestHerveClassify:
    def test_case_i(self):
        f = Compose(hyperbolic_mobius(0.5), Select((0,), 2))
        g = Select((1,), 2)
        res = herve_classify(f, g)
        assert res.case == "i"
        assert res.sigma == pytest.approx(1.0, abs=1e-8)

    def test_case_ii(self):
        f = Compose(hyperbolic_mobius(0.5), Select((0,), 2))
        g = Compose(Scale(0.5, Mobius(1, 0, 0, 1)), Select((1,), 2))
        res = herve_classify(f, g)
        assert res.case == "ii"
        assert res.sigma == pytest.approx(1.0, abs=1e-8)
        assert all(abs(p[0]) < 1e-9 for p in res.slice_fixed_g)

    def test_case_iii(self):
        f = Compose(hyperbolic_mobius(0.5), Select((0,), 2))
        g = Compose(hyperbolic_mobius(0.5), Select((1,), 2))
        res = herve_classify(f, g)
        assert res.case == "iii"
        assert res.sigma == pytest.approx(1.0, abs=1e-8)
        assert res.tau == pytest.approx(1.0, abs=1e-8)

    def test_case_iv_swap_with_push(self):
        # F(z, w) = (w, mobius(z)): slices fix points but F does not
        f = Select((1,), 2)
        g = Compose(hyperbolic_mobius(0.5), Select((0,), 2))
        res = herve_classify(f, g)
        assert res.case == "iv"
        assert res.sigma == pytest.approx(1.0, abs=1e-6)
        assert res.tau == pytest.approx(1.0, abs=1e-6)

    def test_case_iv_matches_direct_iteration(self):
        f = Select((1,), 2)
        g = Compose(hyperbolic_mobius(0.5), Select((0,), 2))
        m = bidisk_map(f, g)
        est = target_set_probe(m, [np.array([0.2, -0.1])], steps=800)
        rep, _ = est.clusters[0]
        res = herve_classify(f, g)
        assert abs(rep[0] - res.sigma) < 1e-5
        assert abs(rep[1] - res.tau) < 1e-5
