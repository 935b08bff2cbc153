from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from koblab.angles import (Angle, AngleTuple, angle_tuple_from_json,
                           limit_invariants, rational_orbit_period,
                           tuple_period, tuple_rank)
from koblab.errors import DomainError


def rational_tuple(*fracs):
    return AngleTuple.make([Angle.make(Fraction(f)) for f in fracs])


class TestWorkedExamples:
    def test_half_third(self):
        angles = rational_tuple("1/2", "1/3")
        inv = limit_invariants([1.0, 1.0], angles, p=1)
        assert (inv.multiplicity, inv.period, inv.rank) == (2, 6, 0)

    def test_single_irrational(self):
        angles = AngleTuple.make([Angle.make(0, {"s1": 1})])
        inv = limit_invariants([1.0], angles, p=1)
        assert (inv.multiplicity, inv.period, inv.rank) == (1, 1, 1)

    def test_shared_irrational_with_half_offset(self):
        angles = AngleTuple.make([Angle.make(0, {"s1": 1}),
                                  Angle.make(Fraction(1, 2), {"s1": 1})])
        assert tuple_period(angles) == 2
        assert tuple_rank(angles) == 1
        inv = limit_invariants([1.0, 1.0, 0.3], angles, p=2)
        assert (inv.multiplicity, inv.period, inv.rank) == (2, 4, 1)


class TestPeriodOracle:
    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.fractions(min_value=0, max_value=Fraction(29, 30),
                                 max_denominator=30),
                    min_size=1, max_size=4))
    def test_rational_period_matches_torus_orbit(self, fracs):
        angles = AngleTuple.make([Angle.make(f) for f in fracs])
        assert tuple_period(angles) == rational_orbit_period(angles)
        assert tuple_rank(angles) == 0

    def test_fifty_seeded_rational_tuples(self):
        import random
        rng = random.Random(123)
        for _ in range(50):
            fracs = [Fraction(rng.randrange(0, 24), rng.randrange(1, 25))
                     for _ in range(rng.randrange(1, 4))]
            fracs = [f % 1 for f in fracs]
            angles = AngleTuple.make([Angle.make(f) for f in fracs])
            assert tuple_period(angles) == rational_orbit_period(angles)
            assert tuple_rank(angles) == 0


class TestRankArithmetic:
    def test_two_independent_irrationals(self):
        angles = AngleTuple.make([Angle.make(0, {"s1": 1}),
                                  Angle.make(0, {"s2": 1})])
        assert tuple_period(angles) == 1
        assert tuple_rank(angles) == 2

    def test_rational_multiple_same_class(self):
        angles = AngleTuple.make([Angle.make(0, {"s1": 1}),
                                  Angle.make(0, {"s1": Fraction(1, 3)})])
        # theta2 = theta1/3: ratio rational, same class
        assert tuple_rank(angles) == 1

    def test_mixed_rational_and_irrational(self):
        angles = AngleTuple.make([Angle.make(Fraction(1, 4)),
                                  Angle.make(0, {"s1": 1})])
        assert tuple_period(angles) == 4
        assert tuple_rank(angles) == 1


class TestValidation:
    def test_reduction_mod_one(self):
        a = Angle.make(Fraction(7, 3))
        t = AngleTuple.make([a])
        assert t.entries[0].rational == Fraction(1, 3)

    def test_rank_bounded_by_multiplicity(self):
        with pytest.raises(DomainError):
            limit_invariants([1.0], AngleTuple.make([]), p=1)  # length mismatch

    def test_moduli_order_enforced(self):
        angles = rational_tuple("1/2")
        with pytest.raises(DomainError):
            limit_invariants([0.5, 1.0], angles, p=1)

    def test_json_roundtrip(self):
        data = [{"rational": "1/3", "irrational": {"s1": "1/2"}}]
        t = angle_tuple_from_json(data)
        assert t.entries[0].rational == Fraction(1, 3)
        assert t.to_json()[0]["irrational"] == {"s1": "1/2"}
