"""Exact arithmetic for rotation angles and the limit period/rank invariants.

Angles in [0,1) are stored as q0 + sum_i q_i * s_i with rational q's over a
formal basis of irrational symbols, declared independent over the rationals
together with 1. Every rationality decision (equality, rational difference,
rational ratio) is exact coefficient arithmetic; numeric symbol values are
used only to reduce mod 1 (integer floors) and for simulation oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError, ParseError, StabilityError

# default numeric values for symbols: fractional parts of square roots of
# primes, irrational and linearly independent with 1 over the rationals
_DEFAULT_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def _default_symbol_value(index):
    p = _DEFAULT_PRIMES[index % len(_DEFAULT_PRIMES)] * (index // len(_DEFAULT_PRIMES) + 1) ** 2
    return math.sqrt(p) % 1.0


@dataclass(frozen=True)
class Angle:
    """One angle: rational part plus rational multiples of irrational symbols."""

    rational: Fraction
    irrational: tuple = ()  # sorted ((symbol, Fraction), ...) with nonzero coeffs

    @staticmethod
    def make(rational, irrational=None):
        irr = tuple(sorted((s, Fraction(c)) for s, c in (irrational or {}).items()
                           if Fraction(c) != 0))
        return Angle(Fraction(rational), irr)

    @property
    def is_rational(self):
        return not self.irrational

    def coeffs(self):
        return dict(self.irrational)

    def __add__(self, other):
        merged = self.coeffs()
        for s, c in other.irrational:
            merged[s] = merged.get(s, Fraction(0)) + c
        return Angle.make(self.rational + other.rational, merged)

    def scaled(self, k):
        k = Fraction(k)
        return Angle.make(self.rational * k, {s: c * k for s, c in self.irrational})

    def shifted(self, integer):
        return Angle.make(self.rational - integer, dict(self.irrational))

    def value(self, symbol_values):
        return float(self.rational) + sum(float(c) * symbol_values[s]
                                          for s, c in self.irrational)

    def rational_ratio(self, other):
        """The rational c with self = c * other, or None."""
        mine, theirs = self.coeffs(), other.coeffs()
        if set(mine) != set(theirs):
            return None
        pairs = [(self.rational, other.rational)] + [
            (mine[s], theirs[s]) for s in mine]
        ratio = None
        for a, b in pairs:
            if b == 0:
                if a != 0:
                    return None
                continue
            r = a / b
            if ratio is None:
                ratio = r
            elif r != ratio:
                return None
        return ratio

    def to_json(self):
        return {"rational": str(self.rational),
                "irrational": {s: str(c) for s, c in self.irrational}}


@dataclass(frozen=True)
class AngleTuple:
    """A tuple of exact angles reduced into [0,1), with symbol numerics."""

    entries: tuple
    symbol_values: dict = field(default_factory=dict)

    @staticmethod
    def make(entries, symbol_values=None):
        entries = tuple(entries)
        names = sorted({s for a in entries for s, _ in a.irrational})
        values = dict(symbol_values or {})
        for i, name in enumerate(names):
            values.setdefault(name, _default_symbol_value(i))
        for name, v in values.items():
            if not (0 < v < 1):
                raise DomainError(f"symbol {name} numeric value must lie in (0,1)")
        reduced = []
        for a in entries:
            v = a.value(values)
            a = a.shifted(math.floor(v))
            v = a.value(values)
            if not (0 <= v < 1):
                raise DomainError("angle did not reduce into [0,1)")
            if abs(v - round(v)) < 1e-12 and not a.is_rational:
                raise DomainError(
                    "irrational angle lands on an integer: declared symbol values "
                    "violate independence")
            reduced.append(a)
        return AngleTuple(tuple(reduced), values)

    def values(self):
        return [a.value(self.symbol_values) for a in self.entries]

    def to_json(self):
        return [a.to_json() for a in self.entries]


def angle_from_json(obj):
    try:
        return Angle.make(Fraction(obj.get("rational", "0")),
                          {s: Fraction(c) for s, c in obj.get("irrational", {}).items()})
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"malformed angle {obj!r}") from exc


def angle_tuple_from_json(obj, symbol_values=None):
    return AngleTuple.make([angle_from_json(a) for a in obj], symbol_values)


def tuple_period(angles: AngleTuple):
    """Least positive integer clearing all rational content: lcm of the
    rational denominators and of the pairwise rational-difference denominators
    among the irrational entries."""
    q1 = 1
    for a in angles.entries:
        if a.is_rational:
            q1 = math.lcm(q1, a.rational.denominator)
    q2 = 1
    irr = [a for a in angles.entries if not a.is_rational]
    for i in range(len(irr)):
        for j in range(i + 1, len(irr)):
            if irr[i].coeffs() == irr[j].coeffs():
                diff = irr[i].rational - irr[j].rational
                q2 = math.lcm(q2, diff.denominator)
    return math.lcm(q1, q2)


def tuple_rank(angles: AngleTuple, period=None):
    """Number of rational-ratio classes of the scaled irrational angles."""
    q = tuple_period(angles) if period is None else period
    reduced = []
    for a in angles.entries:
        if a.is_rational:
            continue
        b = a.scaled(q)
        b = b.shifted(math.floor(b.value(angles.symbol_values)))
        if all(b != c for c in reduced):
            reduced.append(b)
    classes = []
    for b in reduced:
        for cls in classes:
            if b.rational_ratio(cls[0]) is not None:
                cls.append(b)
                break
        else:
            classes.append([b])
    return len(classes)


@dataclass(frozen=True)
class LimitInvariants:
    """Limit multiplicity, period and rank of an iteration with a periodic point."""

    multiplicity: int
    period: int
    rank: int

    def __post_init__(self):
        if self.multiplicity < 0 or self.period < 1 or self.rank < 0:
            raise DomainError("invalid limit invariants")
        if self.rank > self.multiplicity:
            raise DomainError("rank cannot exceed multiplicity")


def limit_invariants(moduli, angles: AngleTuple, p=1):
    """Limit invariants from differential data at a periodic point of period p:
    eigenvalue moduli (sorted, nonincreasing) and the exact angles of the
    unit-modulus eigenvalues."""
    if p < 1:
        raise DomainError("period must be >= 1")
    mods = list(moduli)
    if any(m > 1 + 1e-9 for m in mods):
        raise DomainError("eigenvalue moduli must lie in the closed unit disk")
    if any(mods[i] < mods[i + 1] - 1e-12 for i in range(len(mods) - 1)):
        raise DomainError("moduli must be sorted nonincreasing")
    m = sum(1 for x in mods if x > 1 - 1e-9)
    if m != len(angles.entries):
        raise DomainError(
            f"angle tuple length {len(angles.entries)} does not match the "
            f"{m} unit-modulus eigenvalues")
    q = tuple_period(angles)
    r = tuple_rank(angles, q)
    return LimitInvariants(m, p * q, r)


def rational_orbit_period(angles: AngleTuple, max_steps=10**4):
    """Simulation oracle for all-rational tuples: the least k with every
    k * theta_j an integer, by stepping the torus orbit."""
    if not all(a.is_rational for a in angles.entries):
        raise DomainError("orbit oracle applies to rational tuples only")
    fracs = [a.rational for a in angles.entries]
    state = [Fraction(0)] * len(fracs)
    for k in range(1, max_steps + 1):
        state = [(s + f) % 1 for s, f in zip(state, fracs)]
        if all(s == 0 for s in state):
            return k
    raise StabilityError(f"no torus return within {max_steps} steps")
