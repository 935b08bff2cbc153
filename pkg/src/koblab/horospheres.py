"""Horosphere geometry: boundary-renormalized distance functionals, exact
horosphere formulas on the ball and polydisk, sequence horospheres, and
invariance verification for iterated self-maps.

A horosphere of center x on the boundary, pole z0 and radius R is a sublevel
set of the limit behavior of k(z, w) - k(z0, w) as w approaches x: limsup
for the small kind, liminf for the large kind, and a plain limit along a
prescribed approach sequence for the sequence kind.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domains import Polydisk, UnitBall, UnitDisk, as_cvec
from .errors import DomainError, StabilityError
from .geometry import kobayashi_distance

LIMIT_OSCILLATION_TOL = 1e-6
ALPHA_OSCILLATION_TOL = 1e-8


@dataclass(frozen=True)
class ApproachSequence:
    """Interior points converging to a boundary target."""

    target: np.ndarray
    points: tuple

    @staticmethod
    def radial(target, length=40):
        """w_nu = (1 - 2^-nu) x, nontangential by construction."""
        x = as_cvec(target)
        pts = tuple((1.0 - 2.0**-nu) * x for nu in range(1, length + 1))
        return ApproachSequence(x, pts)

    @staticmethod
    def custom(target, points):
        x = as_cvec(target)
        pts = tuple(as_cvec(p, x.size) for p in points)
        if not pts:
            raise DomainError("approach sequence needs at least one point")
        return ApproachSequence(x, pts)

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class HorosphereSpec:
    """kind in {small, large, sequence}; sequence kind carries its approach."""

    kind: str
    center: np.ndarray
    pole: np.ndarray
    radius: float
    sequence: ApproachSequence = None

    def __post_init__(self):
        if self.kind not in ("small", "large", "sequence"):
            raise DomainError(f"unknown horosphere kind {self.kind!r}")
        if self.radius <= 0:
            raise DomainError("horosphere radius must be positive")
        object.__setattr__(self, "center", as_cvec(self.center))
        object.__setattr__(self, "pole", as_cvec(self.pole))
        if self.kind == "sequence" and self.sequence is None:
            raise DomainError("sequence horosphere needs an approach sequence")


@dataclass
class FunctionalEstimate:
    value: float
    oscillation: float
    tail: list


def horo_functional(domain, z, z0, seq: ApproachSequence, mode="limsup"):
    """Evaluate k(z, w_nu) - k(z0, w_nu) along the sequence and reduce the
    tail (last quarter): max for limsup, min for liminf; the limit mode
    errors out when the tail still oscillates above 1e-6."""
    z = as_cvec(z, domain.n)
    z0 = as_cvec(z0, domain.n)
    vals = [kobayashi_distance(domain, z, w) - kobayashi_distance(domain, z0, w)
            for w in seq.points]
    tail = vals[-max(3, len(vals) // 4):]
    hi, lo = max(tail), min(tail)
    osc = hi - lo
    if mode == "limsup":
        value = hi
    elif mode == "liminf":
        value = lo
    elif mode == "limit":
        if osc > LIMIT_OSCILLATION_TOL:
            raise StabilityError(
                f"limit did not stabilize: tail oscillation {osc:.2e}")
        value = 0.5 * (hi + lo)
    else:
        raise DomainError(f"unknown mode {mode!r}")
    return FunctionalEstimate(value, osc, tail)


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

@dataclass
class BallHorosphere:
    member: bool
    index: float
    ellipsoid_center: np.ndarray
    axis_along: float
    axis_transverse: float


def ball_horosphere(x, R, z):
    """Membership index |1 - <z,x>|^2 / (1 - ||z||^2) of the ball horosphere
    (small = large); the sublevel set is an ellipsoid internally tangent at x
    with contact parameter r = R/(1+R)."""
    x = as_cvec(x)
    z = as_cvec(z, x.size)
    if abs(np.linalg.norm(x) - 1.0) > 1e-10:
        raise DomainError("horosphere center must lie on the unit sphere")
    if np.linalg.norm(z) >= 1.0:
        raise DomainError("membership point must be interior")
    if R <= 0:
        raise DomainError("radius must be positive")
    idx = abs(1.0 - np.dot(z, np.conj(x))) ** 2 / (1.0 - np.linalg.norm(z) ** 2)
    r = R / (1.0 + R)
    return BallHorosphere(bool(idx < R), float(idx), (1 - r) * x, r, math.sqrt(r))


def disk_horocycle_params(tau, R):
    """Euclidean (center, radius) of the horocycle at a unimodular tau."""
    r = R / (1.0 + R)
    return (1 - r) * complex(tau), r


@dataclass
class PolydiskHorospheres:
    small_member: bool
    large_member: bool
    indices: dict  # coordinate index -> membership index, unimodular coords only


def polydisk_horospheres(x, R, z):
    """Small: max of the per-coordinate indices over unimodular coordinates
    of the center; large: min. Coordinates with |x_j| < 1 do not count."""
    x = as_cvec(x)
    z = as_cvec(z, x.size)
    if np.max(np.abs(x)) > 1 + 1e-10 or np.max(np.abs(z)) >= 1:
        raise DomainError("center must lie on the closed polydisk boundary, point inside")
    if R <= 0:
        raise DomainError("radius must be positive")
    idx = {}
    for j in range(x.size):
        if abs(abs(x[j]) - 1.0) <= 1e-10:
            idx[j] = abs(x[j] - z[j]) ** 2 / (1.0 - abs(z[j]) ** 2)
    if not idx:
        raise DomainError("no unimodular coordinate: not a polydisk horosphere center")
    vals = list(idx.values())
    return PolydiskHorospheres(bool(max(vals) < R), bool(min(vals) < R), idx)


@dataclass
class SequenceHorosphere:
    member: bool
    alphas: dict       # unimodular coordinate -> weight alpha_j <= 1
    factors: list      # per coordinate: ("disk",) or ("horocycle", center, R/alpha)
    oscillation: float


def sequence_horosphere_polydisk(seq: ApproachSequence, R, z):
    """Sequence horosphere of the polydisk: per-coordinate weights
    alpha_j = lim min_h (1-|w_h|^2)/(1-|w_j|^2) over unimodular coordinates
    of the target, then membership max_j alpha_j |xi_j - z_j|^2/(1-|z_j|^2) < R.
    The product structure is one horocycle factor per unimodular coordinate."""
    xi = seq.target
    z = as_cvec(z, xi.size)
    if R <= 0:
        raise DomainError("radius must be positive")
    uni = [j for j in range(xi.size) if abs(abs(xi[j]) - 1.0) <= 1e-10]
    if not uni:
        raise DomainError("sequence target has no unimodular coordinate")
    pts = np.stack(seq.points)
    one_minus = 1.0 - np.abs(pts) ** 2
    tail_from = max(0, len(seq) - max(3, len(seq) // 4))
    alphas, worst_osc = {}, 0.0
    for j in uni:
        ratios = np.min(one_minus, axis=1) / one_minus[:, j]
        tail = ratios[tail_from:]
        osc = float(np.max(tail) - np.min(tail))
        worst_osc = max(worst_osc, osc)
        if osc > ALPHA_OSCILLATION_TOL:
            raise StabilityError(
                f"not a horosphere sequence along this tail: alpha_{j} "
                f"oscillates by {osc:.2e}")
        alphas[j] = float(tail[-1])
    factors = []
    score = -math.inf
    for j in range(xi.size):
        if j not in alphas or alphas[j] == 0.0:
            factors.append(("disk",))
            continue
        score = max(score, alphas[j] * abs(xi[j] - z[j]) ** 2 / (1 - abs(z[j]) ** 2))
        factors.append(("horocycle", complex(xi[j] / abs(xi[j])), R / alphas[j]))
    member = bool(score < R)
    return SequenceHorosphere(member, alphas, factors, worst_osc)


# ---------------------------------------------------------------------------
# Membership dispatch and invariance checking
# ---------------------------------------------------------------------------

def membership_index(domain, spec: HorosphereSpec, z):
    """Scalar score with membership iff score < spec.radius."""
    z = as_cvec(z, domain.n)
    if isinstance(domain, (UnitDisk, UnitBall)):
        return ball_horosphere(spec.center, spec.radius, z).index
    if isinstance(domain, Polydisk):
        if spec.kind == "sequence":
            seq = spec.sequence
            res = sequence_horosphere_polydisk(seq, spec.radius, z)
            vals = [res.alphas[j] * abs(seq.target[j] - z[j]) ** 2 / (1 - abs(z[j]) ** 2)
                    for j in res.alphas]
            return max(vals)
        both = polydisk_horospheres(spec.center, spec.radius, z)
        vals = list(both.indices.values())
        return max(vals) if spec.kind == "small" else min(vals)
    raise DomainError("no exact horosphere formula on this domain")


def horosphere_member(domain, spec, z):
    return membership_index(domain, spec, z) < spec.radius


@dataclass
class InvarianceReport:
    violations: int
    worst_margin: float
    samples_used: int


def invariance_check(m, spec: HorosphereSpec, samples=500, seed=0):
    """Sample the horosphere, push the samples through the map, and re-test
    membership in the theorem-appropriate target: small stays small on the
    disk, small lands in large otherwise, sequence stays sequence, large
    stays large. Reports the violation count and the worst signed margin
    (index - R after mapping; negative is good)."""
    domain = m.domain
    if spec.kind == "small" and not isinstance(domain, (UnitDisk, UnitBall)):
        target = HorosphereSpec("large", spec.center, spec.pole, spec.radius, spec.sequence)
    else:
        target = spec
    rng = np.random.default_rng(seed)
    got, tested, worst, bad = 0, 0, -math.inf, 0
    max_draw = samples * 400
    drawn = 0
    while got < samples and drawn < max_draw:
        batch = domain.sample_interior(rng, max(64, samples))
        drawn += len(batch)
        for z in batch:
            if got >= samples:
                break
            if not horosphere_member(domain, spec, z):
                continue
            got += 1
            image = m(z)
            margin = membership_index(domain, target, image) - target.radius
            worst = max(worst, float(margin))
            if margin >= 1e-12:
                bad += 1
    if got < max(1, samples // 10):
        raise DomainError(
            f"sampling error: only {got} horosphere points in {drawn} draws")
    return InvarianceReport(bad, worst, got)
