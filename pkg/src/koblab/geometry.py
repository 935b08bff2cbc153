"""Exact invariant distances and hyperbolic geometry on model domains.

All lengths use the curvature -4 normalization (the 1/2 factor in the log
formulas), in natural-log units. Closed forms cover the unit disk, unit
ball, polydisk, Euclidean balls and half-spaces; smooth convex domains are
rejected here and served by :mod:`koblab.lempert`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domains import (ConvexSmooth, EuclideanBall, HalfPlane, Polydisk,
                      UnitBall, UnitDisk, as_cvec)
from .errors import DomainError, UnsupportedDomainError


def _check_in_disk(z, name="point"):
    z = complex(z)
    if abs(z) >= 1.0:
        raise DomainError(f"{name} {z} is not inside the unit disk")
    return z


def poincare_distance(z1, z2):
    """Hyperbolic distance between two points of the unit disk.

    ``(1/2) log((1+m)/(1-m))`` with ``m = |(z1-z2)/(1-conj(z1) z2)|``;
    this is atanh(m).
    """
    z1 = _check_in_disk(z1, "first argument")
    z2 = _check_in_disk(z2, "second argument")
    m = abs((z1 - z2) / (1.0 - np.conj(z1) * z2))
    return math.atanh(min(m, 1.0 - 1e-17))


@dataclass(frozen=True)
class TangentVector:
    """A tangent vector: base point plus direction, same dimension."""

    base: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        b = as_cvec(self.base)
        d = as_cvec(self.direction, b.size)
        object.__setattr__(self, "base", b)
        object.__setattr__(self, "direction", d)


def poincare_metric_norm(t: TangentVector):
    """|v| / (1 - |z|^2), the hyperbolic norm of a disk tangent vector."""
    z = _check_in_disk(t.base[0], "base point")
    return float(abs(t.direction[0]) / (1.0 - abs(z) ** 2))


# ---------------------------------------------------------------------------
# Disk and ball automorphisms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DiskAutomorphism:
    """zeta -> e^{i theta} (zeta - pole) / (1 - conj(pole) zeta)."""

    theta: float
    pole: complex

    def __post_init__(self):
        if abs(self.pole) >= 1:
            raise DomainError("automorphism pole must lie in the open disk")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.exp(1j * self.theta) * (z - self.pole) / (1.0 - np.conj(self.pole) * z)

    def inverse(self):
        return DiskAutomorphism(-self.theta, -self.pole * np.exp(1j * self.theta))


def disk_automorphism_apply(a: DiskAutomorphism, z):
    """Apply a disk automorphism to a point of the closed disk."""
    z = complex(z)
    if abs(z) > 1.0 + 1e-12:
        raise DomainError("point must lie in the closed unit disk")
    return complex(a(z))


@dataclass(frozen=True)
class AutomorphismClass:
    kind: str  # identity | elliptic | parabolic | hyperbolic
    fixed_points: tuple


def disk_automorphism_classify(a: DiskAutomorphism, tol=1e-9):
    """Classify by fixed points: elliptic (one interior), parabolic (one
    boundary, double), hyperbolic (two boundary). Clearing denominators of
    ``a(z) = z`` gives ``conj(pole) z^2 + (e^{i th} - 1) z - e^{i th} pole = 0``.
    """
    eith = np.exp(1j * a.theta)
    qa = np.conj(a.pole)
    qb = eith - 1.0
    qc = -eith * a.pole
    if abs(qa) < 1e-300:
        if abs(qb) < tol and abs(qc) < tol:
            return AutomorphismClass("identity", ())
        # rotation about the origin: unique interior fixed point 0
        return AutomorphismClass("elliptic", (0.0 + 0.0j,))
    roots = np.roots([qa, qb, qc])
    mods = np.abs(roots)
    # the two roots multiply to a unimodular number, so either one is interior
    # (elliptic) or both sit on the circle (parabolic when they collide).
    # A numerically split double root scatters by ~sqrt(eps), hence the 1e-6 gate.
    if np.min(mods) < 1 - 1e-6:
        interior = roots[np.argmin(mods)]
        return AutomorphismClass("elliptic", (complex(interior),))
    if abs(roots[0] - roots[1]) < 1e-6:
        fp = 0.5 * (roots[0] + roots[1])
        return AutomorphismClass("parabolic", (complex(fp / abs(fp)),))
    return AutomorphismClass("hyperbolic", tuple(complex(r) for r in roots))


def ball_automorphism(z, w):
    """The involutive ball automorphism moving ``z`` to the origin, applied to ``w``.

    Satisfies ``1 - ||result||^2 = (1-||z||^2)(1-||w||^2) / |1-<w,z>|^2``.
    """
    z = as_cvec(z)
    w = as_cvec(w, z.size)
    nz = np.linalg.norm(z)
    if nz >= 1.0 or np.linalg.norm(w) >= 1.0:
        raise DomainError("ball automorphism arguments must be interior")
    if nz == 0:
        return w.copy()
    proj = (np.dot(w, np.conj(z)) / np.dot(z, np.conj(z))) * z
    s = np.sqrt(1.0 - nz**2)
    return (z - proj - s * (w - proj)) / (1.0 - np.dot(w, np.conj(z)))


# ---------------------------------------------------------------------------
# Kobayashi distance
# ---------------------------------------------------------------------------

def _halfplane_distance(l1: complex, l2: complex, offset: float):
    """Poincare distance of the plane half-plane {Re < offset}."""
    m1, m2 = l1 - offset, l2 - offset
    if m1.real >= 0 or m2.real >= 0:
        raise DomainError("half-plane argument is not interior")
    c1 = (m1 + 1.0) / (m1 - 1.0)
    c2 = (m2 + 1.0) / (m2 - 1.0)
    return poincare_distance(c1, c2)


def kobayashi_distance(domain, z, w):
    """Exact Kobayashi distance between interior points of a model domain.

    Disk: the Poincare distance. Polydisk: max of coordinate distances.
    Ball: move ``z`` to the origin with a ball automorphism and use the
    radial formula. Euclidean balls and half-spaces reduce to the unit
    models through affine/Cayley isometries.
    """
    if isinstance(domain, ConvexSmooth):
        raise UnsupportedDomainError(
            "no closed form on smooth convex domains; use koblab.lempert.estimate_lempert")
    z = as_cvec(z, domain.n)
    w = as_cvec(w, domain.n)
    if isinstance(domain, UnitDisk):
        return poincare_distance(z[0], w[0])
    if isinstance(domain, Polydisk):
        if not (domain.contains(z) and domain.contains(w)):
            raise DomainError("point is not interior to the polydisk")
        return max(poincare_distance(a, b) for a, b in zip(z, w))
    if isinstance(domain, UnitBall):
        if not (domain.contains(z) and domain.contains(w)):
            raise DomainError("point is not interior to the ball")
        r = np.linalg.norm(ball_automorphism(z, w))
        return math.atanh(min(float(r), 1.0 - 1e-17))
    if isinstance(domain, EuclideanBall):
        unit = UnitBall(domain.n)
        return kobayashi_distance(unit, (z - domain.center) / domain.radius,
                                  (w - domain.center) / domain.radius)
    if isinstance(domain, HalfPlane):
        return _halfplane_distance(domain.pairing(z), domain.pairing(w), domain.offset)
    raise UnsupportedDomainError(f"unsupported domain {type(domain).__name__}")


def boundary_distance(domain, z):
    """Euclidean distance from an interior point to the domain boundary."""
    d = domain.boundary_distance(z)
    if d <= 0:
        raise DomainError("point is not interior")
    return d


def kobayashi_ball_disk_params(center, radius):
    """Euclidean (center, radius) of the hyperbolic disk B(center, radius) in the unit disk."""
    z0 = _check_in_disk(center, "hyperbolic center")
    if radius <= 0:
        raise DomainError("radius must be positive")
    tau = math.tanh(radius)
    denom = 1.0 - tau**2 * abs(z0) ** 2
    return ((1.0 - tau**2) / denom * z0, (1.0 - abs(z0) ** 2) * tau / denom)


def geodesic_point(theta, t):
    """tanh(t) e^{i theta}: the unit-speed radial geodesic through the origin."""
    return math.tanh(t) * np.exp(1j * theta)


def ball_log_bounds(radius, z):
    """Two-sided log bounds for the distance to the center of a Euclidean ball.

    Returns ``(log(radius)/2 - log(d)/2, log(2*radius)/2 - log(d)/2)`` with
    ``d`` the boundary gap of ``z``; the exact center distance lies between.
    """
    z = as_cvec(z)
    if radius <= 0:
        raise DomainError("radius must be positive")
    delta = radius - np.linalg.norm(z)
    if delta <= 0:
        raise DomainError("point lies outside the ball")
    return (0.5 * math.log(radius) - 0.5 * math.log(delta),
            0.5 * math.log(2 * radius) - 0.5 * math.log(delta))


@dataclass(frozen=True)
class BoundaryEstimateConstants:
    """Empirical sandwich constants: c2 - log(d)/2 <= k <= c1 - log(d)/2 on the samples."""

    c1: float
    c2: float
    radius: float
    empirical: bool = True


def fit_boundary_constants(domain, z0, samples):
    """Tightest constants c1, c2 valid on the sample set for the boundary sandwich.

    Works on unit and Euclidean balls where the distance is exact. The fit
    is a max/min of ``k(z0, z) + log(delta(z))/2`` over the samples.
    """
    if not isinstance(domain, (UnitBall, EuclideanBall, UnitDisk)):
        raise DomainError("boundary-constant fit supports ball-type domains only")
    pts = [as_cvec(s, domain.n) for s in samples]
    if len(pts) < 2:
        raise DomainError("need at least 2 samples to fit boundary constants")
    vals = []
    radius = domain.radius if isinstance(domain, EuclideanBall) else 1.0
    for z in pts:
        vals.append(kobayashi_distance(domain, z0, z) + 0.5 * math.log(boundary_distance(domain, z)))
    return BoundaryEstimateConstants(c1=max(vals), c2=min(vals), radius=radius)
