"""Model domains in C^n and their elementary Euclidean geometry.

Every domain knows its complex dimension, how to test interior membership,
its Euclidean distance-to-boundary, and how to draw interior sample points.
Exact invariant-distance formulas live in :mod:`koblab.geometry`; the
smooth convex variant is served by :mod:`koblab.lempert`.

Complex vectors serialize as ``[[re, im], ...]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import DomainError, ParseError, StabilityError


def as_cvec(z, n=None):
    """Coerce scalars/sequences to a 1-d complex vector, checking finiteness."""
    v = np.atleast_1d(np.asarray(z, dtype=complex))
    if v.ndim != 1:
        raise DomainError(f"expected a vector of complex numbers, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise DomainError("complex vector has non-finite components")
    if n is not None and v.size != n:
        raise DomainError(f"expected a point of C^{n}, got dimension {v.size}")
    return v


def cvec_to_json(v):
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    return [[float(c.real), float(c.imag)] for c in v]


def cvec_from_json(obj, what="point"):
    try:
        return np.array([complex(re, im) for re, im in obj], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"malformed {what}: expected [[re, im], ...], got {obj!r}") from exc


@dataclass(frozen=True)
class UnitDisk:
    """The unit disk in C."""

    @property
    def n(self):
        return 1

    def contains(self, z, tol=0.0):
        z = as_cvec(z, 1)
        return bool(np.abs(z[0]) < 1.0 + tol)

    def boundary_distance(self, z):
        z = as_cvec(z, 1)
        return float(1.0 - np.abs(z[0]))

    def sample_interior(self, rng, count, radius=0.999):
        r = radius * np.sqrt(rng.random(count))
        th = 2 * np.pi * rng.random(count)
        return (r * np.exp(1j * th))[:, None]

    def to_json(self):
        return {"kind": "disk"}


@dataclass(frozen=True)
class UnitBall:
    """The Euclidean unit ball in C^n."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError("ball dimension must be >= 1")

    @property
    def n(self):
        return self.dim

    def contains(self, z, tol=0.0):
        z = as_cvec(z, self.dim)
        return bool(np.linalg.norm(z) < 1.0 + tol)

    def boundary_distance(self, z):
        z = as_cvec(z, self.dim)
        return float(1.0 - np.linalg.norm(z))

    def sample_interior(self, rng, count, radius=0.999):
        g = rng.standard_normal((count, 2 * self.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = radius * rng.random(count) ** (1.0 / (2 * self.dim))
        pts = g * r[:, None]
        return pts[:, : self.dim] + 1j * pts[:, self.dim :]

    def to_json(self):
        return {"kind": "ball", "n": self.dim}


@dataclass(frozen=True)
class Polydisk:
    """The unit polydisk in C^n (product of unit disks)."""

    dim: int

    def __post_init__(self):
        if self.dim < 1:
            raise DomainError("polydisk dimension must be >= 1")

    @property
    def n(self):
        return self.dim

    def contains(self, z, tol=0.0):
        z = as_cvec(z, self.dim)
        return bool(np.max(np.abs(z)) < 1.0 + tol)

    def boundary_distance(self, z):
        z = as_cvec(z, self.dim)
        return float(np.min(1.0 - np.abs(z)))

    def sample_interior(self, rng, count, radius=0.999):
        r = radius * np.sqrt(rng.random((count, self.dim)))
        th = 2 * np.pi * rng.random((count, self.dim))
        return r * np.exp(1j * th)

    def to_json(self):
        return {"kind": "polydisk", "n": self.dim}


@dataclass(frozen=True)
class EuclideanBall:
    """A Euclidean ball of arbitrary center and radius in C^n."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_cvec(self.center))
        if not self.radius > 0:
            raise DomainError("EuclideanBall radius must be positive")

    @property
    def n(self):
        return self.center.size

    def contains(self, z, tol=0.0):
        z = as_cvec(z, self.n)
        return bool(np.linalg.norm(z - self.center) < self.radius * (1.0 + tol) + tol)

    def boundary_distance(self, z):
        z = as_cvec(z, self.n)
        return float(self.radius - np.linalg.norm(z - self.center))

    def sample_interior(self, rng, count, radius=0.999):
        return self.center + self.radius * UnitBall(self.n).sample_interior(rng, count, radius)

    def to_json(self):
        return {"kind": "euclidean_ball", "center": cvec_to_json(self.center),
                "radius": float(self.radius)}


@dataclass(frozen=True)
class HalfPlane:
    """The half-space ``{z : Re<z, functional> < offset}`` in C^n."""

    functional: np.ndarray
    offset: float

    def __post_init__(self):
        f = as_cvec(self.functional)
        if np.linalg.norm(f) == 0:
            raise DomainError("HalfPlane functional must be nonzero")
        object.__setattr__(self, "functional", f)

    @property
    def n(self):
        return self.functional.size

    def pairing(self, z):
        z = as_cvec(z, self.n)
        return complex(np.dot(z, np.conj(self.functional)))

    def contains(self, z, tol=0.0):
        return self.pairing(z).real < self.offset + tol

    def boundary_distance(self, z):
        return float((self.offset - self.pairing(z).real) / np.linalg.norm(self.functional))

    def sample_interior(self, rng, count, radius=0.999):
        # points at unit-scale depth behind the bounding hyperplane
        f = self.functional / np.linalg.norm(self.functional)
        base = (self.offset / np.linalg.norm(self.functional)) * f
        depths = 0.05 + rng.random(count)
        lateral = rng.standard_normal((count, self.n)) + 1j * rng.standard_normal((count, self.n))
        lateral -= np.outer(lateral @ np.conj(f), f)
        return base - depths[:, None] * f + 0.5 * lateral

    def to_json(self):
        return {"kind": "halfplane", "functional": cvec_to_json(self.functional),
                "offset": float(self.offset)}


# ---------------------------------------------------------------------------
# Smooth bounded convex domains from defining functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EllipsoidConstraint:
    """rho(z) = sum_j c_j |z_j|^(2 m_j) - 1  (convex for m_j >= 1, c_j > 0)."""

    coeffs: np.ndarray
    powers: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float)
        m = np.asarray(self.powers if self.powers is not None else np.ones_like(c), dtype=float)
        if np.any(c <= 0) or np.any(m < 1):
            raise DomainError("ellipsoid constraint needs c_j > 0 and m_j >= 1")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "powers", m)

    @property
    def n(self):
        return self.coeffs.size

    def value(self, z):
        z = np.asarray(z, dtype=complex)
        return float(np.sum(self.coeffs * np.abs(z) ** (2 * self.powers)) - 1.0)

    def value_many(self, pts):
        pts = np.asarray(pts, dtype=complex)
        return np.sum(self.coeffs * np.abs(pts) ** (2 * self.powers), axis=-1) - 1.0

    def cgrad(self, z):
        """Complex gradient d rho / d conj(z_j); outward direction is 2*Re of it."""
        z = np.asarray(z, dtype=complex)
        mags = np.abs(z)
        return self.coeffs * self.powers * np.where(mags > 0, mags ** (2 * self.powers - 2), 0.0) * z

    def to_json(self):
        return {"type": "ellipsoid", "coeffs": list(map(float, self.coeffs)),
                "powers": list(map(float, self.powers))}


@dataclass(frozen=True)
class HalfspaceConstraint:
    """rho(z) = Re<z, normal> - offset (affine)."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        object.__setattr__(self, "normal", as_cvec(self.normal))

    @property
    def n(self):
        return self.normal.size

    def value(self, z):
        z = np.asarray(z, dtype=complex)
        return float(np.real(np.dot(z, np.conj(self.normal))) - self.offset)

    def value_many(self, pts):
        pts = np.asarray(pts, dtype=complex)
        return np.real(pts @ np.conj(self.normal)) - self.offset

    def cgrad(self, z):
        return 0.5 * self.normal

    def to_json(self):
        return {"type": "halfspace", "normal": cvec_to_json(self.normal),
                "offset": float(self.offset)}


def _constraint_from_json(obj):
    kind = obj.get("type")
    if kind == "ellipsoid":
        return EllipsoidConstraint(np.asarray(obj["coeffs"], dtype=float),
                                   np.asarray(obj.get("powers", [1] * len(obj["coeffs"])), dtype=float))
    if kind == "halfspace":
        return HalfspaceConstraint(cvec_from_json(obj["normal"], "halfspace normal"),
                                   float(obj["offset"]))
    raise ParseError(f"unknown convex constraint type {kind!r}")


@dataclass(frozen=True)
class ConvexSmooth:
    """Bounded convex domain ``{z : rho_i(z) < 0 for all i}`` with gradient oracles.

    At least one constraint must bound the domain (an ellipsoid term does).
    The declared base point must be interior; the bounding box is derived
    from the first ellipsoid constraint unless given explicitly.
    """

    constraints: tuple
    base_point: np.ndarray = None
    box_radius: float = None

    def __post_init__(self):
        cons = tuple(self.constraints)
        if not cons:
            raise DomainError("ConvexSmooth needs at least one constraint")
        dims = {c.n for c in cons}
        if len(dims) != 1:
            raise DomainError("constraint dimensions disagree")
        object.__setattr__(self, "constraints", cons)
        n = dims.pop()
        bp = as_cvec(self.base_point, n) if self.base_point is not None else np.zeros(n, dtype=complex)
        object.__setattr__(self, "base_point", bp)
        if self.box_radius is None:
            ell = [c for c in cons if isinstance(c, EllipsoidConstraint)]
            if not ell:
                raise DomainError("unbounded constraint set: add an ellipsoid or a box_radius")
            object.__setattr__(self, "box_radius",
                               float(np.max((1.0 / ell[0].coeffs) ** (0.5 / ell[0].powers))))
        if not self.contains(bp):
            raise DomainError("declared base point is not interior")

    @property
    def n(self):
        return self.constraints[0].n

    def rho_max(self, z):
        z = as_cvec(z, self.n)
        return max(c.value(z) for c in self.constraints)

    def rho_max_many(self, pts):
        vals = np.stack([c.value_many(pts) for c in self.constraints])
        return np.max(vals, axis=0)

    def contains(self, z, tol=0.0):
        return self.rho_max(z) < tol

    def boundary_point_on_ray(self, start, direction, tol=1e-13):
        """First boundary hit of ``start + s*direction`` with s > 0 (bisection)."""
        start = as_cvec(start, self.n)
        direction = as_cvec(direction, self.n)
        if not self.contains(start):
            raise DomainError("ray start must be interior")
        lo, hi = 0.0, 1.0
        while self.rho_max(start + hi * direction) < 0:
            lo, hi = hi, 2 * hi
            if hi > 1e9:
                raise DomainError("ray never leaves the domain; is it bounded?")
        while hi - lo > tol * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if self.rho_max(start + mid * direction) < 0:
                lo = mid
            else:
                hi = mid
        return start + 0.5 * (lo + hi) * direction

    def boundary_distance_bracket(self, z, starts=8):
        """Certified bracket [lower, upper] for the distance from z to the boundary.

        Upper: best surface point found by multi-start minimization over each
        constraint surface. Lower: distance from z to the supporting hyperplane
        at the best point (valid by convexity).
        """
        z = as_cvec(z, self.n)
        if not self.contains(z):
            raise DomainError("point is not interior")
        zr = np.concatenate([z.real, z.imag])
        best = None
        for con in self.constraints:
            for y0 in self._surface_starts(con, z, starts):
                y0r = np.concatenate([y0.real, y0.imag])
                res = optimize.minimize(
                    lambda xr: np.sum((xr - zr) ** 2),
                    y0r,
                    jac=lambda xr: 2 * (xr - zr),
                    constraints=[{
                        "type": "eq",
                        "fun": lambda xr, c=con: c.value(xr[: self.n] + 1j * xr[self.n :]),
                    }],
                    method="SLSQP",
                    options={"maxiter": 200, "ftol": 1e-16},
                )
                y = res.x[: self.n] + 1j * res.x[self.n :]
                dist = float(np.linalg.norm(y - z))
                if abs(con.value(y)) < 1e-8 and (best is None or dist < best[0]):
                    best = (dist, y, con)
        if best is None:
            raise StabilityError("no constraint-surface projection converged")
        dist, y, con = best
        g = con.cgrad(y)
        gnorm = np.linalg.norm(g)
        lower = float(np.real(np.dot(y - z, np.conj(g))) / gnorm) if gnorm > 0 else 0.0
        lower = max(0.0, min(lower, dist))
        return lower, dist

    def boundary_distance(self, z):
        return self.boundary_distance_bracket(z)[1]

    def _surface_starts(self, con, z, starts):
        """Boundary points of this constraint surface near box-face directions."""
        n = self.n
        dirs = []
        for j in range(2 * n):
            e = np.zeros(n, dtype=complex)
            e[j % n] = 1.0 if j < n else 1.0j
            dirs.extend([e, -e])
        out = []
        for d in dirs[:starts] if starts < len(dirs) else dirs:
            # march from z along d to this constraint's zero level
            lo, hi = 0.0, 1.0
            val = lambda s: con.value(z + s * d)
            if val(0.0) >= 0:
                continue
            grew = True
            while val(hi) < 0:
                lo, hi = hi, 2 * hi
                if hi > 4 * self.box_radius + 8:
                    grew = False
                    break
            if not grew:
                continue
            for _ in range(60):
                mid = 0.5 * (lo + hi)
                if val(mid) < 0:
                    lo = mid
                else:
                    hi = mid
            out.append(z + 0.5 * (lo + hi) * d)
        return out

    def sample_interior(self, rng, count, radius=0.999):
        out = np.empty((count, self.n), dtype=complex)
        got = 0
        attempts = 0
        while got < count:
            attempts += 1
            if attempts > 2000:
                raise DomainError("interior rejection sampling failed; check constraints")
            m = max(4 * (count - got), 64)
            pts = (rng.uniform(-self.box_radius, self.box_radius, (m, self.n))
                   + 1j * rng.uniform(-self.box_radius, self.box_radius, (m, self.n)))
            keep = pts[self.rho_max_many(pts) < -(1 - radius)]
            take = min(count - got, keep.shape[0])
            out[got : got + take] = keep[:take]
            got += take
        return out

    def to_json(self):
        return {"kind": "convex",
                "constraints": [c.to_json() for c in self.constraints],
                "base_point": cvec_to_json(self.base_point),
                "box_radius": float(self.box_radius)}


def ball_as_convex(n):
    """The unit ball of C^n presented as a smooth convex domain."""
    return ConvexSmooth((EllipsoidConstraint(np.ones(n), np.ones(n)),))


def domain_from_json(obj):
    """Build a domain from its JSON form (see each class's ``to_json``)."""
    if isinstance(obj, str):
        return _domain_from_shorthand(obj)
    kind = obj.get("kind")
    if kind == "disk":
        return UnitDisk()
    if kind == "ball":
        return UnitBall(int(obj["n"]))
    if kind == "polydisk":
        return Polydisk(int(obj["n"]))
    if kind == "euclidean_ball":
        return EuclideanBall(cvec_from_json(obj["center"], "center"), float(obj["radius"]))
    if kind == "halfplane":
        return HalfPlane(cvec_from_json(obj["functional"], "functional"), float(obj["offset"]))
    if kind == "convex":
        cons = tuple(_constraint_from_json(c) for c in obj["constraints"])
        bp = cvec_from_json(obj["base_point"], "base point") if "base_point" in obj else None
        return ConvexSmooth(cons, bp, obj.get("box_radius"))
    raise ParseError(f"unknown domain kind {kind!r}")


def _domain_from_shorthand(text):
    t = text.strip().lower()
    if t == "disk":
        return UnitDisk()
    for prefix, cls in (("ball", UnitBall), ("polydisk", Polydisk)):
        if t == prefix:
            return cls(2)
        if t.startswith(prefix + ":"):
            return cls(int(t.split(":", 1)[1]))
    raise ParseError(f"unknown domain shorthand {text!r}")
