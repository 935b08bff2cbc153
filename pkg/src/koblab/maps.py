"""Composable holomorphic self-maps of model domains.

A map is an expression tree over a few primitives: plane Mobius maps
(including disk automorphisms), ball automorphisms twisted by a unitary,
scalings toward the origin, coordinate selection, products, compositions
and constants. A top-level :class:`Map` carries its declared domain and is
verified to be a self-map on a seeded interior sample at construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domains import as_cvec, cvec_from_json, cvec_to_json, domain_from_json
from .errors import DomainError, ParseError
from .geometry import DiskAutomorphism, ball_automorphism

_SELF_MAP_SAMPLES = 500
_SELF_MAP_SLACK = 1e-12


@dataclass(frozen=True)
class Mobius:
    """zeta -> (a zeta + b) / (c zeta + d) acting on one coordinate."""

    a: complex
    b: complex
    c: complex
    d: complex

    in_dim = 1
    out_dim = 1

    def __call__(self, z):
        zeta = z[..., 0]
        return ((self.a * zeta + self.b) / (self.c * zeta + self.d))[..., None]

    def to_json(self):
        return {"op": "mobius",
                **{k: [getattr(self, k).real, getattr(self, k).imag] for k in "abcd"}}

    @staticmethod
    def from_automorphism(aut: DiskAutomorphism):
        e = np.exp(1j * aut.theta)
        return Mobius(e, -e * aut.pole, -np.conj(aut.pole), 1.0)


@dataclass(frozen=True)
class BallAut:
    """Unitary-twisted ball automorphism: w -> U @ gamma_center(w)."""

    center: np.ndarray
    unitary: np.ndarray

    def __post_init__(self):
        c = as_cvec(self.center)
        u = np.asarray(self.unitary, dtype=complex)
        if u.shape != (c.size, c.size):
            raise DomainError("unitary shape must match the center dimension")
        if not np.allclose(u @ u.conj().T, np.eye(c.size), atol=1e-10):
            raise DomainError("BallAut matrix is not unitary")
        if np.linalg.norm(c) >= 1:
            raise DomainError("BallAut center must be inside the unit ball")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "unitary", u)

    @property
    def in_dim(self):
        return self.center.size

    @property
    def out_dim(self):
        return self.center.size

    def __call__(self, z):
        flat = z.reshape(-1, self.in_dim)
        out = np.stack([self.unitary @ ball_automorphism(self.center, row) for row in flat])
        return out.reshape(z.shape)

    def to_json(self):
        return {"op": "ball_aut", "center": cvec_to_json(self.center),
                "unitary": [cvec_to_json(row) for row in self.unitary]}


@dataclass(frozen=True)
class Scale:
    """z -> s * inner(z) with s in (0, 1]."""

    s: float
    inner: object

    def __post_init__(self):
        if not (0 < self.s <= 1):
            raise DomainError("scale factor must lie in (0, 1]")

    @property
    def in_dim(self):
        return self.inner.in_dim

    @property
    def out_dim(self):
        return self.inner.out_dim

    def __call__(self, z):
        return self.s * self.inner(z)

    def to_json(self):
        return {"op": "scale", "s": self.s, "inner": self.inner.to_json()}


@dataclass(frozen=True)
class Select:
    """Coordinate wiring: pick input coordinates by index (swap, project)."""

    indices: tuple
    in_dim: int

    @property
    def out_dim(self):
        return len(self.indices)

    def __call__(self, z):
        return z[..., list(self.indices)]

    def to_json(self):
        return {"op": "select", "indices": list(self.indices), "n": self.in_dim}


@dataclass(frozen=True)
class Product:
    """Concatenate component outputs; each component reads the full input."""

    components: tuple

    @property
    def in_dim(self):
        return self.components[0].in_dim

    @property
    def out_dim(self):
        return sum(c.out_dim for c in self.components)

    def __post_init__(self):
        dims = {c.in_dim for c in self.components}
        if len(dims) != 1:
            raise DomainError("product components must share the input dimension")

    def __call__(self, z):
        return np.concatenate([c(z) for c in self.components], axis=-1)

    def to_json(self):
        return {"op": "product", "components": [c.to_json() for c in self.components]}


@dataclass(frozen=True)
class Compose:
    outer: object
    inner: object

    def __post_init__(self):
        if self.outer.in_dim != self.inner.out_dim:
            raise DomainError("composition dimensions do not match")

    @property
    def in_dim(self):
        return self.inner.in_dim

    @property
    def out_dim(self):
        return self.outer.out_dim

    def __call__(self, z):
        return self.outer(self.inner(z))

    def to_json(self):
        return {"op": "compose", "outer": self.outer.to_json(), "inner": self.inner.to_json()}


@dataclass(frozen=True)
class Const:
    point: np.ndarray
    in_dim: int

    def __post_init__(self):
        object.__setattr__(self, "point", as_cvec(self.point))

    @property
    def out_dim(self):
        return self.point.size

    def __call__(self, z):
        shape = z.shape[:-1] + (self.point.size,)
        return np.broadcast_to(self.point, shape).copy()

    def to_json(self):
        return {"op": "const", "point": cvec_to_json(self.point), "n": self.in_dim}


@dataclass
class Map:
    """A verified holomorphic self-map of a declared domain."""

    root: object
    domain: object
    verified: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.root.in_dim != self.domain.n or self.root.out_dim != self.domain.n:
            raise DomainError(
                f"map dims {self.root.in_dim}->{self.root.out_dim} do not fit "
                f"a domain of dimension {self.domain.n}")
        self.verify()

    def verify(self, samples=_SELF_MAP_SAMPLES, seed=20240501):
        rng = np.random.default_rng(seed)
        pts = self.domain.sample_interior(rng, samples)
        img = self.root(pts)
        for row in img:
            if not self.domain.contains(row, tol=_SELF_MAP_SLACK):
                raise DomainError(
                    f"not a self-map: image point {row} leaves the domain")
        self.verified = True

    def __call__(self, z):
        return self.root(np.asarray(z, dtype=complex))

    def apply_scalar(self, zeta):
        """Convenience for one-dimensional maps on plain complex numbers."""
        return complex(self.root(np.array([zeta], dtype=complex))[0])

    def to_json(self):
        return {"map": self.root.to_json(), "domain": self.domain.to_json()}


def hyperbolic_mobius(a):
    """(zeta + a)/(1 + conj(a) zeta): the disk automorphism pushing toward a/|a|."""
    a = complex(a)
    if abs(a) >= 1:
        raise DomainError("mobius parameter must lie in the unit disk")
    return Mobius(1.0, a, np.conj(a), 1.0)


def rotation(theta):
    return Mobius(np.exp(1j * float(theta)), 0.0, 0.0, 1.0)


def node_from_json(obj, n_hint=None):
    op = obj.get("op")
    if op == "mobius":
        vals = {k: complex(obj[k][0], obj[k][1]) for k in "abcd"}
        return Mobius(**vals)
    if op == "ball_aut":
        return BallAut(cvec_from_json(obj["center"], "center"),
                       np.array([[complex(re, im) for re, im in row] for row in obj["unitary"]]))
    if op == "scale":
        return Scale(float(obj["s"]), node_from_json(obj["inner"], n_hint))
    if op == "select":
        return Select(tuple(obj["indices"]), int(obj.get("n", n_hint or 0)))
    if op == "product":
        return Product(tuple(node_from_json(c, n_hint) for c in obj["components"]))
    if op == "compose":
        inner = node_from_json(obj["inner"], n_hint)
        return Compose(node_from_json(obj["outer"], inner.out_dim), inner)
    if op == "const":
        return Const(cvec_from_json(obj["point"], "const point"), int(obj.get("n", n_hint or 1)))
    raise ParseError(f"unknown map op {op!r}")


def map_from_json(obj):
    if "map" not in obj or "domain" not in obj:
        raise ParseError("map JSON needs 'map' and 'domain' entries")
    domain = domain_from_json(obj["domain"])
    return Map(node_from_json(obj["map"], domain.n), domain)
