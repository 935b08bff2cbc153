"""Iteration of holomorphic self-maps: orbits, fixed points, Wolff points,
compact-divergence probing, bidisk classification.

The fixed-point machinery follows the contraction device: scaling a self-map
of a bounded convex domain by (1 - 1/nu) toward an interior anchor makes it
a strict contraction whose fixed point is found by Picard iteration; the
anchor-scaled fixed points either stabilize at an interior fixed point of
the original map or drift to the boundary, and in the latter case their
limit along the schedule is the Wolff point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domains import (ConvexSmooth, EuclideanBall, HalfPlane, Polydisk,
                      UnitBall, UnitDisk, as_cvec)
from .errors import DomainError, InternalCheckError, StabilityError
from .geometry import kobayashi_distance
from .maps import Map

OVERFLOW_GAP = 1e-14
SCHEDULE = [2**j for j in range(1, 21)]


@dataclass
class OrbitRecord:
    """Orbit bookkeeping: the k-th entries describe the k-th iterate.

    ``kob_steps[k] = k_D(f^k z0, f^{k+1} z0)`` is nonincreasing in k by the
    distance-decreasing property of holomorphic maps.
    """

    start: np.ndarray
    points: list
    kob_steps: list
    kob_from_start: list
    boundary_gaps: list
    overflow: bool = False


def iterate(m: Map, z0, steps):
    """Run ``steps`` iterations from an interior start, recording invariant
    distances and boundary gaps. Truncates with ``overflow=True`` if the
    orbit's boundary gap falls below the numeric floor."""
    dom = m.domain
    z0 = as_cvec(z0, dom.n)
    if steps < 1:
        raise DomainError("need at least one iteration step")
    if not dom.contains(z0):
        raise DomainError("start point must be interior")
    pts, steps_k, from_start, gaps = [], [], [], []
    prev = z0
    overflow = False
    for _ in range(steps):
        nxt = m(prev)
        gap = dom.boundary_distance(nxt)
        if gap < OVERFLOW_GAP:
            overflow = True
            break
        pts.append(nxt)
        steps_k.append(kobayashi_distance(dom, prev, nxt))
        from_start.append(kobayashi_distance(dom, z0, nxt))
        gaps.append(gap)
        prev = nxt
    return OrbitRecord(z0, pts, steps_k, from_start, gaps, overflow)


# ---------------------------------------------------------------------------
# Fixed points via anchored contractions
# ---------------------------------------------------------------------------

def _domain_anchor(dom):
    if isinstance(dom, (UnitDisk, UnitBall, Polydisk)):
        return np.zeros(dom.n, dtype=complex)
    if isinstance(dom, EuclideanBall):
        return dom.center.copy()
    raise DomainError("fixed-point search needs a bounded convex model domain")


def _picard(func, start, tol=1e-12, maxiter=60000):
    z = start
    for it in range(maxiter):
        nxt = func(z)
        if np.linalg.norm(nxt - z) < tol:
            return nxt, True
        z = nxt
    return z, False


def _newton_fixed_point(func, start, n, tol=1e-12, maxiter=60, fd_step=1e-7):
    """Complex Newton on func(z) - z with a finite-difference Jacobian."""
    z = np.asarray(start, dtype=complex)
    for _ in range(maxiter):
        g = func(z) - z
        if np.linalg.norm(g) < tol:
            return z, True
        jac = np.empty((n, n), dtype=complex)
        for j in range(n):
            dz = np.zeros(n, dtype=complex)
            dz[j] = fd_step
            jac[:, j] = (func(z + dz) - func(z)) / fd_step
        try:
            delta = np.linalg.solve(jac - np.eye(n), -g)
        except np.linalg.LinAlgError:
            return z, False
        if not np.all(np.isfinite(delta)) or np.linalg.norm(delta) > 1e6:
            return z, False
        z = z + delta
    return z, False


def _contraction_path(func, dom, schedule=SCHEDULE):
    """Fixed points of the anchored contractions along the schedule."""
    anchor = _domain_anchor(dom)
    path = []
    w = anchor
    for nu in schedule:
        scaled = lambda z, s=(1.0 - 1.0 / nu): anchor + s * (func(z) - anchor)
        w, _ = _picard(scaled, w)
        path.append(np.asarray(w))
    return path


def _fixed_point_callable(func, dom, schedule=SCHEDULE):
    """Interior fixed point of a self-map given as a callable, or None."""
    anchor = _domain_anchor(dom)
    # the map may fix an interior point already visible from the anchor
    direct = func(anchor)
    if np.linalg.norm(direct - anchor) < 1e-13:
        return anchor
    w = anchor
    tail = []
    for nu in schedule:
        scaled = lambda z, s=(1.0 - 1.0 / nu): anchor + s * (func(z) - anchor)
        w, _ = _picard(scaled, w)
        tail.append(np.asarray(w))
        if nu < 64:
            continue
        # extrapolate and try to polish; a genuine interior fixed point is
        # confirmed by the Newton residual, a boundary drift is rejected.
        # The 1e-6 gate also screens out parabolic boundary points, where the
        # residual vanishes to second order and would fool Newton.
        guess = _aitken_tail(tail)
        if dom.contains(guess) and dom.boundary_distance(guess) > 1e-6:
            cand, ok = _newton_fixed_point(func, guess, dom.n)
            if ok and dom.contains(cand) and dom.boundary_distance(cand) > 1e-6:
                return cand
        if len(tail) >= 3:
            diam = max(np.linalg.norm(a - b) for a in tail[-3:] for b in tail[-3:])
            if diam < 1e-9:
                if dom.boundary_distance(w) >= 1e-6:
                    cand, ok = _newton_fixed_point(func, w, dom.n)
                    if ok:
                        return cand
                    if np.linalg.norm(func(w) - w) < 1e-10:
                        return w
                    raise InternalCheckError(
                        "contraction stabilized interiorly but Newton failed; "
                        "the map may not be a self-map")
                return None  # stabilized against the boundary
    return None


def _aitken_tail(path):
    if len(path) < 3:
        return path[-1]
    a, b, c = path[-3], path[-2], path[-1]
    denom = c - 2 * b + a
    safe = np.abs(denom) > 1e-30
    acc = np.where(safe, c - (c - b) ** 2 / np.where(safe, denom, 1.0), c)
    return acc


def find_fixed_point(m: Map):
    """Interior fixed point of the map, or None when the contraction path
    drifts to the boundary (fixed-point-free dynamics)."""
    return _fixed_point_callable(lambda z: m(z), m.domain)


@dataclass
class WolffPoint:
    point: np.ndarray
    residual: float


def wolff_point(m: Map):
    """Boundary limit of the anchored-contraction fixed-point path.

    Requires fixed-point-free dynamics. The path is accelerated with
    repeated Aitken extrapolation; the reported residual is the diameter of
    the last extrapolants. A raw tail that has not settled within 1e-3 by
    the end of the schedule is an error (no stable candidate).
    """
    if find_fixed_point(m) is not None:
        raise DomainError("map has an interior fixed point; no Wolff point")
    dom = m.domain
    path = _contraction_path(lambda z: m(z), dom)
    # Convergence is judged on the accelerated path: the raw fixed-point path
    # can close in as slowly as 1/sqrt(nu) (parabolic behavior), which the
    # geometric schedule turns into a cleanly extrapolable geometric tail.
    acc = [_aitken_tail(path[: j + 1]) for j in range(2, len(path))]
    tail = acc[-3:]
    residual = float(max(np.linalg.norm(a - b) for a in tail for b in tail))
    if residual > 1e-3:
        raise StabilityError(
            f"no stable Wolff candidate: extrapolated tail diameter {residual:.2e}")
    point = _snap_to_boundary(dom, acc[-1])
    return WolffPoint(point, residual)


def _snap_to_boundary(dom, z):
    z = np.asarray(z, dtype=complex)
    if isinstance(dom, (UnitDisk, UnitBall)):
        nz = np.linalg.norm(z)
        return z / nz if nz > 0 else z
    if isinstance(dom, Polydisk):
        out = z.copy()
        mods = np.abs(out)
        snap = mods > 1 - 1e-9
        out[snap] = out[snap] / mods[snap]
        return out
    return z


# ---------------------------------------------------------------------------
# Divergence probing and target sets
# ---------------------------------------------------------------------------

def _orbit_verdict(rec: OrbitRecord):
    d = np.asarray(rec.kob_from_start)
    gaps = np.asarray(rec.boundary_gaps)
    if len(d) < 10:
        return "undecided"
    tail = max(5, len(d) // 10)
    running_max = np.maximum.accumulate(d)
    if running_max[-1] - running_max[-tail] < 1e-6:
        return "interior-attracted"
    if gaps[-1] < 1e-6 and np.all(np.diff(gaps[-tail:]) <= 1e-12):
        resid = d[-tail:] + 0.5 * np.log(gaps[-tail:])
        if np.max(resid) - np.min(resid) < 2.0:
            return "compactly-divergent"
    return "undecided"


def divergence_probe(m: Map, z0, steps=500):
    """Three-way verdict on the orbit: interior-attracted when the distance
    from the start stays bounded, compactly-divergent when the boundary gap
    decays below 1e-6 with the matching logarithmic distance growth,
    undecided otherwise."""
    if steps < 100:
        raise DomainError("probe needs at least 100 steps")
    return _orbit_verdict(iterate(m, z0, steps))


@dataclass
class TargetSetEstimate:
    clusters: list  # (representative point, multiplicity)
    terminal_segments: dict
    resolution: float
    excluded: list = field(default_factory=list)


def target_set_probe(m: Map, starts, steps=500, resolution=1e-6):
    """Cluster the terminal iterates of compactly divergent orbits.

    Starts whose orbits are not compactly divergent are excluded and
    reported. Clusters are greedy groups of terminal points at the given
    resolution; each cluster representative sits within ``resolution`` of
    the boundary."""
    reps, segments, excluded = [], {}, []
    for idx, start in enumerate(starts):
        rec = iterate(m, start, steps)
        if _orbit_verdict(rec) != "compactly-divergent":
            excluded.append(idx)
            continue
        seg = rec.points[-max(1, len(rec.points) // 10):]
        segments[idx] = seg
        reps.append(np.asarray(seg[-1]))
    clusters = []
    for rep in reps:
        for entry in clusters:
            if np.linalg.norm(entry[0] - rep) <= resolution:
                entry[1] += 1
                break
        else:
            clusters.append([rep, 1])
    return TargetSetEstimate([(c[0], c[1]) for c in clusters], segments,
                             resolution, excluded)


# ---------------------------------------------------------------------------
# Bidisk classification
# ---------------------------------------------------------------------------

@dataclass
class HerveResult:
    case: str            # "i" | "ii" | "iii" | "iv"
    sigma: complex = None
    tau: complex = None
    identity_factor: int = None   # which factor is the identity in case (i)
    slice_fixed_f: list = None
    slice_fixed_g: list = None


_CHEB_SLICES = 0.8 * np.cos(np.pi * (2 * np.arange(17) + 1) / 34)


def _slice_fixed_points(component, other_index, params):
    """Fixed-point presence of the one-variable slices of a bidisk component."""
    disk = UnitDisk()
    out = []
    for c in params:
        if other_index == 1:
            func = lambda z, cc=c: component(np.array([z[0], cc], dtype=complex))[..., :1]
        else:
            func = lambda z, cc=c: component(np.array([cc, z[0]], dtype=complex))[..., :1]
        out.append(_fixed_point_callable(func, disk))
    return out


def _slice_wolff(component, other_index, params):
    disk = UnitDisk()
    pts = []
    for c in params:
        if other_index == 1:
            func = lambda z, cc=c: component(np.array([z[0], cc], dtype=complex))[..., :1]
        else:
            func = lambda z, cc=c: component(np.array([cc, z[0]], dtype=complex))[..., :1]
        path = _contraction_path(func, disk)
        acc = _aitken_tail(path)
        pts.append(complex(acc[0] / abs(acc[0])))
    spread = max(abs(a - b) for a in pts for b in pts)
    if spread > 1e-6:
        raise StabilityError(f"slice Wolff points disagree by {spread:.2e}")
    return pts[0]


def herve_classify(f_component, g_component, slice_params=None):
    """Classify a fixed-point-free bidisk self-map F = (f, g) into the four
    slice-dynamics cases, with the common Wolff points where defined.

    ``f_component`` and ``g_component`` are map nodes with input dimension 2
    and output dimension 1. Mixed per-slice fixed-point results are an error
    (inconclusive sampling)."""
    if f_component.in_dim != 2 or g_component.in_dim != 2:
        raise DomainError("components must read both bidisk coordinates")
    if f_component.out_dim != 1 or g_component.out_dim != 1:
        raise DomainError("components must be scalar-valued")
    from .maps import Product
    full = Map(Product((f_component, g_component)), Polydisk(2))
    if find_fixed_point(full) is not None:
        raise DomainError("map has a fixed point in the bidisk; nothing to classify")
    params = _CHEB_SLICES if slice_params is None else np.asarray(slice_params)

    rng = np.random.default_rng(7)
    probe = Polydisk(2).sample_interior(rng, 100)
    g_is_id = np.max(np.abs(g_component(probe)[:, 0] - probe[:, 1])) < 1e-12
    f_is_id = np.max(np.abs(f_component(probe)[:, 0] - probe[:, 0])) < 1e-12
    if g_is_id:
        sigma = _slice_wolff(f_component, 1, params[:5])
        return HerveResult("i", sigma=sigma, identity_factor=1)
    if f_is_id:
        tau = _slice_wolff(g_component, 0, params[:5])
        return HerveResult("i", tau=tau, identity_factor=0)

    fixed_f = _slice_fixed_points(f_component, 1, params)
    fixed_g = _slice_fixed_points(g_component, 0, params)
    f_has = [p is not None for p in fixed_f]
    g_has = [p is not None for p in fixed_g]
    if len(set(f_has)) > 1 or len(set(g_has)) > 1:
        raise StabilityError(
            f"slice sampling inconclusive: f slices {f_has}, g slices {g_has}")
    f_all, g_all = f_has[0], g_has[0]

    if not f_all and g_all:
        sigma = _slice_wolff(f_component, 1, params[:5])
        return HerveResult("ii", sigma=sigma, slice_fixed_g=fixed_g)
    if f_all and not g_all:
        tau = _slice_wolff(g_component, 0, params[:5])
        return HerveResult("ii", tau=tau, slice_fixed_f=fixed_f)
    if not f_all and not g_all:
        sigma = _slice_wolff(f_component, 1, params[:5])
        tau = _slice_wolff(g_component, 0, params[:5])
        return HerveResult("iii", sigma=sigma, tau=tau)
    # both slice families have interior fixed points yet F is fixed-point
    # free: the iterates converge to a boundary constant
    rec = iterate(full, np.zeros(2, dtype=complex), 4000)
    limit = rec.points[-1]
    return HerveResult("iv", sigma=complex(limit[0]), tau=complex(limit[1]),
                       slice_fixed_f=fixed_f, slice_fixed_g=fixed_g)
