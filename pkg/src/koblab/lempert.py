"""Certified two-sided estimation of the invariant distance on smooth convex domains.

On a convex domain the Kobayashi distance equals the one-disc infimum, so an
admissible analytic disc through two points certifies an upper bound while a
holomorphic projection to a supporting half-plane certifies a lower bound.
Discs are truncated power series with prescribed endpoints; for a fixed disc
parameter ``t`` the admissibility problem is convex in the free coefficients
and is solved exactly, with bisection on ``t`` (feasibility is monotone in
``t``: precomposing with ``zeta -> (t/t') zeta`` keeps the image inside).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import cvxpy as cp
import numpy as np

from .domains import ConvexSmooth, EllipsoidConstraint, HalfspaceConstraint, as_cvec, cvec_to_json
from .errors import DomainError, InternalCheckError, StabilityError
from .geometry import _halfplane_distance, poincare_distance

MARGIN = 1e-6
OPT_SAMPLES = 128
VERIFY_SAMPLES = 1024


# ---------------------------------------------------------------------------
# Supporting functionals and weak peak functions
# ---------------------------------------------------------------------------

@dataclass
class SupportData:
    """A complex supporting functional at a boundary point with its peak function.

    ``functional`` acts by ``L(z) = <z, functional>``; the associated weak
    peak function is ``psi(z) = 1 / (1 - (L(z) - L(x)))``: unimodular exactly
    at the contact point, strictly smaller inside.
    """

    boundary_point: np.ndarray
    functional: np.ndarray
    nonunique: bool = False

    def pairing(self, z):
        return np.dot(np.asarray(z, dtype=complex), np.conj(self.functional))

    def peak(self, z):
        return 1.0 / (1.0 - (self.pairing(z) - self.pairing(self.boundary_point)))


def supporting_functional(dom: ConvexSmooth, x, check_samples=100, seed=0):
    """Supporting functional at a boundary point of a smooth convex domain.

    The functional is the complex-linear part of the active constraint
    gradient, normalized to unit norm. When several constraints are active
    the one with the largest gradient is used and the result is flagged
    nonunique.
    """
    x = as_cvec(x, dom.n)
    vals = [c.value(x) for c in dom.constraints]
    active = [i for i, v in enumerate(vals) if abs(v) < 1e-10]
    if not active:
        raise DomainError("point is not on the boundary (no active constraint)")
    grads = [dom.constraints[i].cgrad(x) for i in active]
    norms = [np.linalg.norm(g) for g in grads]
    pick = int(np.argmax(norms))
    if norms[pick] == 0:
        raise DomainError("active constraint has vanishing gradient")
    data = SupportData(x, grads[pick] / norms[pick], nonunique=len(active) > 1)

    rng = np.random.default_rng(seed)
    sample = dom.sample_interior(rng, check_samples)
    lx = data.pairing(x).real
    for z in sample:
        if not data.pairing(z).real < lx:
            raise InternalCheckError("supporting functional fails Re L(z) < Re L(x) on sample")
        if not abs(data.peak(z)) < 1.0:
            raise InternalCheckError("weak peak function reached modulus 1 at an interior sample")
    return data


# ---------------------------------------------------------------------------
# Planar slice upper bound
# ---------------------------------------------------------------------------

def _slice_polygon(dom: ConvexSmooth, z, w, directions=256):
    """Vertices of an inscribed polygon of the planar slice
    ``{lam : (1-lam) z + lam w in D}``, traced from the midpoint 0.5."""
    point = lambda lam: z + lam * (w - z)
    if not (dom.contains(point(0.0)) and dom.contains(point(1.0))):
        raise DomainError("slice endpoints must be interior")
    center = 0.5
    verts = np.empty(directions, dtype=complex)
    for k in range(directions):
        u = np.exp(2j * np.pi * k / directions)
        lo, hi = 0.0, 1.0
        while dom.rho_max(point(center + hi * u)) < 0:
            lo, hi = hi, 2 * hi
            if hi > 1e7:
                raise StabilityError("slice ray never exits the domain")
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if dom.rho_max(point(center + mid * u)) < 0:
                lo = mid
            else:
                hi = mid
        verts[k] = center + 0.5 * (lo + hi) * u
    return verts


def _polygon_inradius(verts, c):
    """Distance from c to the polygon boundary (min over edge segments).

    The polygon is inscribed in the convex slice, so a disk of this radius
    about an interior c is certified inside the slice.
    """
    a = verts
    b = np.roll(verts, -1)
    ab = b - a
    denom = np.abs(ab) ** 2
    t = np.clip(((c - a) * np.conj(ab)).real / np.where(denom > 0, denom, 1.0), 0.0, 1.0)
    proj = a + t * ab
    return float(np.min(np.abs(proj - c)))


def _disk_k01(c, rho):
    """Invariant distance between 0 and 1 inside the Euclidean disk (c, rho);
    +inf when the disk does not contain both points."""
    if rho <= 0 or abs(c) >= rho or abs(1.0 - c) >= rho:
        return math.inf
    return poincare_distance(-c / rho, (1.0 - c) / rho)


def slice_upper_bound(dom: ConvexSmooth, z, w, directions=256):
    """Upper bound for the invariant distance via the best round sub-disk of
    the planar slice through the two points.

    Any Euclidean disk inside the slice containing the slice parameters
    0 and 1 dominates the distance by inclusion monotonicity.
    """
    z = as_cvec(z, dom.n)
    w = as_cvec(w, dom.n)
    if np.allclose(z, w, atol=0, rtol=0) or np.linalg.norm(z - w) == 0:
        return 0.0
    verts = _slice_polygon(dom, z, w, directions)

    def objective(c):
        rho = _polygon_inradius(verts, c)
        return _disk_k01(c, rho)

    # candidates: perpendicular bisector of [0,1] plus a coarse grid over the slice
    spread = float(np.max(np.abs(verts - 0.5)))
    cands = [0.5 + 1j * s * spread for s in np.linspace(-1, 1, 41)]
    gx = np.linspace(-spread, spread, 21)
    cands += [0.5 + a + 1j * b for a in gx for b in gx]
    best_c, best_k = None, math.inf
    for c in cands:
        k = objective(c)
        if k < best_k:
            best_c, best_k = c, k
    if best_c is None or not math.isfinite(best_k):
        raise StabilityError(
            "slice search failure: no inscribed disk contains both endpoints "
            f"(slice spread {spread:.3g})")
    # local refinement
    from scipy.optimize import minimize
    res = minimize(lambda p: min(objective(p[0] + 1j * p[1]), 1e9),
                   [best_c.real, best_c.imag], method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 400})
    refined = res.x[0] + 1j * res.x[1]
    k_ref = objective(refined)
    return float(min(best_k, k_ref))


# ---------------------------------------------------------------------------
# Half-plane lower bound
# ---------------------------------------------------------------------------

def halfplane_lower_bound(dom: ConvexSmooth, z, w, extra_directions=16, seed=0):
    """Lower bound via supporting half-planes: for each candidate boundary
    point the functional maps the domain into a half-plane, where the
    distance of the images is computed exactly. Maximum over candidates;
    adding candidates never decreases the bound."""
    z = as_cvec(z, dom.n)
    w = as_cvec(w, dom.n)
    if not (dom.contains(z) and dom.contains(w)):
        raise DomainError("points must be interior")
    if np.linalg.norm(z - w) == 0:
        return 0.0
    candidates = [dom.boundary_point_on_ray(z, w - z),
                  dom.boundary_point_on_ray(w, z - w)]
    rng = np.random.default_rng(seed)
    mid = 0.5 * (z + w)
    for _ in range(extra_directions):
        u = rng.standard_normal(dom.n) + 1j * rng.standard_normal(dom.n)
        candidates.append(dom.boundary_point_on_ray(mid, u / np.linalg.norm(u)))
    best = 0.0
    for x in candidates:
        vals = [c.value(x) for c in dom.constraints]
        i = int(np.argmax(vals))
        g = dom.constraints[i].cgrad(x)
        gn = np.linalg.norm(g)
        if gn == 0:
            continue
        lhat = g / gn
        cut = np.dot(x, np.conj(lhat)).real
        lz = complex(np.dot(z, np.conj(lhat)))
        lw = complex(np.dot(w, np.conj(lhat)))
        if lz.real >= cut or lw.real >= cut:
            continue  # grazing contact, numerically outside the half-plane
        best = max(best, _halfplane_distance(lz, lw, cut))
    return best


# ---------------------------------------------------------------------------
# Analytic discs and the certified estimate
# ---------------------------------------------------------------------------

@dataclass
class AnalyticDisc:
    """Truncated power series ``phi(zeta) = sum a_k zeta^k`` mapping the unit
    disk into the target domain, with ``phi(0)`` and ``phi(t)`` pinned to the
    estimated pair. ``margin`` is ``min over boundary samples of -rho``
    (positive for an admissible disc)."""

    degree: int
    coeffs: np.ndarray  # (degree+1, n)
    t: float
    margin: float = math.nan

    def __call__(self, zeta):
        zeta = np.asarray(zeta, dtype=complex)
        pows = zeta[..., None] ** np.arange(self.degree + 1)
        return pows @ self.coeffs

    def endpoint_residual(self, z, w):
        return max(float(np.linalg.norm(self(np.array(0j)) - z)),
                   float(np.linalg.norm(self(np.array(self.t + 0j)) - w)))

    def to_json(self):
        return {"degree": self.degree,
                "coeffs": [cvec_to_json(row) for row in self.coeffs],
                "t": float(self.t)}


@dataclass
class LempertEstimate:
    lower: float
    upper: float
    witness: AnalyticDisc
    iterations: int
    degenerate: bool = False


class _DiscProblem:
    """Convex admissibility subproblem at fixed t, rebuilt cheaply via a parameter.

    Minimizes the worst constraint value over boundary samples subject to
    the two endpoint interpolation conditions; the disc is admissible with
    the safety margin iff the optimum is <= -margin.
    """

    def __init__(self, dom: ConvexSmooth, z, w, degree, samples=OPT_SAMPLES):
        self.dom, self.z, self.w, self.degree = dom, z, w, degree
        ang = np.exp(2j * np.pi * np.arange(samples) / samples)
        self.pow_matrix = np.stack([ang**k for k in range(degree + 1)], axis=1)
        self.a = cp.Variable((degree + 1, dom.n), complex=True)
        self.s = cp.Variable()
        self.t_pows = cp.Parameter(degree + 1, complex=True)
        vals = self.pow_matrix @ self.a
        cons = [self.a[0, :] == z, self.t_pows @ self.a == w]
        for c in dom.constraints:
            if isinstance(c, EllipsoidConstraint):
                terms = [c.coeffs[j] * cp.power(cp.abs(vals[:, j]), 2 * c.powers[j])
                         for j in range(dom.n)]
                cons.append(sum(terms) - 1.0 <= self.s)
            elif isinstance(c, HalfspaceConstraint):
                cons.append(cp.real(vals @ np.conj(c.normal)) - c.offset <= self.s)
            else:
                raise DomainError(f"no convex model for constraint {type(c).__name__}")
        self.problem = cp.Problem(cp.Minimize(self.s), cons)

    def solve(self, t):
        self.t_pows.value = np.array([t**k for k in range(self.degree + 1)], dtype=complex)
        with warnings.catch_warnings():
            # near-threshold t can end CLARABEL in "optimal_inaccurate"; the
            # a-posteriori margin check below decides admissibility anyway
            warnings.simplefilter("ignore", UserWarning)
            self.problem.solve(solver=cp.CLARABEL)
        if self.problem.status not in ("optimal", "optimal_inaccurate"):
            raise StabilityError(f"disc subproblem returned status {self.problem.status}")
        return float(self.s.value), np.array(self.a.value, dtype=complex)


def _verified_margin(dom, disc, samples=VERIFY_SAMPLES):
    ang = np.exp(2j * np.pi * np.arange(samples) / samples)
    pts = disc(ang)
    return float(-np.max(dom.rho_max_many(pts)))


def _affine_disc(z, w, t, dom=None):
    coeffs = np.stack([z, (w - z) / t])
    disc = AnalyticDisc(1, coeffs, t)
    if dom is not None:
        disc.margin = _verified_margin(dom, disc)
    return disc


ACCEPT_MARGIN = MARGIN / 2  # admissibility cut on the verified fine-sample margin


def _affine_min_t(dom, z, w):
    """Smallest t with the straight disc admissible, or None."""
    feas = lambda t: _verified_margin(dom, _affine_disc(z, w, t)) > ACCEPT_MARGIN
    hi = 1.0 - 1e-9
    if not feas(hi):
        return None
    lo = float(np.linalg.norm(w - z) / (np.linalg.norm(w - z) + 2 * dom.box_radius))
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        if feas(mid):
            hi = mid
        else:
            lo = mid
    return hi


def estimate_lempert(dom: ConvexSmooth, z, w, degree=4, budget=60, t_upper_hint=None):
    """Two-sided invariant-distance estimate with a certified disc witness.

    Upper bound: bisection on the disc parameter ``t`` of the smallest
    admissible truncated-series disc through the pair (convex subproblem per
    ``t``), verified a posteriori on a finer boundary sample. Lower bound:
    the best supporting half-plane projection. ``budget`` caps the number of
    convex solves. ``t_upper_hint``, when given and verified admissible,
    seeds the upper bracket (useful for degree ladders).
    """
    z = as_cvec(z, dom.n)
    w = as_cvec(w, dom.n)
    if degree < 1 or budget < 1:
        raise DomainError("degree and budget must be >= 1")
    if not (dom.contains(z) and dom.contains(w)):
        raise DomainError("points must be interior")
    if np.linalg.norm(z - w) == 0:
        disc = AnalyticDisc(max(degree, 1), np.vstack([z[None, :]] + [np.zeros((degree, dom.n))]), 0.5)
        disc.margin = _verified_margin(dom, disc)
        return LempertEstimate(0.0, 0.0, disc, 0)

    lower = halfplane_lower_bound(dom, z, w)
    iterations = 0

    # establish a verified-admissible upper bracket
    best = None  # (t, disc)
    t_aff = _affine_min_t(dom, z, w)
    if t_aff is not None:
        best = (t_aff, _affine_disc(z, w, t_aff, dom))

    prob = _DiscProblem(dom, z, w, degree) if degree >= 2 else None

    def admissible(t):
        # accepted solely on the fine-sample verified margin, so that all
        # degrees and the affine path share one admissibility notion
        nonlocal iterations
        if degree == 1:
            disc = _affine_disc(z, w, t, dom)
            return (disc.margin > ACCEPT_MARGIN), disc
        iterations += 1
        _, coeffs = prob.solve(t)
        disc = AnalyticDisc(degree, coeffs, t)
        disc.margin = _verified_margin(dom, disc)
        return (disc.margin > ACCEPT_MARGIN), disc

    for t_try in ([t_upper_hint] if t_upper_hint else []):
        ok, disc = admissible(t_try)
        if ok and (best is None or t_try < best[0]):
            best = (t_try, disc)

    if best is None and degree >= 2:
        for t_try in (0.9, 0.99, 1 - 1e-6):
            if iterations >= budget:
                break
            ok, disc = admissible(t_try)
            if ok:
                best = (t_try, disc)
                break

    if best is None:
        # no admissible disc found at this degree: fall back to the slice
        # bound; when even the slice has no usable inscribed disk, report an
        # uncertified (infinite) upper bound rather than failing
        try:
            upper = slice_upper_bound(dom, z, w)
        except StabilityError:
            upper = math.inf
        witness = _affine_disc(z, w, max(math.tanh(min(upper, 20.0)), 1e-6), dom)
        if upper < lower - 1e-7:
            raise InternalCheckError("slice upper bound fell below the half-plane lower bound")
        return LempertEstimate(lower, max(upper, lower), witness, iterations, degenerate=True)

    lo = math.tanh(lower)
    hi, hi_disc = best
    while hi - lo > 1e-8 and iterations < budget:
        mid = 0.5 * (lo + hi)
        ok, disc = admissible(mid)
        if ok:
            hi, hi_disc = mid, disc
        else:
            lo = mid

    upper = math.atanh(min(hi, 1 - 1e-15))
    if upper < lower - 1e-7:
        raise InternalCheckError(
            f"inconsistent bounds: upper {upper} < lower {lower}; "
            "feasibility verification is broken")
    upper = max(upper, lower)
    return LempertEstimate(lower, upper, hi_disc, iterations)


# ---------------------------------------------------------------------------
# Certified Kobayashi-ball sampling
# ---------------------------------------------------------------------------

@dataclass
class CertifiedBallSample:
    inside: list
    outside: list
    complete: bool


def kobayashi_ball_sample(dom: ConvexSmooth, z0, r, count, degree=2, budget=40, seed=0):
    """Points certified inside (upper bound < r) and outside (lower bound > r)
    the invariant ball around ``z0``. Partial results set ``complete=False``."""
    z0 = as_cvec(z0, dom.n)
    if r <= 0:
        raise DomainError("radius must be positive")
    rng = np.random.default_rng(seed)
    inside, outside = [], []
    attempts = 0
    max_attempts = 30 * count
    while (len(inside) < count or len(outside) < count) and attempts < max_attempts:
        attempts += 1
        want_inside = len(inside) < count
        if want_inside:
            probe = z0 + (math.tanh(r) * 0.8 * rng.random()) * _random_ball_step(dom, z0, rng)
        else:
            x = dom.boundary_point_on_ray(z0, _random_ball_step(dom, z0, rng))
            probe = z0 + (1 - 10.0 ** -rng.uniform(1.5, 3)) * (x - z0)
        if not dom.contains(probe):
            continue
        est = estimate_lempert(dom, z0, probe, degree=degree, budget=budget)
        if est.upper < r and want_inside:
            inside.append(np.asarray(probe))
        elif est.lower > r and len(outside) < count:
            outside.append(np.asarray(probe))
    return CertifiedBallSample(inside, outside,
                               complete=(len(inside) >= count and len(outside) >= count))


def _random_ball_step(dom, z0, rng):
    u = rng.standard_normal(dom.n) + 1j * rng.standard_normal(dom.n)
    u /= np.linalg.norm(u)
    x = dom.boundary_point_on_ray(z0, u)
    return (x - z0)
