"""Admissibility cones, dual cones, frames, and the gauge function.

For d = 2 a cone of admissible directions is an exact angular sector located
by bisection on the chord admissibility predicate.  For d >= 3 the cone is a
polyhedral approximation hulled from a quasi-uniform direction sample.  The
dual cone carries the working frame: an interior axis W, a supporting
functional lam in the primal cone, an orthonormal basis H of the complement
of W, and the piecewise-linear gauge whose epigraph is the dual cone in the
(y, r) coordinates of the splitting R^d = H + R*W.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import TrivialCone
from .fluxes import ShockPair, oleinik_admissible

__all__ = [
    "AdmissibleCone",
    "DualCone",
    "admissible_cone",
    "sector_cone",
    "dual_cone",
    "dual_cone_from_flux",
    "gauge_value",
    "cone_contains",
]

TWO_PI = 2.0 * np.pi


def _unit(theta):
    return np.array([np.cos(theta), np.sin(theta)])


def _wrap(a):
    """Wrap angles to (-pi, pi]."""
    return np.pi - np.mod(np.pi - np.asarray(a), TWO_PI)


@dataclass(frozen=True, eq=False)
class AdmissibleCone:
    """Closed convex cone of chord-admissible directions.

    d = 2: the sector [theta1, theta2] in radians (width < pi).
    d >= 3: sampled admissible unit directions plus the hull's extreme rays.
    """

    d: int
    pair: ShockPair | None
    sector: tuple[float, float] | None = None
    directions: np.ndarray | None = None
    generators: np.ndarray | None = None
    dual_generators: np.ndarray | None = None
    trivial: bool = False

    @property
    def width(self) -> float:
        if self.sector is None:
            return float("nan")
        return self.sector[1] - self.sector[0]

    @property
    def degenerate_ray(self) -> bool:
        return self.sector is not None and self.width == 0.0


def sector_cone(theta1: float, theta2: float, pair: ShockPair | None = None) -> AdmissibleCone:
    """Directly specified planar sector; theta2 >= theta1, width < pi."""
    if theta2 < theta1:
        raise ValueError("need theta1 <= theta2")
    if theta2 - theta1 >= np.pi:
        raise ValueError("a cone of admissible directions cannot contain a line")
    gens = np.stack([_unit(theta1), _unit(theta2)])
    dual = np.stack([_unit(theta2 - np.pi / 2), _unit(theta1 + np.pi / 2)])
    return AdmissibleCone(2, pair, sector=(float(theta1), float(theta2)),
                          generators=gens, dual_generators=dual)


def _fibonacci_sphere(n: int) -> np.ndarray:
    """Quasi-uniform unit directions on S^2."""
    k = np.arange(n) + 0.5
    phi = np.arccos(1.0 - 2.0 * k / n)
    theta = np.pi * (1.0 + np.sqrt(5.0)) * k
    return np.stack([np.sin(phi) * np.cos(theta), np.sin(phi) * np.sin(theta), np.cos(phi)], axis=1)


def _extreme_rays(vectors: np.ndarray) -> np.ndarray:
    """Extreme rays of the cone spanned by the rows (pointed cone assumed)."""
    from scipy.spatial import ConvexHull

    pts = vectors / np.linalg.norm(vectors, axis=1, keepdims=True)
    pts = np.vstack([pts, np.zeros(pts.shape[1])])
    hull = ConvexHull(pts, qhull_options="QJ")
    idx = [i for i in hull.vertices if i != len(pts) - 1]
    return pts[idx]


def admissible_cone(pair: ShockPair, resolution: float = 1e-4, n_scan: int = 1024) -> AdmissibleCone:
    """Locate the admissibility cone of a shock pair.

    d = 2: circular scan for an admissible seed, then bisection of the two
    boundary angles down to `resolution` radians.  d >= 3: admissibility test
    on a quasi-uniform direction grid sized from `resolution` as an angular
    spacing, hulled into a polyhedral cone.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    if pair.d == 2:
        return _admissible_cone_2d(pair, resolution, n_scan)
    return _admissible_cone_nd(pair, resolution)


def _admissible_cone_2d(pair: ShockPair, resolution: float, n_scan: int) -> AdmissibleCone:
    # exact excess maximization keeps the predicate sharp enough for deep bisection
    def adm(theta: float) -> bool:
        return oleinik_admissible(pair, _unit(theta), exact=True).admissible

    thetas = np.linspace(-np.pi, np.pi, n_scan, endpoint=False)
    mask = np.array([adm(t) for t in thetas])
    if not mask.any():
        return AdmissibleCone(2, pair, trivial=True)
    if mask.all():
        raise ValueError("every sampled direction is admissible; flux violates non-degeneracy")

    # longest circular run of admissible samples
    idx = np.arange(n_scan)
    runs = []
    in_run = False
    for i in np.concatenate([idx, idx]):
        if mask[i] and not in_run:
            start = i
            in_run = True
        elif not mask[i] and in_run:
            runs.append((start, i))
            in_run = False
    runs = [(s, e) for s, e in runs]
    start, end = max(runs, key=lambda r: (r[1] - r[0]) % n_scan)

    def bisect(theta_in: float, theta_out: float) -> float:
        while abs(theta_out - theta_in) > resolution:
            mid = 0.5 * (theta_in + theta_out)
            if adm(mid):
                theta_in = mid
            else:
                theta_out = mid
        return 0.5 * (theta_in + theta_out)

    step = TWO_PI / n_scan
    lo_in = thetas[start % n_scan]
    hi_in = lo_in + step * ((end - 1 - start) % n_scan)
    theta1 = bisect(lo_in, lo_in - step)
    theta2 = bisect(hi_in, hi_in + step)
    if theta2 < theta1:
        theta2 += TWO_PI
    theta2 = theta1 + min(theta2 - theta1, np.pi * (1 - 1e-12))
    return sector_cone(theta1, theta2, pair)


def _admissible_cone_nd(pair: ShockPair, resolution: float) -> AdmissibleCone:
    if pair.d != 3:
        raise NotImplementedError("direction sampling implemented for d in {2, 3}")
    n = int(np.clip(4.0 * np.pi / resolution**2, 256, 4096))
    dirs = _fibonacci_sphere(n)
    mask = np.array([oleinik_admissible(pair, x).admissible for x in dirs])
    if not mask.any():
        return AdmissibleCone(3, pair, trivial=True)
    adm = dirs[mask]
    gens = _extreme_rays(adm) if len(adm) >= 3 else adm
    dual_gens = _dual_generators_nd(gens)
    return AdmissibleCone(3, pair, directions=adm, generators=gens, dual_generators=dual_gens)


def _interior_direction(generators: np.ndarray, n_probe: int = 4096) -> np.ndarray:
    """Direction maximizing the worst inner product with the given rays."""
    d = generators.shape[1]
    if d == 3:
        probes = np.vstack([_fibonacci_sphere(n_probe), generators])
    else:
        probes = generators
    probes = probes / np.linalg.norm(probes, axis=1, keepdims=True)
    score = (probes @ generators.T).min(axis=1)
    return probes[int(np.argmax(score))]


def _dual_generators_nd(primal_gens: np.ndarray) -> np.ndarray:
    """Extreme rays of {n : n.g >= 0 for all g} via a bounded slice.

    The dual cone is sliced by {x : w.x = 1} with w the mean of the (unit)
    generators: the slice is bounded exactly when w is interior to the cone
    the generators span, which the mean of a pointed generator set is.
    """
    from scipy.spatial import HalfspaceIntersection

    d = primal_gens.shape[1]
    units = primal_gens / np.linalg.norm(primal_gens, axis=1, keepdims=True)
    w = units.mean(axis=0)
    norm = np.linalg.norm(w)
    if norm <= 1e-12:
        raise TrivialCone("generator set is not pointed; dual rays are undefined")
    w = w / norm
    q, _ = np.linalg.qr(np.column_stack([w, np.eye(d)[:, :-1]]))
    basis = q[:, 1:]  # orthonormal complement of w
    x0 = w / np.dot(w, w)
    # halfspaces g.(x0 + basis z) >= 0  ->  (-g.basis) z <= g.x0
    a = -(primal_gens @ basis)
    b = primal_gens @ x0
    if np.any(b <= 0):
        raise TrivialCone("generator spread exceeds a halfspace; slice axis infeasible")
    hs = HalfspaceIntersection(np.column_stack([a, -b]), np.zeros(d - 1))
    rays = hs.intersections @ basis.T + x0
    rays = rays / np.linalg.norm(rays, axis=1, keepdims=True)
    return _extreme_rays(rays) if len(rays) >= d else rays


@dataclass(frozen=True, eq=False)
class DualCone:
    """Dual cone with its frame and gauge.

    generators: unit extreme rays of the dual cone.
    W: unit interior axis; lam: unit supporting direction in the primal cone.
    H: (d, d-1) orthonormal basis of the complement of W.
    facet_slopes: rows c_i with gauge(y) = max_i c_i . y; one row per primal
    generator xi, c_i = -(H^T xi)/(xi . W).
    """

    d: int
    generators: np.ndarray
    W: np.ndarray
    lam: np.ndarray
    H: np.ndarray
    facet_slopes: np.ndarray
    primal_generators: np.ndarray
    degenerate: bool = False

    def coords(self, x) -> tuple[np.ndarray, np.ndarray]:
        """Split x = y + r W into (r, y-coordinates)."""
        x = np.asarray(x, dtype=float)
        return x @ self.W, x @ self.H

    def point(self, r, y) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if y.shape[-1] != self.d - 1:
            y = y[..., None]
        return np.multiply.outer(r, self.W) + y @ self.H.T

    def gauge(self, y) -> np.ndarray:
        return gauge_value(self, y)

    def same_frame(self, other: "DualCone", tol: float = 1e-9) -> bool:
        return (
            self.d == other.d
            and np.max(np.abs(self.W - other.W)) <= tol
            and np.max(np.abs(self.H - other.H)) <= tol
        )


def _complement_basis(w: np.ndarray) -> np.ndarray:
    d = len(w)
    if d == 2:
        return np.array([[-w[1]], [w[0]]])
    q, _ = np.linalg.qr(np.column_stack([w, np.eye(d)[:, : d - 1]]))
    basis = q[:, 1:]
    # fix signs for determinism
    for j in range(basis.shape[1]):
        k = int(np.argmax(np.abs(basis[:, j])))
        if basis[k, j] < 0:
            basis[:, j] = -basis[:, j]
    return basis


def _frame(dual_gens: np.ndarray, primal_gens: np.ndarray, lam: np.ndarray,
           degenerate: bool = False, w: np.ndarray | None = None) -> DualCone:
    d = dual_gens.shape[1]
    if w is None:
        w = dual_gens.sum(axis=0)
        norm = np.linalg.norm(w)
        if norm == 0:
            raise TrivialCone("dual generators cancel; no interior axis")
        w = w / norm
    wg = primal_gens @ w
    if not degenerate and np.any(wg <= -1e-9):
        raise TrivialCone("axis candidate is not interior to the dual cone")
    basis = _complement_basis(w)
    denom = np.where(np.abs(wg) <= 1e-12, 1.0, wg)
    slopes = -(primal_gens @ basis) / denom[:, None]
    return DualCone(d, dual_gens, w, lam, basis, slopes, primal_gens, degenerate)


def dual_cone(cone: AdmissibleCone) -> DualCone:
    """Dual of the admissibility cone, with frame and gauge attached."""
    if cone.trivial:
        raise TrivialCone("admissible cone is {0}")
    if cone.d == 2:
        t1, t2 = cone.sector
        if cone.degenerate_ray:
            # dual of a single ray is the halfspace {n . lam >= 0}; the only
            # canonical axis is lam itself (flagged: no interior theory here)
            lam = _unit(t1)
            gens = np.stack([_unit(t1 - np.pi / 2), _unit(t1 + np.pi / 2)])
            return _frame(gens, lam[None, :], lam, degenerate=True, w=lam)
        gens = np.stack([_unit(t2 - np.pi / 2), _unit(t1 + np.pi / 2)])
        lam = _unit(0.5 * (t1 + t2))  # Chebyshev pick: bisector maximizes the margin
        primal = np.stack([_unit(t1), _unit(t2)])
        return _frame(gens, primal, lam)
    gens = cone.dual_generators
    if gens is None:
        gens = _dual_generators_nd(cone.generators)
    lam = _interior_direction(gens)  # in (A dual) dual = primal hull
    return _frame(gens, cone.generators, lam)


def dual_cone_from_flux(pair: ShockPair, n_samples: int = 512) -> DualCone:
    """Dual cone spanned directly by the chords f_bar - F(s), s in [u_plus, u_minus]."""
    if n_samples < 2:
        raise ValueError("n_samples must be >= 2")
    # Chebyshev nodes: the chord vectors vanish at the end states, so the
    # extreme directions are only reached in the limit; quadratic clustering
    # keeps the angular truncation error at O(1/n^2).
    mid = 0.5 * (pair.u_minus + pair.u_plus)
    half = 0.5 * (pair.u_minus - pair.u_plus)
    k = np.arange(n_samples)
    s = mid + half * np.cos((2 * k + 1) * np.pi / (2 * n_samples))
    vecs = pair.f_bar[None, :] - np.stack(
        [P.polyval(s, pair.reduced.component(i)) for i in range(pair.d)], axis=1
    )
    norms = np.linalg.norm(vecs, axis=1)
    scale = float(norms.max())
    if scale <= 0:
        raise TrivialCone("all chord vectors vanish; degenerate data")
    vecs = vecs[norms > 1e-13 * scale]
    if pair.d == 2:
        ang = np.arctan2(vecs[:, 1], vecs[:, 0])
        mean_vec = (vecs / np.linalg.norm(vecs, axis=1, keepdims=True)).sum(axis=0)
        phi0 = np.arctan2(mean_vec[1], mean_vec[0])
        rel = _wrap(ang - phi0)
        lo, hi = phi0 + rel.min(), phi0 + rel.max()
        if hi - lo >= np.pi:
            raise TrivialCone("chord directions span a halfplane or more")
        dual_gens = np.stack([_unit(lo), _unit(hi)])
        # primal cone = dual of the span: sector [hi - pi/2, lo + pi/2]
        p1, p2 = hi - np.pi / 2, lo + np.pi / 2
        primal = np.stack([_unit(p1), _unit(p2)])
        lam = _unit(0.5 * (p1 + p2))
        return _frame(dual_gens, primal, lam)
    gens = _extreme_rays(vecs)
    primal = _dual_generators_nd(gens)
    lam = _interior_direction(gens)
    return _frame(gens, primal, lam)


def gauge_value(dual: DualCone, y) -> np.ndarray:
    """gauge(y) = min { r : y + r W in dual cone } = max over facets of c_i . y."""
    y = np.asarray(y, dtype=float)
    scalar = y.ndim == 0 or (y.ndim == 1 and dual.d > 2 and y.shape[0] == dual.d - 1)
    if dual.d == 2:
        vals = np.multiply.outer(y, dual.facet_slopes[:, 0]).max(axis=-1)
        return float(vals) if np.ndim(y) == 0 else vals
    y2 = np.atleast_2d(y)
    vals = (y2 @ dual.facet_slopes.T).max(axis=-1)
    return float(vals[0]) if scalar else vals.reshape(y.shape[:-1])


def cone_contains(cone: AdmissibleCone, nu, margin: float = 0.0) -> bool:
    """Membership of a unit direction with a safety distance to the boundary.

    The distance is angular for d = 2 and the arcsine of the worst dual-facet
    functional for d >= 3, so both are radians-like near the boundary.
    """
    if margin < 0:
        raise ValueError("margin must be >= 0")
    if cone.trivial:
        return False
    nu = np.asarray(nu, dtype=float)
    nu = nu / np.linalg.norm(nu)
    if cone.d == 2:
        t1, t2 = cone.sector
        theta = np.arctan2(nu[1], nu[0])
        rel = float(_wrap(theta - t1))
        if rel < 0 or rel > t2 - t1:
            return False
        dist = min(rel, (t2 - t1) - rel)
        return dist >= margin
    gens = cone.dual_generators
    if gens is None:
        gens = _dual_generators_nd(cone.generators)
    worst = float((gens @ nu).min())
    if worst < 0:
        return False
    return float(np.arcsin(min(worst, 1.0))) >= margin
