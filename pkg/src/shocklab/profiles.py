"""Two-valued steady shock profiles: fronts, perturbations, and set algebra.

A profile is u_minus on D_minus = {r < psi(y)} and u_plus on the closed
complement, where (r, y) are the frame coordinates of a dual cone and psi is
a front function on the hyperplane H.  Points exactly on the front evaluate
to u_plus; the choice is measure-zero and fixed for determinism.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .cones import AdmissibleCone, DualCone, admissible_cone, cone_contains, dual_cone
from .errors import (
    EmptyInterior,
    FrameMismatch,
    GaugeZero,
    InadmissibleNormal,
    NoCrossing,
    NotLipschitzInGauge,
    NotUNC,
    NotUNCAfterPerturbation,
)
from .fluxes import ShockPair, make_shock_pair

__all__ = [
    "Front",
    "ShockProfile",
    "PerturbationSpec",
    "FrameBox",
    "make_planar",
    "make_graph",
    "make_scaled_gauge",
    "eval_profile",
    "estimate_rho",
    "perturb_end_states",
    "sandwich_bounds",
    "front_surgery",
    "bounded_intersection",
    "extract_front",
    "front_normals",
]

DEFAULT_UNC_RHO = 0.9
DEFAULT_NORMAL_MARGIN = 0.05


@dataclass(frozen=True, eq=False)
class Front:
    """Front function over H with enough structure to enumerate slopes.

    kind is one of planar | scaled_gauge | pwl | combine; fn evaluates psi(y)
    vectorized; slopes is the finite set of local slope vectors (k, d-1) used
    for normal enumeration (exhaustive for the closed forms, per-segment for
    piecewise-linear fronts).
    """

    kind: str
    fn: Callable[[np.ndarray], np.ndarray]
    slopes: np.ndarray
    params: dict = field(default_factory=dict)

    def value(self, y):
        return self.fn(np.asarray(y, dtype=float))


def _planar_front(dual: DualCone, nu: np.ndarray, offset: float) -> Front:
    w_dot = float(nu @ dual.W)
    h_dot = nu @ dual.H
    if w_dot <= 0:
        raise InadmissibleNormal("normal has no positive component along the frame axis")
    slope = -h_dot / w_dot

    def fn(y):
        y = np.asarray(y, dtype=float)
        if dual.d == 2:
            return (offset - y * h_dot[0]) / w_dot
        return (offset - y @ h_dot) / w_dot

    return Front("planar", fn, slope[None, :], {"nu": tuple(nu), "offset": float(offset)})


def _scaled_gauge_front(dual: DualCone, slope: float, offset: float) -> Front:
    def fn(y):
        return slope * dual.gauge(y) + offset

    return Front("scaled_gauge", fn, slope * dual.facet_slopes,
                 {"slope": float(slope), "offset": float(offset)})


def _pwl_front(nodes: np.ndarray, values: np.ndarray) -> Front:
    nodes = np.asarray(nodes, dtype=float)
    values = np.asarray(values, dtype=float)
    if nodes.ndim != 1 or nodes.shape != values.shape:
        raise ValueError("piecewise-linear front needs matching 1-d node/value arrays")
    if not np.all(np.diff(nodes) > 0):
        raise ValueError("front nodes must be strictly increasing")
    seg = (np.diff(values) / np.diff(nodes))[:, None]

    def fn(y):
        return np.interp(np.asarray(y, dtype=float), nodes, values)

    return Front("pwl", fn, seg, {"nodes": nodes, "values": values})


def _combine_front(op: str, parts: tuple[Front, ...]) -> Front:
    reduce = np.minimum if op == "min" else np.maximum

    def fn(y):
        out = parts[0].fn(y)
        for p in parts[1:]:
            out = reduce(out, p.fn(y))
        return out

    slopes = np.vstack([p.slopes for p in parts])
    return Front("combine", fn, slopes, {"op": op, "parts": parts})


@dataclass(frozen=True, eq=False)
class ShockProfile:
    """Steady two-valued shock with a graph front over the frame hyperplane."""

    pair: ShockPair
    dual: DualCone
    front: Front
    rho: float
    unc: bool
    y_extent: tuple[float, float] = (-8.0, 8.0)

    @property
    def d(self) -> int:
        return self.pair.d

    @property
    def velocity(self) -> np.ndarray:
        return self.pair.velocity

    def front_value(self, y):
        return self.front.value(y)

    def eval(self, x) -> np.ndarray:
        """u_minus where r < psi(y), u_plus on and beyond the front."""
        x = np.asarray(x, dtype=float)
        r = x @ self.dual.W
        y = x @ self.dual.H
        if self.d == 2:
            y = y[..., 0]
        psi = self.front.value(y)
        return np.where(r < psi, self.pair.u_minus, self.pair.u_plus)

    def same_frame(self, other: "ShockProfile", tol: float = 1e-9) -> bool:
        return (
            self.pair.flux.coeffs == other.pair.flux.coeffs
            and self.pair.u_minus == other.pair.u_minus
            and self.pair.u_plus == other.pair.u_plus
            and self.dual.same_frame(other.dual, tol)
        )


def eval_profile(profile: ShockProfile, x) -> np.ndarray:
    return profile.eval(x)


def front_normals(profile: ShockProfile) -> np.ndarray:
    """Unit world normals (toward D_plus) of every front slope class."""
    dual = profile.dual
    normals = dual.W[None, :] - profile.front.slopes @ dual.H.T
    return normals / np.linalg.norm(normals, axis=1, keepdims=True)


def _slope_ratio(dual: DualCone, slopes: np.ndarray, n_dirs: int = 512) -> float:
    """sup over directions of |g . delta| / gauge(delta) for each slope row g."""
    if dual.d == 2:
        deltas = np.array([[1.0], [-1.0]])
    else:
        ang = np.linspace(0, 2 * np.pi, n_dirs, endpoint=False)
        deltas = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    worst = 0.0
    for delta in deltas:
        g0 = float(dual.gauge(delta if dual.d > 2 else delta[0]))
        num = np.abs(slopes @ delta)
        if g0 <= 0:
            if np.max(num) > 1e-13:
                raise GaugeZero("gauge vanishes in a direction where the front varies")
            continue
        worst = max(worst, float(np.max(num)) / g0)
    return worst


def estimate_rho(profile: ShockProfile, n_pairs: int = 256) -> float:
    """Supremum of |psi(y') - psi(y)| / gauge(y' - y) over sampled pairs.

    Adjacent pairs of the sampling grid are always included (exact for
    piecewise-linear fronts on their own grid); n_pairs long-range pairs are
    drawn from a fixed-seed generator on top.
    """
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    if profile.d != 2:
        return _slope_ratio(profile.dual, profile.front.slopes)
    front = profile.front
    if front.kind == "pwl":
        nodes = front.params["nodes"]
    else:
        nodes = np.linspace(profile.y_extent[0], profile.y_extent[1], 1025)
    rng = np.random.default_rng(0)
    lo, hi = float(nodes[0]), float(nodes[-1])
    ya = np.concatenate([nodes[:-1], nodes[1:], rng.uniform(lo, hi, n_pairs)])
    yb = np.concatenate([nodes[1:], nodes[:-1], rng.uniform(lo, hi, n_pairs)])
    keep = ya != yb
    ya, yb = ya[keep], yb[keep]
    num = np.abs(front.value(yb) - front.value(ya))
    den = profile.dual.gauge(yb - ya)
    bad = den <= 0
    if np.any(bad & (num > 1e-13 * max(1.0, float(np.max(num))))):
        raise GaugeZero("gauge vanishes between sample points with different front values")
    good = ~bad
    if not np.any(good):
        return 0.0
    return float(np.max(num[good] / den[good]))


def _finish_profile(pair, dual, front, y_extent, rho_tol, unc_rho) -> ShockProfile:
    probe = ShockProfile(pair, dual, front, rho=0.0, unc=False, y_extent=y_extent)
    rho = estimate_rho(probe)
    if rho > 1.0 + rho_tol:
        raise NotLipschitzInGauge(f"front ratio {rho:.6g} exceeds 1; normals leave the cone")
    return ShockProfile(pair, dual, front, rho=rho, unc=bool(rho <= unc_rho), y_extent=y_extent)


def make_planar(
    pair: ShockPair,
    dual: DualCone,
    nu,
    offset: float = 0.0,
    cone: AdmissibleCone | None = None,
    y_extent: tuple[float, float] = (-8.0, 8.0),
    unc_rho: float = DEFAULT_UNC_RHO,
) -> ShockProfile:
    """Planar shock with front {x . nu = offset}, nu oriented toward D_plus."""
    nu = np.asarray(nu, dtype=float)
    nu = nu / np.linalg.norm(nu)
    if cone is not None:
        admissible = cone_contains(cone, nu, 0.0)
    else:
        admissible = float(np.min(pair_dual_margin(dual, nu))) >= -1e-12
    if not admissible:
        raise InadmissibleNormal(f"direction {nu} fails the chord condition")
    front = _planar_front(dual, nu, offset)
    rho = _slope_ratio(dual, front.slopes)
    return ShockProfile(pair, dual, front, rho=rho, unc=bool(rho <= unc_rho), y_extent=y_extent)


def pair_dual_margin(dual: DualCone, nu: np.ndarray) -> np.ndarray:
    """Inner products of nu with the dual generators; all >= 0 iff nu is admissible."""
    return dual.generators @ nu


def make_graph(
    pair: ShockPair,
    dual: DualCone,
    psi,
    y_extent: tuple[float, float] = (-8.0, 8.0),
    n_nodes: int = 1025,
    rho_tol: float = 1e-6,
    unc_rho: float = DEFAULT_UNC_RHO,
) -> ShockProfile:
    """Graph-front shock from samples, a callable, or a prebuilt Front.

    Rejects fronts whose gauge-Lipschitz ratio exceeds 1 (+ rho_tol): their
    normals would leave the admissibility cone.
    """
    if isinstance(psi, Front):
        front = psi
    elif callable(psi):
        nodes = np.linspace(y_extent[0], y_extent[1], n_nodes)
        values = np.asarray(psi(nodes), dtype=float)
        if not np.all(np.isfinite(values)):
            raise ValueError("front values must be finite on the sample grid")
        front = _pwl_front(nodes, values)
    else:
        nodes, values = psi
        if not np.all(np.isfinite(values)):
            raise ValueError("front values must be finite on the sample grid")
        front = _pwl_front(np.asarray(nodes, dtype=float), np.asarray(values, dtype=float))
    return _finish_profile(pair, dual, front, y_extent, rho_tol, unc_rho)


def make_scaled_gauge(
    pair: ShockPair,
    dual: DualCone,
    slope: float,
    offset: float = 0.0,
    y_extent: tuple[float, float] = (-8.0, 8.0),
    rho_tol: float = 1e-6,
    unc_rho: float = DEFAULT_UNC_RHO,
) -> ShockProfile:
    """Front psi(y) = slope * gauge(y) + offset (a cone-shaped shock)."""
    front = _scaled_gauge_front(dual, slope, offset)
    return _finish_profile(pair, dual, front, y_extent, rho_tol, unc_rho)


def perturb_end_states(
    profile: ShockProfile,
    u_hat_minus: float,
    u_hat_plus: float,
    margin: float = DEFAULT_NORMAL_MARGIN,
    resolution: float = 1e-4,
) -> ShockProfile:
    """Keep the front, change the end states, and re-certify every normal.

    The perturbed pair gets its own admissibility cone; each front normal
    class must sit inside it with the given angular margin, otherwise the
    perturbation is too large.
    """
    if not profile.unc:
        raise NotUNC("end-state perturbation requires a uniformly non-characteristic profile")
    if u_hat_minus == profile.pair.u_minus and u_hat_plus == profile.pair.u_plus:
        return profile
    new_pair = make_shock_pair(profile.pair.flux, u_hat_minus, u_hat_plus)
    cone = admissible_cone(new_pair, resolution)
    if cone.trivial:
        raise NotUNCAfterPerturbation("perturbed pair admits no shock direction")
    for nu in front_normals(profile):
        if not cone_contains(cone, nu, margin):
            raise NotUNCAfterPerturbation(
                f"front normal {nu} lost the {margin} margin after perturbation"
            )
    new_dual = dual_cone(cone)
    if new_dual.same_frame(profile.dual):
        front = profile.front
        return _finish_profile(new_pair, new_dual, front, profile.y_extent, 1e-6, DEFAULT_UNC_RHO)
    if profile.front.kind == "planar":
        return make_planar(
            new_pair, new_dual, np.asarray(profile.front.params["nu"]),
            profile.front.params["offset"], cone=cone, y_extent=profile.y_extent,
        )
    if profile.d != 2:
        raise NotImplementedError("frame change of non-planar fronts only supported for d = 2")
    # re-express the front in the perturbed frame by resampling front points
    nodes = np.linspace(profile.y_extent[0], profile.y_extent[1], 1025)
    pts = profile.dual.point(profile.front.value(nodes), nodes)
    r_new = pts @ new_dual.W
    y_new = (pts @ new_dual.H)[:, 0]
    order = np.argsort(y_new)
    return make_graph(new_pair, new_dual, (y_new[order], r_new[order]),
                      y_extent=(float(y_new.min()), float(y_new.max())))


def sandwich_bounds(
    profile: ShockProfile,
    box: tuple[np.ndarray, np.ndarray] | None,
    pad: float = 0.0,
) -> tuple[ShockProfile, ShockProfile]:
    """Steady shocks squeezing every range-respecting perturbation in a box.

    Cone apexes are pushed along the frame axis until the box is swallowed:
    lower front = min(psi, gauge(y) - R0), upper front = max(psi, R1 - gauge(-y)).
    Returns (lower, upper) with lower <= U + phi <= upper for any phi supported
    in the box that keeps values in [u_plus, u_minus].
    """
    if profile.dual.degenerate:
        raise EmptyInterior("sandwich construction needs an interior frame axis")
    if box is None:
        return profile, profile
    lo = np.asarray(box[0], dtype=float)
    hi = np.asarray(box[1], dtype=float)
    if np.any(hi < lo):
        return profile, profile
    corners = np.stack(np.meshgrid(*[(lo[i], hi[i]) for i in range(profile.d)],
                                   indexing="ij"), axis=-1).reshape(-1, profile.d)
    r_c = corners @ profile.dual.W
    y_c = corners @ profile.dual.H
    if profile.d == 2:
        g_y = profile.dual.gauge(y_c[:, 0])
        g_ny = profile.dual.gauge(-y_c[:, 0])
    else:
        g_y = profile.dual.gauge(y_c)
        g_ny = profile.dual.gauge(-y_c)
    r0 = float(np.max(g_y - r_c)) + pad
    r1 = float(np.max(g_ny + r_c)) + pad

    dual = profile.dual

    def lower_fn(y):
        y = np.asarray(y, dtype=float)
        return np.minimum(profile.front.value(y), dual.gauge(y) - r0)

    def upper_fn(y):
        y = np.asarray(y, dtype=float)
        return np.maximum(profile.front.value(y), r1 - dual.gauge(-y))

    cone_slopes = np.vstack([dual.facet_slopes, -dual.facet_slopes])
    lower_front = Front("combine", lower_fn,
                        np.vstack([profile.front.slopes, cone_slopes]),
                        {"op": "sandwich_lower", "r0": r0})
    upper_front = Front("combine", upper_fn,
                        np.vstack([profile.front.slopes, cone_slopes]),
                        {"op": "sandwich_upper", "r1": r1})
    lower = _finish_profile(profile.pair, dual, lower_front, profile.y_extent, 1e-6, DEFAULT_UNC_RHO)
    upper = _finish_profile(profile.pair, dual, upper_front, profile.y_extent, 1e-6, DEFAULT_UNC_RHO)
    return lower, upper


def front_surgery(
    base: ShockProfile,
    first: ShockProfile,
    second: ShockProfile,
) -> tuple[ShockProfile, ShockProfile]:
    """Clip two fronts against a base front into an ordered pair of shocks.

    With fronts b, h, k the results carry min{h, max{b, k}} and
    max{k, min{b, h}}; their difference is exactly (k - h)^+ pointwise.
    """
    if not (base.same_frame(first) and base.same_frame(second)):
        raise FrameMismatch("surgery requires profiles sharing end states and frame")
    b, h, k = base.front, first.front, second.front
    h_hat = _combine_front("min", (h, _combine_front("max", (b, k))))
    k_hat = _combine_front("max", (k, _combine_front("min", (b, h))))
    lo = _finish_profile(base.pair, base.dual, h_hat, base.y_extent, 1e-6, DEFAULT_UNC_RHO)
    hi = _finish_profile(base.pair, base.dual, k_hat, base.y_extent, 1e-6, DEFAULT_UNC_RHO)
    return lo, hi


@dataclass(frozen=True)
class FrameBox:
    """Axis box in frame coordinates bounding a front/cone intersection."""

    empty: bool
    y_lo: np.ndarray | None = None
    y_hi: np.ndarray | None = None
    r_lo: float = 0.0
    r_hi: float = 0.0
    gauge_bound: float = 0.0

    def contains(self, dual: DualCone, points, slack: float = 1e-9) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        r = pts @ dual.W
        y = pts @ dual.H
        if self.empty:
            return np.zeros(r.shape, dtype=bool)
        ok = (r >= self.r_lo - slack) & (r <= self.r_hi + slack)
        for j in range(y.shape[-1]):
            ok &= (y[..., j] >= self.y_lo[j] - slack) & (y[..., j] <= self.y_hi[j] + slack)
        return ok


def bounded_intersection(profile: ShockProfile, x) -> FrameBox:
    """Bounding box of D_minus intersected with the forward cone at x.

    Every intersection point obeys gauge(y) <= (psi(0) + gauge(y0) - r0)/(1 - rho)
    and r0 - gauge(y0) <= r <= (psi(0) + rho (gauge(y0) - r0))/(1 - rho); the box
    is empty when the gauge bound is negative.
    """
    if profile.rho >= 1.0:
        raise NotUNC("bounded intersection requires ratio < 1")
    dual = profile.dual
    x = np.asarray(x, dtype=float)
    r0 = float(x @ dual.W)
    y0 = x @ dual.H
    g0 = float(dual.gauge(y0[0] if profile.d == 2 else y0))
    psi0 = float(profile.front.value(np.zeros(()) if profile.d == 2 else np.zeros(profile.d - 1)))
    rho = profile.rho
    gauge_bound = (psi0 + g0 - r0) / (1.0 - rho)
    if gauge_bound < 0:
        return FrameBox(empty=True)
    r_lo = r0 - g0
    r_hi = (psi0 + rho * (g0 - r0)) / (1.0 - rho)
    if r_hi < r_lo:
        return FrameBox(empty=True)
    slopes = dual.facet_slopes
    if profile.d == 2:
        a = slopes[:, 0]
        pos = a[a > 0]
        neg = a[a < 0]
        if len(pos) == 0 or len(neg) == 0:
            raise EmptyInterior("gauge sublevel sets are unbounded in this frame")
        y_hi = np.array([gauge_bound / pos.max()])
        y_lo = np.array([gauge_bound / neg.min()])
    else:
        from scipy.optimize import linprog

        m = profile.d - 1
        y_lo = np.empty(m)
        y_hi = np.empty(m)
        for j in range(m):
            for sign, target in ((1.0, y_hi), (-1.0, y_lo)):
                res = linprog(-sign * np.eye(m)[j], A_ub=slopes,
                              b_ub=np.full(len(slopes), gauge_bound),
                              bounds=[(None, None)] * m, method="highs")
                if not res.success:
                    raise EmptyInterior("gauge sublevel sets are unbounded in this frame")
                target[j] = sign * (-res.fun if sign > 0 else res.fun)
    return FrameBox(False, y_lo, y_hi, float(r_lo), float(r_hi), float(gauge_bound))


@dataclass(frozen=True, eq=False)
class PerturbationSpec:
    """Compactly supported initial disturbance added to a background shock."""

    shape: str = "bump"
    center: tuple[float, ...] = (0.0, 0.0)
    radius: float = 1.0
    amplitude: float = 1.0
    terms: tuple["PerturbationSpec", ...] = ()

    def __post_init__(self):
        if self.shape not in ("bump", "indicator", "sum"):
            raise ValueError(f"unknown perturbation shape {self.shape!r}")
        if self.shape != "sum" and self.radius <= 0:
            raise ValueError("radius must be positive")
        if not np.isfinite(self.amplitude):
            raise ValueError("amplitude must be finite")

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if self.shape == "sum":
            out = np.zeros(pts.shape[:-1])
            for t in self.terms:
                out = out + t(pts)
            return out
        q2 = np.sum((pts - np.asarray(self.center)) ** 2, axis=-1) / self.radius**2
        if self.shape == "indicator":
            return np.where(q2 <= 1.0, self.amplitude, 0.0)
        with np.errstate(divide="ignore", over="ignore"):
            val = np.where(q2 < 1.0, np.exp(1.0 - 1.0 / np.maximum(1.0 - q2, 1e-300)), 0.0)
        return self.amplitude * val

    @property
    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        if self.shape == "sum":
            boxes = [t.bounding_box for t in self.terms]
            lo = np.min([b[0] for b in boxes], axis=0)
            hi = np.max([b[1] for b in boxes], axis=0)
            return lo, hi
        c = np.asarray(self.center, dtype=float)
        return c - self.radius, c + self.radius


def extract_front(
    field,
    pair: ShockPair,
    dual: DualCone,
    level: float | None = None,
    rho_tol: float = 0.1,
    value_slack: float = 0.05,
):
    """Recover the front of a near-two-valued field as samples over H.

    Walks each grid column along the frame axis and takes the last crossing of
    the mid level by linear interpolation; columns entirely on one side get the
    domain boundary value.  Returns (nodes, samples, profile).
    """
    grid = field.grid
    if pair.d != 2 or grid.d != 2:
        raise NotImplementedError("front extraction implemented for d = 2")
    jump = pair.jump
    vmin, vmax = float(field.values.min()), float(field.values.max())
    if vmin < pair.u_plus - value_slack * jump or vmax > pair.u_minus + value_slack * jump:
        raise ValueError("field values stray too far from the end states")
    if level is None:
        level = 0.5 * (pair.u_minus + pair.u_plus)

    w = dual.W
    axis = int(np.argmax(np.abs(w)))
    aligned = abs(abs(w[axis]) - 1.0) <= 1e-12
    if aligned:
        other = 1 - axis
        r_sign = float(np.sign(w[axis]))
        r_centers = grid.centers(axis) * r_sign
        u_cols = field.values if axis == 0 else np.ascontiguousarray(field.values.T)
        if r_sign < 0:
            r_centers = r_centers[::-1]
            u_cols = u_cols[::-1, :]
        nodes_raw = grid.centers(other) * dual.H[other, 0]
    else:
        # sample the field bilinearly along lines parallel to the frame axis
        lo = np.array(grid.lo)
        hi = lo + np.array(grid.counts) * grid.dx
        diam = float(np.linalg.norm(hi - lo))
        s = np.arange(-0.5 * diam, 0.5 * diam, 0.5 * grid.dx)
        mid = 0.5 * (lo + hi)
        n_cols = max(grid.counts)
        span = float(np.max(hi - lo))
        offsets = np.linspace(-0.5 * span, 0.5 * span, n_cols)
        r_centers = s + float(mid @ w)
        u_cols = np.empty((len(s), n_cols))
        for j, yj in enumerate(offsets):
            pts = mid + np.multiply.outer(s, w) + yj * dual.H[:, 0]
            u_cols[:, j] = field.sample(pts)
        nodes_raw = offsets + float(mid @ dual.H[:, 0])

    order = np.argsort(nodes_raw)
    nodes = nodes_raw[order]
    u_cols = u_cols[:, order]
    psi = np.empty(len(nodes))
    any_crossing = False
    for j in range(len(nodes)):
        col = u_cols[:, j]
        du = col - level
        prod = du[:-1] * du[1:]
        cross = np.where((prod <= 0) & (col[:-1] != col[1:]))[0]
        if len(cross) == 0:
            psi[j] = r_centers[-1] if np.all(du > 0) else r_centers[0]
            continue
        any_crossing = True
        i = int(cross[-1])
        frac = du[i] / (col[i] - col[i + 1])
        psi[j] = r_centers[i] + frac * (r_centers[i + 1] - r_centers[i])
    if not any_crossing:
        raise NoCrossing("no column of the field crosses the mid level")
    profile = make_graph(pair, dual, (nodes, psi),
                         y_extent=(float(nodes[0]), float(nodes[-1])), rho_tol=rho_tol)
    return nodes, psi, profile
