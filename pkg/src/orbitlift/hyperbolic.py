"""Curves of monic real-rooted polynomials: roots, tracking, multiplicity.

A degree-n curve is given by coefficient functions t -> (a_1(t), ..., a_n(t))
for P(t)(y) = y^n + sum_j (-1)^j a_j(t) y^{n-j}, so a_j is the j-th
elementary symmetric function of the roots.  Tracking pairs roots across
samples by optimal assignment, with straight-through (second-difference
minimizing) pairing inside collision clusters so crossings stay
differentiable instead of sorting into kinks.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import GridTooCoarse, Inconclusive, NotHyperbolic, NotInImage, OrderTooLow

__all__ = [
    "HyperbolicCurve",
    "RootTrack",
    "MultiplicityReport",
    "roots_real",
    "track_roots",
    "derivative_bound",
    "multiplicity",
    "multiplicity_of_function",
    "desingularize",
]


# ---------------------------------------------------------------------------
# root solving
# ---------------------------------------------------------------------------

def _companion(signed_coeffs: np.ndarray) -> np.ndarray:
    """Companion matrix of y^n + c_1 y^{n-1} + ... + c_n."""
    n = signed_coeffs.shape[0]
    C = np.zeros((n, n))
    C[0, :] = -signed_coeffs
    C[1:, :-1] = np.eye(n - 1)
    return C


def roots_real(coeffs: Sequence[float], tol: float = 1e-8) -> np.ndarray:
    """Sorted real roots of y^n + sum_j (-1)^j a_j y^{n-j}.

    Eigenvalues of the (balanced) companion matrix; raises NotHyperbolic if
    any imaginary part exceeds tol * (1 + |real part|).  Repeated real roots
    inflate eigenvalue imaginary parts to about eps^(1/multiplicity), so a
    borderline sample is accepted iff the real parts reconstruct the input
    coefficients within tolerance (a y^2 + 1 style sample never does).
    """
    a = np.asarray(coeffs, dtype=float)
    n = a.shape[0]
    if n == 0:
        return np.zeros(0)
    signed = np.array([((-1) ** (j + 1)) * a[j] for j in range(n)])
    ev = np.linalg.eigvals(_companion(signed))
    bad = np.abs(ev.imag) > tol * (1.0 + np.abs(ev.real))
    if np.any(bad):
        candidate = np.sort(ev.real)
        recon = np.poly(candidate)[1:]
        scale = 1.0 + float(np.max(np.abs(signed)))
        if np.max(np.abs(recon - signed)) > 1000.0 * tol * scale:
            worst = np.max(np.abs(ev.imag[bad]))
            raise NotHyperbolic(
                f"root with imaginary part {worst:.3e} exceeds tolerance")
        return candidate
    return np.sort(ev.real)


# ---------------------------------------------------------------------------
# curve containers
# ---------------------------------------------------------------------------

@dataclass
class HyperbolicCurve:
    degree: int
    coeff_fn: Callable[[float], np.ndarray]
    smoothness_class: float = np.inf
    domain: tuple = (-np.inf, np.inf)

    def coefficients(self, t: float) -> np.ndarray:
        return np.asarray(self.coeff_fn(t), dtype=float)

    @classmethod
    def from_coeff_polys(cls, coeff_polys, smoothness_class=np.inf,
                         domain=(-np.inf, np.inf)):
        """Coefficient functions given as polynomials in t.

        ``coeff_polys[j]`` is a list of (power, coefficient) pairs for a_j(t).
        """
        tables = []
        for entries in coeff_polys:
            tables.append([(int(p), float(c)) for p, c in entries])

        def fn(t):
            return np.array([sum(c * t ** p for p, c in tab) for tab in tables])

        return cls(len(coeff_polys), fn, smoothness_class, domain)

    @classmethod
    def from_roots_fn(cls, roots_fn, degree, smoothness_class=np.inf,
                      domain=(-np.inf, np.inf)):
        """Curve built from a known root parameterization (tests, fixtures)."""

        def fn(t):
            r = np.asarray(roots_fn(t), dtype=float)
            signed = np.poly(r)[1:]  # c_j with P = y^n + c_1 y^{n-1} + ...
            return np.array([((-1) ** (j + 1)) * signed[j] for j in range(len(r))])

        return cls(degree, fn, smoothness_class, domain)

    @classmethod
    def from_samples(cls, ts, coeff_table, smoothness_class=1,
                     domain=None):
        """Cubic interpolation of a sample table (ts increasing)."""
        from scipy.interpolate import CubicSpline
        ts = np.asarray(ts, dtype=float)
        table = np.asarray(coeff_table, dtype=float)
        spline = CubicSpline(ts, table, axis=0)
        dom = domain or (float(ts[0]), float(ts[-1]))
        return cls(table.shape[1], lambda t: spline(t), smoothness_class, dom)


@dataclass
class RootTrack:
    grid: np.ndarray              # strictly increasing times
    roots: np.ndarray             # (T, n), column j is one track
    derivatives: np.ndarray       # (T, n) finite differences per track
    collisions: list = field(default_factory=list)  # times with root clusters
    refined: bool = False

    @property
    def degree(self):
        return self.roots.shape[1]

    def to_csv(self, path):
        n = self.degree
        header = "t," + ",".join(f"x{j+1}" for j in range(n)) + "," + \
                 ",".join(f"dx{j+1}" for j in range(n))
        rows = [header]
        for i, t in enumerate(self.grid):
            vals = [f"{t:.17g}"] + [f"{v:.17g}" for v in self.roots[i]] + \
                   [f"{v:.17g}" for v in self.derivatives[i]]
            rows.append(",".join(vals))
        text = "\n".join(rows) + "\n"
        import os
        tmp = str(path) + ".tmp"
        with open(tmp, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)


@dataclass
class MultiplicityReport:
    center: float
    orders: list
    residual_samples: Optional[np.ndarray] = None
    flat: bool = False


# ---------------------------------------------------------------------------
# tracking
# ---------------------------------------------------------------------------

def _clusters(sorted_vals: np.ndarray, tol: float):
    """Index groups of consecutive values closer than tol."""
    groups = []
    start = 0
    for i in range(1, len(sorted_vals) + 1):
        if i == len(sorted_vals) or sorted_vals[i] - sorted_vals[i - 1] > tol:
            if i - start >= 2:
                groups.append(list(range(start, i)))
            start = i
    return groups


def _assign_step(prev: np.ndarray, prev2: Optional[np.ndarray],
                 new_sorted: np.ndarray, cluster_tol: float):
    """Pair previous track values with the new sorted root multiset.

    Returns (values, collided).  Global pairing minimizes squared
    displacement; inside collision clusters of the new roots the pairing is
    redone against linear predictions 2 x_k - x_{k-1}, which minimizes the
    second difference and carries tracks straight through crossings instead
    of sorting them into kinks.  The cluster threshold adapts to the local
    track speed so transversal crossings at grid resolution are caught.
    """
    n = prev.shape[0]
    cost = (prev[:, None] - new_sorted[None, :]) ** 2
    rows, cols = linear_sum_assignment(cost)
    assignment = np.empty(n, dtype=int)
    assignment[rows] = cols
    scale = 1.0 + np.max(np.abs(new_sorted))
    thr = cluster_tol * scale
    if prev2 is not None:
        speed = np.max(np.abs(prev - prev2))
        thr = max(thr, 4.0 * speed)
    collided = False
    for group in _clusters(new_sorted, thr):
        members = [i for i in range(n) if assignment[i] in group]
        if len(members) < 2:
            continue
        collided = True
        if prev2 is None:
            continue
        pred = 2.0 * prev[members] - prev2[members]
        sub_cost = (pred[:, None] - new_sorted[group][None, :]) ** 2
        r, c = linear_sum_assignment(sub_cost)
        for mi, ci in zip(r, c):
            assignment[members[mi]] = group[ci]
    return new_sorted[assignment], collided


def track_roots(curve: HyperbolicCurve, grid, tol: float = 1e-8,
                cluster_tol: float = 1e-6, refine_collisions: bool = True,
                safety: float = 50.0) -> RootTrack:
    """Persistently paired root trajectories of a hyperbolic curve.

    Raises NotHyperbolic when a sample leaves the real-rooted locus and
    GridTooCoarse when a per-step displacement exceeds ``safety`` times the
    running slope estimate (the grid undersamples a fast branch).
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing with >= 2 points")
    lo, hi = curve.domain
    if grid[0] < lo - 1e-12 or grid[-1] > hi + 1e-12:
        raise ValueError("grid not inside the curve domain")

    def solve_all(ts):
        return np.array([roots_real(curve.coefficients(t), tol) for t in ts])

    def run(ts, solved):
        T = solved.shape[0]
        tracks = np.empty_like(solved)
        tracks[0] = solved[0]
        scale = 1.0 + np.max(np.abs(solved))
        slopes = []
        collision_times = []
        for i in range(1, T):
            prev2 = tracks[i - 2] if i >= 2 else None
            tracks[i], collided = _assign_step(tracks[i - 1], prev2, solved[i],
                                               cluster_tol)
            if collided:
                collision_times.append(float(ts[i]))
            dt = ts[i] - ts[i - 1]
            step_slope = np.max(np.abs(tracks[i] - tracks[i - 1])) / dt
            if len(slopes) >= 5:
                ref = max(float(np.median(slopes)), 1e-3 * scale)
                if step_slope > safety * ref:
                    raise GridTooCoarse(
                        f"step at t={ts[i]:.6g} moves {step_slope:.3g} per unit "
                        f"time against running estimate {ref:.3g}")
            slopes.append(step_slope)
        return tracks, collision_times

    sorted_roots = solve_all(grid)
    tracks, collisions = run(grid, sorted_roots)

    refined = False
    if refine_collisions and collisions:
        h = float(np.min(np.diff(grid)))
        # group collision samples into runs and halve the step across each run
        runs = []
        for tc in collisions:
            if runs and tc - runs[-1][1] <= 2.5 * h:
                runs[-1][1] = tc
            else:
                runs.append([tc, tc])
        extra = []
        for lo, hi in runs:
            extra.extend(np.arange(lo - 1.5 * h, hi + 1.5 * h + 0.25 * h, 0.5 * h))
        merged = np.sort(np.concatenate([grid, np.array(extra)]))
        keep = [merged[0]]
        for t in merged[1:]:
            if t - keep[-1] > 0.2 * h:
                keep.append(t)
        new_grid = np.array([t for t in keep if grid[0] <= t <= grid[-1]])
        if new_grid.size > grid.size:
            grid = new_grid
            sorted_roots = solve_all(grid)
            tracks, collisions = run(grid, sorted_roots)
            refined = True

    derivs = np.gradient(tracks, grid, axis=0)
    return RootTrack(grid=grid, roots=tracks, derivatives=derivs,
                     collisions=collisions, refined=refined)


def derivative_bound(track: RootTrack, K: Optional[tuple] = None) -> float:
    """Max |dx_j/dt| over interior grid points of the compact window K."""
    lo = track.grid[0] if K is None else K[0]
    hi = track.grid[-1] if K is None else K[1]
    if lo < track.grid[0] - 1e-12 or hi > track.grid[-1] + 1e-12:
        raise ValueError("K must lie inside the tracked grid span")
    mask = (track.grid >= lo) & (track.grid <= hi)
    idx = np.nonzero(mask)[0]
    idx = idx[(idx > 0) & (idx < len(track.grid) - 1)]
    if idx.size == 0:
        idx = np.nonzero(mask)[0]
    return float(np.max(np.abs(track.derivatives[idx])))


# ---------------------------------------------------------------------------
# multiplicity (order of flatness)
# ---------------------------------------------------------------------------

def multiplicity_of_function(f: Callable[[np.ndarray], np.ndarray], t0: float,
                             max_order: int, window: float,
                             samples_per_window: int = 24) -> int:
    """Largest m <= max_order with |f(t)| / |t-t0|^m bounded near t0.

    Ratio maxima are compared across three dyadic window refinements; a
    bounded order keeps its maximum stable while order m+1 roughly doubles
    per refinement.  Flat input (all zeros) returns max_order.
    """
    if max_order < 1:
        raise ValueError("max_order must be >= 1")
    ratios = np.zeros((3, max_order + 2))
    fscale = 0.0
    for j in range(3):
        h = window / (2 ** j)
        offs = np.linspace(h / samples_per_window, h, samples_per_window)
        ts = np.concatenate([t0 - offs[::-1], t0 + offs])
        vals = np.abs(np.asarray([float(f(t)) for t in ts]))
        fscale = max(fscale, float(np.max(vals)))
        dist = np.abs(ts - t0)
        for p in range(max_order + 2):
            ratios[j, p] = float(np.max(vals / dist ** p))
    if fscale == 0.0:
        return max_order  # identically zero on the window: flat
    floor = 1e-12 * fscale / window ** max_order
    chosen = 0
    for p in range(max_order, 0, -1):
        r = ratios[:, p]
        if r[1] <= 1.6 * max(r[0], floor) and r[2] <= 1.6 * max(r[1], floor):
            chosen = p
            break
    if chosen == 0:
        return 0
    if chosen < max_order:
        nxt = ratios[:, chosen + 1]
        grew01 = nxt[1] > 1.45 * max(nxt[0], floor)
        grew12 = nxt[2] > 1.45 * max(nxt[1], floor)
        if grew01 != grew12:
            raise Inconclusive(
                f"order-{chosen + 1} ratios non-monotone across refinements")
    return chosen


def multiplicity(ts, fs, t0: float, max_order: int) -> int:
    """Sample-table version of the flatness-order test."""
    ts = np.asarray(ts, dtype=float)
    fs = np.asarray(fs, dtype=float)
    if ts[0] > t0 or ts[-1] < t0:
        raise ValueError("samples must bracket t0")
    from scipy.interpolate import CubicSpline
    spline = CubicSpline(ts, fs)
    window = min(t0 - ts[0], ts[-1] - t0)
    if window <= 0:
        window = float(ts[-1] - ts[0]) / 4
    return multiplicity_of_function(lambda t: spline(t), t0, max_order, window)


@dataclass
class _ResidualCurve:
    """Componentwise (t - t0)^{-d_i} rescaling with a filled center value."""
    base: Callable[[float], np.ndarray]
    t0: float
    degrees: tuple
    fill_radius: float
    fill_nodes: np.ndarray
    fill_coeffs: np.ndarray  # (4, n) cubic coefficients, highest power first

    def __call__(self, t):
        dt = t - self.t0
        if abs(dt) <= self.fill_radius:
            powers = np.array([dt ** 3, dt ** 2, dt, 1.0])
            return powers @ self.fill_coeffs
        c = np.asarray(self.base(t), dtype=float)
        return c / np.array([dt ** d for d in self.degrees])


def desingularize(curve_fn: Callable[[float], np.ndarray], t0: float,
                  degrees: Sequence[int], window: float,
                  max_order: int = 8, tol: float = 1e-10,
                  membership: Optional[Callable] = None,
                  fill_radius: Optional[float] = None):
    """Divide component i by (t - t0)^{d_i}, filling the removable point.

    Preconditions checked: c(t0) ~ 0, c_1 >= 0 on the window, and c_1
    vanishes to order >= 2 at t0 (OrderTooLow otherwise).  The value at t0
    is filled by a one-sided cubic extrapolation from the right.  When a
    ``membership`` residual functional is supplied, a few residual samples
    are tested against it (NotInImage on failure).

    Returns (residual_callable, MultiplicityReport).
    """
    degrees = tuple(int(d) for d in degrees)
    c0 = np.asarray(curve_fn(t0), dtype=float)
    probe = np.linspace(t0 - window, t0 + window, 17)
    cvals = np.array([curve_fn(t) for t in probe])
    scale = 1.0 + float(np.max(np.abs(cvals)))
    if np.max(np.abs(c0)) > 1e-7 * scale:
        raise ValueError("curve does not vanish at t0")
    c1 = cvals[:, 0]
    if np.min(c1) < -tol * scale:
        raise OrderTooLow("first component takes negative values near t0; "
                          "it must be a sum of squares")
    m1 = multiplicity_of_function(lambda t: np.asarray(curve_fn(t))[0],
                                  t0, max_order, window)
    if m1 < 2:
        raise OrderTooLow(f"first component vanishes to order {m1} < 2 at t0")

    n = len(degrees)
    if fill_radius is None:
        fill_radius = window / 64.0
    nodes = t0 + fill_radius * np.array([1.0, 2.0, 3.0, 4.0])
    node_vals = np.empty((4, n))
    for i, tt in enumerate(nodes):
        dt = tt - t0
        node_vals[i] = np.asarray(curve_fn(tt)) / np.array([dt ** d for d in degrees])
    V = np.vander(nodes - t0, 4)  # columns (dt^3, dt^2, dt, 1)
    fill_coeffs = np.linalg.solve(V, node_vals)

    residual = _ResidualCurve(base=curve_fn, t0=t0, degrees=degrees,
                              fill_radius=fill_radius, fill_nodes=nodes,
                              fill_coeffs=fill_coeffs)

    orders = [m1]
    for i in range(1, n):
        fi = lambda t, i=i: np.asarray(curve_fn(t))[i]
        try:
            orders.append(multiplicity_of_function(fi, t0, max_order, window))
        except Inconclusive:
            orders.append(-1)

    sample_ts = [t0 - window, t0 - window / 2, t0, t0 + window / 2, t0 + window]
    samples = np.array([residual(t) for t in sample_ts])
    if membership is not None:
        for t, r in zip(sample_ts, samples):
            err = membership(r)
            if err > 1e-6 * (1.0 + np.max(np.abs(r))):
                raise NotInImage(f"residual point at t={t:.6g} misses the "
                                 f"orbit-space image by {err:.3e}")
    report = MultiplicityReport(center=t0, orders=orders,
                                residual_samples=samples,
                                flat=bool(np.max(np.abs(cvals)) <= tol * scale))
    return residual, report
