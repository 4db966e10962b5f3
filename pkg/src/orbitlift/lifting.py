"""Lifting curves from the orbit space back to the representation space.

The engine works on a grid.  Away from zeros and singular strata it runs
Gauss-Newton continuation on sigma(x(t)) = c(t).  At a zero of the curve it
divides component i by (t - t0)^{d_i}, lifts the residual curve recursively
and multiplies back by (t - t0).  At a singular stratum crossing it changes
to the stabilizer of the crossing point, re-expresses the curve in invariants
of that subgroup centered at the crossing point, and reuses the zero
machinery there.  Independently seeded local lifts are glued left to right
by exhaustive group matching of values and derivatives.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (Inconsistent, MultisetMismatch, NewtonDiverged, NoMatch,
                     NoOverlap, OrderTooLow, RecursionDepthExceeded,
                     SeedMismatch)
from .groups import (Decomposition, FiniteGroup, irreducible_decomposition,
                     max_isotropy_per_component, compute_k)
from .hyperbolic import HyperbolicCurve, desingularize, track_roots, derivative_bound
from .invariants import GeneratorSystem, generate_invariants, express_in_generators
from .poly import Poly

__all__ = [
    "OrbitCurve",
    "LiftOptions",
    "LocalLift",
    "LiftResult",
    "SliceProblem",
    "ReductionPlan",
    "lift_regular",
    "slice_reduce",
    "lift_through_zero",
    "match_derivative",
    "glue_lifts",
    "build_reduction",
    "reduction_check",
    "lift_curve",
]


# ---------------------------------------------------------------------------
# curve container
# ---------------------------------------------------------------------------

@dataclass
class OrbitCurve:
    """A curve in the orbit-space image, evaluable anywhere in its domain."""
    group: FiniteGroup
    system: GeneratorSystem
    value_fn: Callable[[float], np.ndarray]
    smoothness_class: float = np.inf
    domain: tuple = (-1.0, 1.0)

    def __call__(self, t):
        return np.asarray(self.value_fn(t), dtype=float)

    def batch(self, ts):
        return np.array([self(t) for t in ts])

    @classmethod
    def from_path(cls, group, system, path_fn, domain=(-1.0, 1.0),
                  smoothness_class=np.inf):
        """Forward construction c = sigma(gamma(t)) from a path in V."""

        def fn(t):
            return system.evaluate(np.asarray(path_fn(t), dtype=float))

        return cls(group, system, fn, smoothness_class, domain)

    @classmethod
    def from_component_polys(cls, group, system, comp_polys, domain=(-1.0, 1.0),
                             smoothness_class=np.inf):
        """Components given as polynomials in t: lists of (power, coeff)."""
        tables = [[(int(p), float(c)) for p, c in comp]
                  for comp in comp_polys]

        def fn(t):
            return np.array([sum(c * t ** p for p, c in tab) for tab in tables])

        return cls(group, system, fn, smoothness_class, domain)

    @classmethod
    def from_samples(cls, group, system, ts, values, smoothness_class=3):
        from scipy.interpolate import CubicSpline
        ts = np.asarray(ts, dtype=float)
        spline = CubicSpline(ts, np.asarray(values, dtype=float), axis=0)
        return cls(group, system, lambda t: spline(t), smoothness_class,
                   (float(ts[0]), float(ts[-1])))


@dataclass
class LiftOptions:
    grid_count: int = 321
    seed: int = 0
    newton_tol: float = 1e-12
    residual_tol: float = 1e-8
    zero_tol: float = 1e-10
    match_tol: float = 1e-5
    window_pad: int = 4
    depth_cap: int = 8
    n_starts: int = 64
    refine_levels: int = 0
    grid: Optional[np.ndarray] = None


@dataclass
class LocalLift:
    ts: np.ndarray
    points: np.ndarray
    derivs: np.ndarray
    kind: str = "regular"     # regular | zero | slice | flat


@dataclass
class LiftResult:
    grid: np.ndarray
    points: np.ndarray
    derivatives: np.ndarray
    residuals: np.ndarray
    glue_log: list
    diagnostics: dict
    zero_set: dict

    def to_csv(self, path):
        m = self.points.shape[1]
        header = ("t," + ",".join(f"x{j+1}" for j in range(m)) + ","
                  + ",".join(f"dx{j+1}" for j in range(m)) + ",residual")
        rows = [header]
        for i, t in enumerate(self.grid):
            vals = ([f"{t:.17g}"] + [f"{v:.17g}" for v in self.points[i]]
                    + [f"{v:.17g}" for v in self.derivatives[i]]
                    + [f"{self.residuals[i]:.17g}"])
            rows.append(",".join(vals))
        _atomic_write(path, "\n".join(rows) + "\n")

    def glue_log_json(self):
        return json.dumps(self.glue_log, indent=1, sort_keys=True)

    def diagnostics_json(self):
        payload = {"diagnostics": self.diagnostics, "zero_set": self.zero_set}
        return json.dumps(payload, indent=1, sort_keys=True, default=_json_default)


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON serializable: {type(x)}")


def _atomic_write(path, text):
    tmp = str(path) + ".tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


# ---------------------------------------------------------------------------
# Gauss-Newton solvers
# ---------------------------------------------------------------------------

def _gauss_newton(system: GeneratorSystem, target, x0, tol, max_iter=60,
                  trust=None):
    """Row-equilibrated Gauss-Newton for sigma(x) = target; None on failure."""
    x = np.asarray(x0, dtype=float).copy()
    target = np.asarray(target, dtype=float)
    scale = 1.0 + np.max(np.abs(target))
    for _ in range(max_iter):
        r = system.evaluate(x) - target
        if np.max(np.abs(r)) <= tol * scale:
            return x
        J = system.jacobian(x)
        row_norms = np.linalg.norm(J, axis=1)
        w = 1.0 / np.maximum(row_norms, 1e-6 * max(row_norms.max(), 1e-30))
        step, *_ = np.linalg.lstsq(J * w[:, None], -r * w, rcond=None)
        if not np.all(np.isfinite(step)):
            return None
        n = np.linalg.norm(step)
        if trust is not None and n > trust:
            step *= trust / n
        x = x + step
        if not np.all(np.isfinite(x)):
            return None
    r = system.evaluate(x) - target
    if np.max(np.abs(r)) <= 10 * tol * scale:
        return x
    return None


def _multi_start_solutions(system: GeneratorSystem, target, rng, n_starts=64,
                           tol=1e-11, extra_seeds=()):
    """Distinct solutions of sigma(x) = target from randomized starts."""
    m = system.nvars
    c1 = max(float(np.asarray(target)[0]), 0.0)
    radius = np.sqrt(c1) if c1 > 0 else 1.0
    sols = []
    starts = list(extra_seeds)
    for _ in range(n_starts):
        u = rng.standard_normal(m)
        u /= max(np.linalg.norm(u), 1e-12)
        starts.append(radius * u)
    for s in starts:
        x = _gauss_newton(system, target, s, tol)
        if x is None:
            continue
        if not any(np.linalg.norm(x - y) <= 1e-7 * (1 + np.linalg.norm(x))
                   for y in sols):
            sols.append(x)
    sols.sort(key=lambda x: tuple(np.round(x, 9).tolist()))
    return sols


def _canonical_seed(system, target, rng, n_starts, tol):
    sols = _multi_start_solutions(system, target, rng, n_starts, tol)
    return sols[0] if sols else None


# ---------------------------------------------------------------------------
# public primitive: regular continuation
# ---------------------------------------------------------------------------

def lift_regular(curve: OrbitCurve, t0: float, seed, window,
                 grid=None, options: Optional[LiftOptions] = None) -> LocalLift:
    """Newton continuation of a local lift through a regular stretch.

    ``seed`` must map to c(t0) within tolerance (SeedMismatch otherwise).
    Steps that fail to converge are bisected up to 6 times before
    NewtonDiverged is raised.
    """
    options = options or LiftOptions()
    system = curve.system
    seed = np.asarray(seed, dtype=float)
    scale = 1.0 + np.max(np.abs(curve(t0)))
    if np.max(np.abs(system.evaluate(seed) - curve(t0))) > 1e-6 * scale:
        raise SeedMismatch("sigma(seed) != c(t0) within tolerance")
    refined = _gauss_newton(system, curve(t0), seed, options.newton_tol)
    if refined is not None:
        seed = refined
    if grid is None:
        a, b = window
        grid = np.linspace(a, b, max(9, int(np.ceil((b - a) / 0.01)) + 1))
    grid = np.asarray(grid, dtype=float)
    i0 = int(np.argmin(np.abs(grid - t0)))
    pts = np.full((grid.size, system.nvars), np.nan)
    pts[i0] = _gauss_newton(system, curve(grid[i0]), seed, options.newton_tol)
    if pts[i0] is None or np.any(np.isnan(pts[i0])):
        raise SeedMismatch("seed does not refine onto the curve at the anchor")
    lo, hi = _continue_both(system, curve, grid, pts, i0, options)
    if lo > 0 or hi < grid.size - 1:
        raise NewtonDiverged(
            f"continuation stalled at index range [{lo}, {hi}] of the window")
    derivs = _derivatives_for(system, curve, grid, pts)
    return LocalLift(ts=grid, points=pts, derivs=derivs, kind="regular")


def _newton_step(system, curve, t_prev, x_prev, t_next, tol, x_before=None,
                 trust_cap=None):
    """One continuation step with secant prediction and 6 bisections.

    The tolerance ladder absorbs curve values of limited intrinsic accuracy
    (interpolation fills); the final polish pass restores full precision
    wherever the Jacobian allows it.  ``trust_cap`` bounds the Newton trust
    radius, which keeps the iteration from hopping to a reflected sheet
    when the path runs close to a mirror.
    """
    for step_tol in (tol, max(30 * tol, 1e-10), 3e-9):
        for level in range(7):
            steps = 2 ** level
            ts = np.linspace(t_prev, t_next, steps + 1)[1:]
            x = x_prev
            tp = t_prev
            xb = x_before
            ok = True
            for tt in ts:
                if xb is not None and tt != tp:
                    pred = x + (x - xb)  # secant, uniform sub-steps
                else:
                    pred = x
                trust = 5.0 * (np.linalg.norm(x - xb) + 1e-3) \
                    if xb is not None else None
                if trust_cap is not None:
                    trust = trust_cap / steps if trust is None \
                        else min(trust, trust_cap / steps)
                nxt = _gauss_newton(system, curve(tt), pred, step_tol,
                                    max_iter=40, trust=trust)
                if nxt is None:
                    ok = False
                    break
                if xb is not None:
                    # a sheet hop lands about twice the mirror distance from
                    # the prediction; honest curvature stays O(h^2)
                    dev = np.linalg.norm(nxt - pred)
                    step_len = np.linalg.norm(x - xb)
                    if dev > 0.35 * step_len + 1e-10 * (1 + np.linalg.norm(x)):
                        ok = False
                        break
                xb, x, tp = x, nxt, tt
            if ok:
                return x
    return None


def _continue_both(system, curve, grid, pts, i0, options):
    """Extend a continuation left and right; returns reached index range."""
    hi = i0
    for i in range(i0 + 1, grid.size):
        before = pts[i - 2] if i - 2 >= 0 and not np.any(np.isnan(pts[i - 2])) else None
        nxt = _newton_step(system, curve, grid[i - 1], pts[i - 1], grid[i],
                           options.newton_tol, before)
        if nxt is None:
            break
        pts[i] = nxt
        hi = i
    lo = i0
    for i in range(i0 - 1, -1, -1):
        before = pts[i + 2] if i + 2 < grid.size and not np.any(np.isnan(pts[i + 2])) else None
        nxt = _newton_step(system, curve, grid[i + 1], pts[i + 1], grid[i],
                           options.newton_tol, before)
        if nxt is None:
            break
        pts[i] = nxt
        lo = i
    return lo, hi


def _curve_derivative_at(curve, t, rel_h=1e-4):
    """Fourth-order central stencil on the curve callable (error ~1e-12)."""
    h = rel_h * (1.0 + abs(t))
    return (curve(t - 2 * h) - 8 * curve(t - h) + 8 * curve(t + h)
            - curve(t + 2 * h)) / (12 * h)


def _derivatives_for(system, curve, ts, pts, fallback=None):
    """Lift derivatives: validated Jacobian solve with sample-fit fallback.

    The Jacobian solve d sigma(x) x' = c' is exact at regular points but
    degrades silently near strata (equilibration turns noise-level gradient
    rows into O(1) wrong equations), so it is only accepted when it agrees
    with a local cubic fit of the lift samples; otherwise the fit or the
    supplied ``fallback`` rows (product-rule values from the zero machinery)
    are used.
    """
    T, m = pts.shape
    derivs = np.full((T, m), np.nan)
    for i in range(T):
        if np.any(np.isnan(pts[i])):
            continue
        fd = _fd_derivative(ts, pts, i)
        chosen = fd
        J = system.jacobian(pts[i])
        row_norms = np.linalg.norm(J, axis=1)
        top = max(float(np.max(row_norms)), 1e-30)
        w = 1.0 / np.maximum(row_norms, 1e-6 * top)
        Jw = J * w[:, None]
        sv = np.linalg.svd(Jw, compute_uv=False)
        if sv.size >= m and sv[m - 1] > 1e-3 * max(1.0, sv[0]):
            cdot = _curve_derivative_at(curve, ts[i])
            sol, *_ = np.linalg.lstsq(Jw, cdot * w, rcond=None)
            if np.linalg.norm(sol - fd) <= 1e-4 * (1.0 + np.linalg.norm(fd)):
                chosen = sol
            elif fallback is not None and not np.any(np.isnan(fallback[i])):
                chosen = fallback[i]
        elif fallback is not None and not np.any(np.isnan(fallback[i])):
            chosen = fallback[i]
        derivs[i] = chosen
    return derivs


def _fd_derivative(ts, pts, i):
    """Derivative of sample data at index i from a local cubic fit.

    Nearly duplicate abscissae (inserted stratum touch points next to grid
    samples) are dropped to keep the Vandermonde fit conditioned.
    """
    T = pts.shape[0]
    cand = [j for j in range(max(0, i - 4), min(T, i + 5))
            if not np.any(np.isnan(pts[j]))]
    if len(cand) < 2:
        return np.zeros(pts.shape[1])
    span = max(ts[j] for j in cand) - min(ts[j] for j in cand)
    min_gap = 0.05 * span / max(len(cand) - 1, 1)
    idx = [i]
    for j in sorted(cand, key=lambda j: abs(ts[j] - ts[i])):
        if all(abs(ts[j] - ts[k]) > min_gap for k in idx):
            idx.append(j)
        if len(idx) >= 7:
            break
    idx = sorted(idx)
    if len(idx) < 2:
        return np.zeros(pts.shape[1])
    deg = min(3, len(idx) - 1)
    out = np.empty(pts.shape[1])
    tloc = np.array([ts[j] - ts[i] for j in idx])
    for c in range(pts.shape[1]):
        coeffs = np.polyfit(tloc, pts[idx, c], deg)
        out[c] = np.polyder(np.poly1d(coeffs))(0.0)
    return out


# ---------------------------------------------------------------------------
# slice reduction
# ---------------------------------------------------------------------------

@dataclass
class SliceProblem:
    """Local problem for the stabilizer of a point, recentered at it.

    A lift u(t) of ``curve`` (invariants ``system`` of ``group``) composes
    with the offset as x(t) = base_point + u(t), which lifts the original
    curve near t0.
    """
    group: FiniteGroup            # stabilizer subgroup, acting on the same V
    system: GeneratorSystem       # invariants of the stabilizer
    curve: OrbitCurve             # recentred curve tau(x(t) - v)
    base_point: np.ndarray
    t0: float
    parent_solver: Callable[[float], np.ndarray]


_slice_system_cache: dict = {}


def _slice_system(parent: FiniteGroup, stab_indices, cap) -> tuple:
    key = (id(parent), tuple(sorted(stab_indices)), cap)
    got = _slice_system_cache.get(key)
    if got is None:
        sub = parent.subgroup(stab_indices)
        system = generate_invariants(sub, degree_cap=cap, check_separation=False)
        got = (sub, system)
        _slice_system_cache[key] = got
    return got


def slice_reduce(curve: OrbitCurve, t0: float, v, window: float = 0.05,
                 options: Optional[LiftOptions] = None) -> SliceProblem:
    """Reduce lifting near sigma(v) to lifting through 0 for the stabilizer.

    ``v`` must be a preimage of c(t0).  The recentred curve evaluates
    tau(x(t) - v) where x(t) is a solution of sigma(x) = c(t) inside the
    slice ball around v (well defined there regardless of which stabilizer
    translate the solver finds).
    """
    options = options or LiftOptions()
    group, system = curve.group, curve.system
    v = np.asarray(v, dtype=float)
    scale = 1.0 + np.max(np.abs(curve(t0)))
    if np.max(np.abs(system.evaluate(v) - curve(t0))) > 1e-6 * scale:
        raise SeedMismatch("sigma(v) != c(t0) within tolerance")
    stab = group.stabilizer_indices(v, 1e-7)
    sub, tau = _slice_system(group, stab, max(system.d, 2))
    moved = [np.linalg.norm(group.mats[i] @ v - v) for i in range(group.order)
             if i not in set(stab)]
    slice_radius = 0.45 * min(moved) if moved else np.inf

    cache = [(t0, v.copy())]

    def solver(t):
        return _solve_near(system, curve, t, v, slice_radius, options, cache)

    def recentred(t):
        x = solver(t)
        return tau.evaluate(x - v)

    rec_curve = OrbitCurve(group=sub, system=tau, value_fn=recentred,
                           smoothness_class=curve.smoothness_class,
                           domain=curve.domain)
    return SliceProblem(group=sub, system=tau, curve=rec_curve,
                        base_point=v, t0=t0, parent_solver=solver)


# ---------------------------------------------------------------------------
# lifting through a zero
# ---------------------------------------------------------------------------

def lift_through_zero(curve: OrbitCurve, t0: float, window: float,
                      grid=None, options: Optional[LiftOptions] = None,
                      depth: int = 0, side: int = 0) -> LocalLift:
    """Local lift across a zero of the curve via desingularization.

    Divides component i by (t - t0)^{d_i}, lifts the residual curve on the
    window (recursively, through any of its own singular times) and
    multiplies the result by (t - t0).  The derivative at t0 equals the
    residual lift's value there.  ``side`` = -1/0/+1 selects a one-sided
    window (for zeros at the boundary of a zero-free interval).
    """
    options = options or LiftOptions()
    system = curve.system
    if depth > options.depth_cap:
        raise RecursionDepthExceeded(f"nested zeros beyond depth {options.depth_cap}")
    scale = 1.0 + np.max(np.abs(curve.batch(np.linspace(t0 - window, t0 + window, 9))))
    if np.max(np.abs(curve(t0))) > 1e-6 * scale:
        raise ValueError("curve does not vanish at t0")
    if grid is None:
        if side == 0:
            grid = np.linspace(t0 - window, t0 + window, 4 * options.window_pad + 1)
        elif side > 0:
            grid = np.linspace(t0, t0 + window, 2 * options.window_pad + 1)
        else:
            grid = np.linspace(t0 - window, t0, 2 * options.window_pad + 1)
    grid = np.asarray(grid, dtype=float)

    residual, report = desingularize(
        curve, t0, system.degrees, window=window,
        fill_radius=0.45 * float(np.min(np.diff(grid))))
    res_curve = OrbitCurve(group=curve.group, system=system,
                           value_fn=residual,
                           smoothness_class=curve.smoothness_class,
                           domain=(grid[0] - window, grid[-1] + window))
    sub = _lift_window_engine(res_curve, grid, options, depth + 1)
    dt = (sub.ts - t0)[:, None]
    pts = dt * sub.points
    derivs = sub.points + dt * sub.derivs
    return LocalLift(ts=sub.ts, points=pts, derivs=derivs, kind="zero")


# ---------------------------------------------------------------------------
# derivative matching and gluing
# ---------------------------------------------------------------------------

def match_derivative(group: FiniteGroup, value_a, deriv_a, value_b, deriv_b,
                     tol: float = 1e-7):
    """(h, g) element indices with A = h g B for values and derivatives.

    Exhaustive: first the lexicographically first g with A(t0) = g B(t0),
    then h in the stabilizer of A(t0) with A'(t0) = h g B'(t0).  Raises
    NoMatch when values or derivatives cannot be matched (for an infinite
    group approximated by samples this is the expected negative outcome).
    """
    va = np.asarray(value_a, float)
    da = np.asarray(deriv_a, float)
    vb = np.asarray(value_b, float)
    db = np.asarray(deriv_b, float)
    vscale = 1.0 + np.linalg.norm(va)
    dscale = 1.0 + np.linalg.norm(da)
    value_matches = [g for g in range(group.order)
                     if np.linalg.norm(va - group.mats[g] @ vb) <= tol * vscale]
    if not value_matches:
        raise NoMatch("no group element matches the lift values")
    stab = group.stabilizer_indices(va, 1e-7) if np.linalg.norm(va) > 0 \
        else list(range(group.order))
    for g in value_matches:
        gb = group.mats[g] @ db
        for h in stab:
            if np.linalg.norm(da - group.mats[h] @ gb) <= tol * dscale:
                return h, g
    raise NoMatch("values match but no stabilizer element matches the derivatives")


def _junction_quality(system, x):
    """Smallest singular value of the row-equilibrated Jacobian at x."""
    if system is None or np.any(np.isnan(x)):
        return 0.0
    J = system.jacobian(x)
    rn = np.linalg.norm(J, axis=1)
    top = max(float(np.max(rn)), 1e-30)
    Jw = J * (1.0 / np.maximum(rn, 1e-6 * top))[:, None]
    sv = np.linalg.svd(Jw, compute_uv=False)
    return float(sv[-1] / max(sv[0], 1e-30))


def _bridge_gap(merged, nxt, curve, system, options):
    """Extend the left piece across a small gap onto the right piece's grid.

    The extension samples are fiber points solved from extrapolated seeds of
    the left piece, so they continue the left sheet coherently; they land on
    the right piece's first grid times to create a genuine overlap.
    """
    gap = nxt.ts[0] - merged.ts[-1]
    h_loc = float(np.median(np.diff(nxt.ts)))
    if gap > 6 * h_loc or curve is None:
        return merged
    take = [float(t) for t in nxt.ts[:3]]
    new_ts = list(merged.ts)
    new_pts = list(merged.points)
    new_der = list(merged.derivs)
    x2, x1 = merged.points[-1], merged.points[-2]
    t2, t1 = merged.ts[-1], merged.ts[-2]
    for t in take:
        pred = x2 + (x2 - x1) * ((t - t2) / max(t2 - t1, 1e-14))
        x = _gauss_newton(system, curve(t), pred, options.newton_tol,
                          max_iter=60, trust=3 * np.linalg.norm(x2 - x1) + 1e-3)
        if x is None:
            x = _gauss_newton(system, curve(t), pred, 1e-9, max_iter=80)
        if x is None:
            break
        x = _polish_to_floor(system, curve(t), x)
        new_ts.append(t)
        new_pts.append(x)
        new_der.append((x - x2) / max(t - t2, 1e-14))
        x1, t1, x2, t2 = x2, t2, x, t
    return LocalLift(ts=np.array(new_ts), points=np.array(new_pts),
                     derivs=np.array(new_der), kind=merged.kind)


def _element_from_overlap(group, A_pts, B_pts, tol):
    """Group element e minimizing the worst value mismatch A ~ e B."""
    scale = 1.0 + float(np.max(np.linalg.norm(A_pts, axis=1)))
    best = None
    for e in range(group.order):
        moved = B_pts @ group.mats[e].T
        err = float(np.max(np.linalg.norm(A_pts - moved, axis=1)))
        if best is None or err < best[0]:
            best = (err, e)
    if best[0] > tol * scale:
        return None, best[0]
    return best[1], best[0]


def glue_lifts(locals_list, group: FiniteGroup, tol: float = 1e-6,
               system: Optional[GeneratorSystem] = None,
               curve: Optional[OrbitCurve] = None,
               options: Optional[LiftOptions] = None):
    """Glue overlapping local lifts left to right by group matching.

    Each junction applies one element h g to the whole right-hand piece and
    records (time, element index).  With two or more shared grid points the
    element is pinned by the values across the overlap; a single-point
    overlap falls back to value-plus-derivative matching.  Small gaps are
    bridged by continuing the left piece when the curve is available;
    otherwise NoOverlap is raised.
    """
    if not locals_list:
        raise ValueError("no local lifts to glue")
    options = options or LiftOptions()
    pieces = sorted(locals_list, key=lambda L: (L.ts[0], L.ts[-1]))
    merged = pieces[0]
    glue_log = []
    for nxt in pieces[1:]:
        shared = np.intersect1d(np.round(merged.ts, 11), np.round(nxt.ts, 11))
        if shared.size == 0 and curve is not None and system is not None \
                and nxt.ts[0] > merged.ts[-1]:
            merged = _bridge_gap(merged, nxt, curve, system, options)
            shared = np.intersect1d(np.round(merged.ts, 11), np.round(nxt.ts, 11))
        if shared.size == 0:
            raise NoOverlap(f"pieces [{merged.ts[0]:.4g},{merged.ts[-1]:.4g}] and "
                            f"[{nxt.ts[0]:.4g},{nxt.ts[-1]:.4g}] do not overlap")
        ia_list = [int(np.argmin(np.abs(merged.ts - tj))) for tj in shared]
        ib_list = [int(np.argmin(np.abs(nxt.ts - tj))) for tj in shared]
        if shared.size >= 2:
            A = merged.points[ia_list]
            B = nxt.points[ib_list]
            hg, err = _element_from_overlap(group, A, B, tol)
            if hg is None:
                raise NoMatch(f"no group element matches the overlap "
                              f"(worst value gap {err:.3e})")
            tj = float(shared[shared.size // 2])
        else:
            tj = float(shared[0])
            ia, ib = ia_list[0], ib_list[0]
            h, g = match_derivative(group, merged.points[ia], merged.derivs[ia],
                                    nxt.points[ib], nxt.derivs[ib], tol)
            hg = group.mul(h, g)
        mat = group.mats[hg]
        new_pts = nxt.points @ mat.T
        new_der = nxt.derivs @ mat.T
        glue_log.append({"t": float(tj), "element_index": int(hg)})
        keep_left = merged.ts <= tj
        keep_right = nxt.ts > tj
        merged = LocalLift(
            ts=np.concatenate([merged.ts[keep_left], nxt.ts[keep_right]]),
            points=np.vstack([merged.points[keep_left], new_pts[keep_right]]),
            derivs=np.vstack([merged.derivs[keep_left], new_der[keep_right]]),
            kind="glued")
    return merged, glue_log


# ---------------------------------------------------------------------------
# window engine (shared by zero / slice / interval machinery)
# ---------------------------------------------------------------------------

def _stratum_distance(group: FiniteGroup, x):
    """min over g != e of |g x - x| (distance proxy to singular strata)."""
    diffs = group.mats @ x - x[None, :]
    norms = np.linalg.norm(diffs, axis=1)
    norms[group.identity_index] = np.inf
    return float(np.min(norms))


def _aligned_window_grid(outer, center, pad, h, lo_clip=None, hi_clip=None):
    """Window grid around a singular time, aligned with the outer grid.

    Takes the outer grid points within pad*h of the center, adds one level
    of midpoints plus the center itself, so the window shares grid points
    with neighboring regular pieces.
    """
    outer = np.asarray(outer, dtype=float)
    lo = center - pad * h if lo_clip is None else max(center - pad * h, lo_clip)
    hi = center + pad * h if hi_clip is None else min(center + pad * h, hi_clip)
    base = outer[(outer >= lo - 1e-12) & (outer <= hi + 1e-12)]
    parts = [base, np.array([center, lo, hi])]
    if base.size >= 2:
        parts.append((base[:-1] + base[1:]) / 2.0)
    merged = np.sort(np.concatenate(parts))
    merged = merged[(merged >= lo - 1e-12) & (merged <= hi + 1e-12)]
    keep = [merged[0]]
    for t in merged[1:]:
        if t - keep[-1] > 0.05 * h:
            keep.append(t)
        elif abs(t - center) < abs(keep[-1] - center):
            keep[-1] = t
    return np.array(keep)


def _rethread(seg, pts, system, curve, options, a, b, forward, trust_cap):
    """Recompute samples (a..b] (or [b..a) backward) with tight-trust steps.

    Returns the index at which the re-threading stalled, or None if it
    completed.
    """
    ts = seg
    if forward:
        x = pts[a]
        rng = range(a + 1, b + 1)
    else:
        x = pts[a]
        rng = range(a - 1, b - 1, -1)
    prev_idx = a
    for i in rng:
        step = 1 if forward else -1
        before_idx = prev_idx - step
        before = pts[before_idx] if 0 <= before_idx < len(ts) and             not np.any(np.isnan(pts[before_idx])) else None
        nxt = _newton_step(system, curve, ts[prev_idx], x, ts[i],
                           options.newton_tol, before, trust_cap=trust_cap)
        if nxt is None or np.linalg.norm(nxt - x) > 3 * trust_cap:
            return i
        pts[i] = nxt
        x = nxt
        prev_idx = i
    return None


def _repair_kinks(seg, pts, system, curve, options, seed_idx, lo, hi):
    """Re-thread samples where the continuation hopped sheets.

    Near a mirror the reflected representative sits within one step of the
    prediction, so a continuation can hop sheets without a residual trace;
    the hop shows as a second-difference spike.  Re-running the local steps
    with a tight trust radius cannot hop; a kink that survives two repair
    passes truncates the coverage so the window machinery takes over.

    Returns the possibly shrunk coverage (lo, hi).
    """
    ts = seg
    stubborn = {}
    for _ in range(12):
        if hi - lo < 4:
            return lo, hi
        dd = np.zeros(len(ts))
        for i in range(lo + 1, hi):
            dd[i] = np.linalg.norm(pts[i + 1] - 2 * pts[i] + pts[i - 1])
        interior = dd[lo + 1:hi]
        med = float(np.median(interior))
        floor = 1e-7 * (1.0 + float(np.max(np.abs(pts[lo:hi + 1]))))
        kinks = [i for i in range(lo + 1, hi) if dd[i] > 8.0 * med + floor]
        if not kinks:
            return lo, hi
        steps = [np.linalg.norm(pts[i + 1] - pts[i])
                 for i in range(lo, hi) if dd[i + 1] <= 8.0 * med + floor]
        trust_cap = 2.0 * (float(np.median(steps)) if steps else 1e-3) + 1e-9
        k = kinks[0] if kinks[0] >= seed_idx else kinks[-1]
        stubborn[k] = stubborn.get(k, 0) + 1
        if stubborn[k] > 2:
            # unrepairable: hand the region to the window machinery
            if k >= seed_idx:
                hi = max(seed_idx, k - 2)
            else:
                lo = min(seed_idx, k + 2)
            continue
        a = max(lo, k - 3)
        b = min(hi, k + 3)
        if k >= seed_idx:
            stall = _rethread(seg, pts, system, curve, options, a, b, True,
                              trust_cap)
            if stall is not None:
                hi = stall - 1
        else:
            stall = _rethread(seg, pts, system, curve, options, b, a, False,
                              trust_cap)
            if stall is not None:
                lo = stall + 1
    return lo, hi


def _attempt_regular(curve, seg, options, depth):
    """Best-effort continuation over one segment; returns (piece, lo, hi)."""
    system = curve.system
    rng = np.random.default_rng(options.seed + 911 * depth)
    pts = np.full((seg.size, system.nvars), np.nan)
    mid = (seg.size - 1) // 2
    order = sorted(range(seg.size), key=lambda i: abs(i - mid))
    seed_idx = None
    for i in order:
        sols = _multi_start_solutions(system, curve(seg[i]), rng,
                                      options.n_starts, options.newton_tol)
        if sols:
            pts[i] = sols[0]
            seed_idx = i
            break
    if seed_idx is None:
        raise NewtonDiverged("no seed point found on segment")
    lo, hi = _continue_both(system, curve, seg, pts, seed_idx, options)
    lo, hi = _repair_kinks(seg, pts, system, curve, options, seed_idx, lo, hi)
    arr_ts = seg[lo:hi + 1]
    arr_pts = pts[lo:hi + 1]
    # one smoothing sweep so near-stratum samples inherit the angular
    # accuracy of their well-conditioned neighbors before gluing
    _smooth_polish(system, curve, arr_ts, arr_pts, options, sweeps=1)
    derivs = _derivatives_for(system, curve, arr_ts, arr_pts)
    piece = LocalLift(ts=arr_ts, points=arr_pts, derivs=derivs,
                      kind="regular")
    return piece, lo, hi


def _lift_window_engine(curve: OrbitCurve, grid, options: LiftOptions,
                        depth: int) -> LocalLift:
    """Lift a segment: fast continuation plus tracked stretches at stalls.

    Plain predictor-corrector continuation covers as much as it can; the
    uncovered ends (singular strata, tight sheet squeezes) are lifted by
    whole-group translate tracking anchored at the covered boundary, and
    the parts are glued by overlap matching.
    """
    if depth > options.depth_cap:
        raise RecursionDepthExceeded(
            f"window recursion beyond depth {options.depth_cap}")
    group = curve.group
    grid = np.asarray(grid, dtype=float)
    piece, lo, hi = _attempt_regular(curve, grid, options, depth)
    if lo == 0 and hi == grid.size - 1:
        return piece
    pieces = [piece]
    if lo > 0:
        left = _track_segment(curve, grid[:lo + 3], options,
                              anchor=piece.points[0], anchor_t=grid[lo])
        pieces.append(left)
    if hi < grid.size - 1:
        right = _track_segment(curve, grid[max(hi - 2, 0):], options,
                               anchor=piece.points[-1], anchor_t=grid[hi])
        pieces.append(right)
    merged, _ = glue_lifts(pieces, group, options.match_tol,
                           system=curve.system, curve=curve, options=options)
    return merged


def _track_segment(curve, seg, options, anchor=None, anchor_t=None) -> LocalLift:
    """Lift a stretch by per-sample solving with whole-group sheet selection.

    Each sigma(x) = c(t) sample is solved independently (multi-seeded, then
    polished to the machine floor so only true fiber points survive); the
    group translate nearest the secant prediction is kept.  This needs no
    stratum bookkeeping and tracks straight through mirrors, axes and other
    singular strata; it is the fallback wherever plain continuation stalls.
    """
    group, system = curve.group, curve.system
    grid = np.asarray(seg, dtype=float)
    pts = np.empty((grid.size, system.nvars))
    order = list(range(grid.size))
    if anchor_t is not None and abs(anchor_t - grid[0]) > abs(anchor_t - grid[-1]):
        order = order[::-1]
    cache = []
    chosen = []
    for k in order:
        t = grid[k]
        if len(chosen) >= 2:
            (k1, t1), (k2, t2) = chosen[-2], chosen[-1]
            x1, x2 = pts[k1], pts[k2]
            pred = x2 + (x2 - x1) * ((t - t2) / max(abs(t2 - t1), 1e-14)) \
                * np.sign(t2 - t1)
        elif chosen:
            pred = pts[chosen[-1][0]]
        elif anchor is not None:
            pred = np.asarray(anchor, dtype=float)
        else:
            pred = None
        if pred is None:
            rng = np.random.default_rng(options.seed + 77)
            sols = _multi_start_solutions(system, curve(t), rng,
                                          options.n_starts, options.newton_tol)
            if not sols:
                raise NewtonDiverged(f"tracking found no seed at t={t:.6g}")
            pts[k] = sols[0]
            chosen.append((k, t))
            continue
        x_raw = _solve_near(system, curve, t, pred, np.inf, options, cache,
                            seeds_extra=(pred,))
        cands = group.mats @ x_raw
        dists = np.linalg.norm(cands - pred[None, :], axis=1)
        pts[k] = cands[int(np.argmin(dists))]
        chosen.append((k, t))
    _smooth_polish(system, curve, grid, pts, options)
    derivs = _derivatives_for(system, curve, grid, pts)
    return LocalLift(ts=grid, points=pts, derivs=derivs, kind="tracked")


# ---------------------------------------------------------------------------
# reduction to root tracking
# ---------------------------------------------------------------------------

@dataclass
class ReductionPlan:
    group: FiniteGroup
    system: GeneratorSystem
    components: list   # dicts with v, stabilizer, coset_reps, functionals, p_polys
    k: int


def build_reduction(group: FiniteGroup, decomposition: Decomposition,
                    system: GeneratorSystem) -> ReductionPlan:
    """Per-component linear functionals and their symmetric-function curves.

    For each irreducible component a maximal-isotropy point v is chosen; the
    pairwise distinct functionals x -> <v | g x> (one per right coset of the
    stabilizer) are the roots of a monic polynomial whose coefficients are
    invariant, hence expressible in the generators.
    """
    iso = max_isotropy_per_component(group, decomposition)
    comps = []
    k_max = system.d
    for data, basis in zip(iso, decomposition.components):
        v = data.base_point
        rows = []
        reps = []
        seen = set()
        for g in range(group.order):
            row = group.mats[g].T @ v
            key = tuple(np.round(row, 9).tolist())
            if key not in seen:
                seen.add(key)
                rows.append(row)
                reps.append(g)
        k_i = len(rows)
        if k_i != data.index:
            raise ArithmeticError("coset count disagrees with the isotropy index")
        F = np.array(rows)
        forms = [Poly(group.dim, {tuple(1 if j == i else 0 for j in range(group.dim)):
                                  float(row[i]) for i in range(group.dim)
                                  if abs(row[i]) > 1e-14})
                 for row in rows]
        # elementary symmetric polynomials of the linear forms, by the
        # convolution e_j(old + form) = e_j(old) + e_{j-1}(old) * form
        elem = [Poly.constant(group.dim, 1.0)]
        for form in forms:
            new = []
            for j in range(len(elem) + 1):
                acc = Poly(group.dim)
                if j < len(elem):
                    acc = acc + elem[j]
                if j >= 1:
                    acc = acc + elem[j - 1] * form
                new.append(acc)
            elem = new
        a_polys = elem[1:]
        p_polys = [express_in_generators(a, system) for a in a_polys]
        comps.append({
            "v": v,
            "stabilizer": data.stabilizer,
            "coset_reps": reps,
            "functionals": F,
            "a_polys": a_polys,
            "p_polys": p_polys,
            "k_i": k_i,
        })
        k_max = max(k_max, k_i)
    return ReductionPlan(group=group, system=system, components=comps, k=k_max)


def _eval_p(p_poly: Poly, sigma_vals: np.ndarray) -> float:
    total = 0.0
    for a, c in p_poly.terms.items():
        v = float(c)
        for val, kk in zip(sigma_vals, a):
            v *= val ** kk
        total += v
    return total


def reduction_check(plan: ReductionPlan, lift: LiftResult,
                    curve: OrbitCurve, tol: float = 1e-7) -> dict:
    """Verify a lift against tracked roots of the reduction polynomials.

    For every component, the coefficient curves p_{i,j}(c(t)) define a
    monic real-rooted polynomial curve; its tracked roots must equal the
    multiset { <v_i | g x(t)> } of functional values of the lift.
    """
    report = {"components": [], "max_multiset_error": 0.0}
    ts = lift.grid
    cvals = curve.batch(ts)
    scale = 1.0 + np.max(np.abs(lift.points))
    for ci, comp in enumerate(plan.components):
        F = comp["functionals"]
        k_i = comp["k_i"]
        coeff_rows = np.array([[_eval_p(p, cv) for p in comp["p_polys"]]
                               for cv in cvals])
        from scipy.interpolate import CubicSpline
        spline = CubicSpline(ts, coeff_rows, axis=0)
        hcurve = HyperbolicCurve(k_i, lambda t, s=spline: s(t),
                                 domain=(ts[0], ts[-1]))
        track = track_roots(hcurve, ts, tol=1e-6)
        lift_vals = lift.points @ F.T   # (T, k_i)
        worst = 0.0
        for i, t in enumerate(ts):
            j = int(np.argmin(np.abs(track.grid - t)))
            a = np.sort(lift_vals[i])
            b = np.sort(track.roots[j])
            worst = max(worst, float(np.max(np.abs(a - b))))
        if worst > tol * scale:
            raise MultisetMismatch(
                f"component {ci}: tracked roots deviate from functional values "
                f"by {worst:.3e}")
        report["components"].append({
            "k_i": k_i,
            "multiset_error": worst,
            "track_bound": derivative_bound(track),
            "lift_bound": float(np.max(np.linalg.norm(lift.derivatives, axis=1))),
        })
        report["max_multiset_error"] = max(report["max_multiset_error"], worst)
    return report


# ---------------------------------------------------------------------------
# top-level orchestration
# ---------------------------------------------------------------------------

def _smooth_polish(system, curve, ts, pts, options, sweeps=2):
    """Project local polynomial fits back onto the fiber, in place.

    Independent per-sample solves leave jitter in directions the Jacobian
    pins only at high order; re-seeding each sample from a cubic fit of its
    neighbors and converging back to sigma(x) = c(t) removes it while never
    leaving the fiber.
    """
    T = pts.shape[0]
    for _ in range(sweeps):
        for i in range(T):
            if np.any(np.isnan(pts[i])):
                continue
            idx = [j for j in range(max(0, i - 3), min(T, i + 4))
                   if j != i and not np.any(np.isnan(pts[j]))]
            if len(idx) >= 4:
                tloc = np.array([ts[j] - ts[i] for j in idx])
                pred = np.empty(pts.shape[1])
                for c in range(pts.shape[1]):
                    coeffs = np.polyfit(tloc, pts[idx, c], 3)
                    pred[c] = np.poly1d(coeffs)(0.0)
                if np.linalg.norm(pred - pts[i]) > 0.2 * (1 + np.linalg.norm(pts[i])):
                    pred = pts[i]  # kink/edge guard: do not chase the fit
            else:
                pred = pts[i]
            x = _gauss_newton(system, curve(ts[i]), pred, options.newton_tol,
                              max_iter=12, trust=0.1)
            if x is not None and np.linalg.norm(x - pts[i]) < 0.2 * (1 + np.linalg.norm(pts[i])):
                pts[i] = x


def _find_zero_times(curve: OrbitCurve, grid, zero_tol, scale):
    """Times where the curve vanishes: isolated zeros and flat runs."""
    c1 = np.array([curve(t)[0] for t in grid])
    mask = c1 <= zero_tol * scale
    zeros = []
    flats = []
    i = 0
    T = grid.size
    while i < T:
        if not mask[i]:
            i += 1
            continue
        j = i
        while j + 1 < T and mask[j + 1]:
            j += 1
        if j - i >= 2:
            flats.append((grid[i], grid[j]))
        else:
            # refine the isolated zero by ternary search on c1
            lo = grid[max(i - 1, 0)]
            hi = grid[min(j + 1, T - 1)]
            for _ in range(80):
                m1 = lo + (hi - lo) / 3
                m2 = hi - (hi - lo) / 3
                if curve(m1)[0] <= curve(m2)[0]:
                    hi = m2
                else:
                    lo = m1
            zeros.append(0.5 * (lo + hi))
        i = j + 1
    return zeros, flats


def lift_curve(curve: OrbitCurve, options: Optional[LiftOptions] = None) -> LiftResult:
    """Global differentiable lift of a curve in the orbit space.

    Orchestration: locate zeros of the curve, lift each zero-free stretch by
    independently seeded continuation (crossing singular strata via the
    stabilizer machinery), lift windows around each zero by
    desingularization, set flat stretches to zero, glue all pieces, then
    emit residuals, derivative bounds and regularity diagnostics.
    """
    options = options or LiftOptions()
    a, b = curve.domain
    grid = options.grid if options.grid is not None else \
        np.linspace(a, b, options.grid_count)
    grid = np.asarray(grid, dtype=float)
    h = float(np.min(np.diff(grid)))
    cvals = curve.batch(grid)
    scale = 1.0 + float(np.max(np.abs(cvals)))
    warnings = []
    if curve.smoothness_class < curve.system.d:
        warnings.append("declared smoothness class is below the degree bound d")

    zeros, flats = _find_zero_times(curve, grid, options.zero_tol, scale)
    window = options.window_pad * h

    # flat stretches contribute zero-lift pieces; their boundary points are
    # themselves zeros of the curve and get one-sided windows
    cut_points = []
    for z in zeros:
        cut_points.append((max(z - window, a), min(z + window, b), "zero", z))
    boundary_zeros = []
    for lo, hi in flats:
        cut_points.append((lo, hi, "flat", None))
        if lo > a + 2 * h:
            boundary_zeros.append((lo, -1))
        if hi < b - 2 * h:
            boundary_zeros.append((hi, +1))
    cut_points.sort()

    pieces = []
    for lo, hi, kind, z in cut_points:
        if kind == "zero":
            wgrid = _aligned_window_grid(grid, z, options.window_pad, h,
                                         lo_clip=a, hi_clip=b)
            pieces.append(lift_through_zero(curve, z, window, grid=wgrid,
                                            options=options))
        else:
            run = grid[(grid >= lo - 1e-12) & (grid <= hi + 1e-12)]
            m = curve.system.nvars
            if run.size:
                pieces.append(LocalLift(ts=run, points=np.zeros((run.size, m)),
                                        derivs=np.zeros((run.size, m)),
                                        kind="flat"))
    for z, side in boundary_zeros:
        lo_clip = z if side > 0 else max(z - window, a)
        hi_clip = z if side < 0 else min(z + window, b)
        wgrid = _aligned_window_grid(grid, z, options.window_pad, h,
                                     lo_clip=lo_clip, hi_clip=hi_clip)
        if wgrid.size >= 3:
            pieces.append(lift_through_zero(curve, z, window, grid=wgrid,
                                            options=options, side=side))

    # zero-free stretches, trimmed to end at the outer parts of the windows
    avoid = [(z - window + 1.5 * h, z + window - 1.5 * h) for z in zeros]
    avoid += [(lo - 2 * h, hi + 2 * h) for lo, hi in flats]
    free_mask = np.ones(grid.size, dtype=bool)
    for lo, hi in avoid:
        free_mask &= ~((grid > lo) & (grid < hi))
    idx = np.nonzero(free_mask)[0]
    runs = []
    start = None
    for pos, i in enumerate(idx):
        if start is None:
            start = i
        if pos + 1 == idx.size or idx[pos + 1] != i + 1:
            runs.append((start, i))
            start = None
    for i0, i1 in runs:
        seg = grid[i0:i1 + 1]
        if seg.size >= 2:
            pieces.append(_lift_window_engine(curve, seg, options, 0))

    if not pieces:
        raise Inconsistent("no liftable segments found")
    merged, glue_log = glue_lifts(pieces, curve.group, options.match_tol,
                                  system=curve.system, curve=curve,
                                  options=options)

    # final polish pass, then residuals and derivatives on the merged grid;
    # after gluing and smoothing the sample fit is reliable everywhere, so
    # stale per-piece derivative values are not carried over
    pts = merged.points
    _smooth_polish(curve.system, curve, merged.ts, pts, options)
    merged.derivs = _derivatives_for(curve.system, curve, merged.ts, pts)
    residuals = np.array([
        float(np.max(np.abs(curve.system.evaluate(pts[i]) - curve(t))))
        for i, t in enumerate(merged.ts)])
    if np.max(residuals) > options.residual_tol * scale:
        raise Inconsistent(
            f"final residual {np.max(residuals):.3e} exceeds tolerance "
            f"{options.residual_tol * scale:.3e}")

    diagnostics = _diagnostics(curve, merged, residuals, glue_log,
                               zeros, flats, options, warnings)
    zero_set = _classify_zero_set(curve, merged, zeros, flats, grid, options)
    return LiftResult(grid=merged.ts, points=merged.points,
                      derivatives=merged.derivs, residuals=residuals,
                      glue_log=glue_log, diagnostics=diagnostics,
                      zero_set=zero_set)


def _diagnostics(curve, merged, residuals, glue_log, zeros, flats, options,
                 warnings):
    derivs = merged.derivs
    dnorm = np.linalg.norm(derivs, axis=1)
    diag = {
        "max_residual": float(np.max(residuals)),
        "derivative_bound": float(np.nanmax(dnorm)),
        "glue_count": len(glue_log),
        "warnings": warnings,
        "window_policy": ("zero/crossing windows span window_pad grid steps; "
                          "accumulation flags use a 3-step sample window"),
    }
    # C1 modulus-of-continuity table over refinement levels
    base_ts = merged.ts
    tables = []
    second_diffs = []
    for level in range(options.refine_levels + 1):
        if level == 0:
            res = merged
        else:
            factor = 2 ** level
            fine = np.linspace(base_ts[0], base_ts[-1],
                               (base_ts.size - 1) * factor + 1)
            sub_opts = LiftOptions(**{**options.__dict__, "grid": fine,
                                      "refine_levels": 0})
            try:
                res = lift_curve(curve, sub_opts)
            except Exception:
                break
        dd = np.diff(res.derivatives if hasattr(res, "derivatives")
                     else res.derivs, axis=0)
        tables.append(float(np.max(np.linalg.norm(dd, axis=1))))
        pts = res.points
        ts = res.grid if hasattr(res, "grid") else res.ts
        sd_here = {}
        for entry in glue_log:
            tg = entry["t"]
            i = int(np.argmin(np.abs(ts - tg)))
            if 0 < i < ts.size - 1:
                hh = 0.5 * (ts[i + 1] - ts[i - 1])
                sd = (pts[i + 1] - 2 * pts[i] + pts[i - 1]) / hh ** 2
                sd_here[f"{tg:.6g}"] = float(np.linalg.norm(sd))
        second_diffs.append(sd_here)
    diag["c1_modulus_table"] = tables
    diag["second_difference_tables"] = second_diffs
    return diag


def _classify_zero_set(curve, merged, zeros, flats, grid, options):
    """E / F sets of the zero structure, from grid samples (heuristic)."""
    h = float(np.min(np.diff(grid)))
    ts = merged.ts
    pnorm = np.linalg.norm(merged.points, axis=1)
    dnorm = np.linalg.norm(merged.derivs, axis=1)
    F_times = [float(t) for i, t in enumerate(ts)
               if pnorm[i] <= 1e-7 and dnorm[i] <= 1e-5]
    E_times = []
    for lo, hi in flats:
        E_times.extend([float(lo), float(hi)])
    all_zero_times = sorted(zeros + [t for pair in flats for t in pair])
    iso = []
    acc = list(E_times)
    for z in zeros:
        near = [u for u in all_zero_times if u != z and abs(u - z) <= 3 * h]
        (acc if near else iso).append(float(z))
    F_iso, F_acc = [], []
    for t in F_times:
        near = [u for u in F_times if u != t and abs(u - t) <= 3 * h]
        (F_acc if near else F_iso).append(t)
    return {
        "E": sorted(set(acc)),
        "zeros_isolated": sorted(set(iso)),
        "flat_intervals": [[float(lo), float(hi)] for lo, hi in flats],
        "F_isolated": F_iso,
        "F_accumulation": F_acc,
    }
