"""Invariant polynomial generation and orbit maps.

Generation is Molien-guided: the graded dimension of the invariant ring is
computed exactly from the group (series of the averaged 1/det(I - t g)),
and Reynolds averages of monomials are taken only in degrees where the
products of lower-degree generators leave a gap.  New generators are, by
construction, independent modulo products of earlier ones, which is exactly
the graded minimality certificate.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import exactlinalg as ela
from .errors import (CapTooLow, FieldOverflow, NotInAlgebra, NotInvariant,
                     NotMinimal)
from .groups import FiniteGroup
from .poly import MONOMIAL_ORDERS, Poly, monomials_of_degree
from .scalars import (FIELD_FLOAT, QuadExt, is_exact_field, one_of,
                      scalar_from_json, scalar_to_json)

__all__ = [
    "GeneratorSystem",
    "OrbitMap",
    "reynolds",
    "molien_dims",
    "generate_invariants",
    "compute_d",
    "express_in_generators",
    "change_of_generators",
    "restrict_to_subspace",
    "direct_sum_system",
    "orbit_map_eval",
    "graded_dimensions",
    "system_to_json",
    "system_from_json",
]

_MAX_EXACT_DIGITS = 6000  # numerator/denominator digit guard for FieldOverflow


# ---------------------------------------------------------------------------
# Reynolds operator
# ---------------------------------------------------------------------------

class _SubstitutionCache:
    """Per-group cache of powers of the substituted coordinate forms.

    For element g, variable i and power k the cache holds (row_i(g) . x)^k
    as a Poly, so Reynolds averages of many monomials share work.
    """

    def __init__(self, group: FiniteGroup):
        self.group = group
        self.exact = group.is_exact()
        self._pows = {}

    def _form(self, gi: int, var: int) -> Poly:
        m = self.group.dim
        if self.exact:
            row = self.group.exact_elements[gi][var]
        else:
            row = self.group.mats[gi][var]
        terms = {}
        for j, c in enumerate(row):
            if c != 0:
                exp = [0] * m
                exp[j] = 1
                terms[tuple(exp)] = c
        return Poly(m, terms)

    def power(self, gi: int, var: int, k: int) -> Poly:
        key = (gi, var, k)
        got = self._pows.get(key)
        if got is not None:
            return got
        if k == 0:
            one = 1.0 if not self.exact else one_of(self.group.field)
            p = Poly.constant(self.group.dim, one)
        elif k == 1:
            p = self._form(gi, var)
        else:
            p = self.power(gi, var, k - 1) * self.power(gi, var, 1)
        self._pows[key] = p
        return p

    def monomial_image(self, gi: int, exp) -> Poly:
        p = None
        for var, k in enumerate(exp):
            if k == 0:
                continue
            q = self.power(gi, var, k)
            p = q if p is None else p * q
        if p is None:
            one = 1.0 if not self.exact else one_of(self.group.field)
            return Poly.constant(self.group.dim, one)
        return p


_caches: dict = {}


def _cache_for(group: FiniteGroup) -> _SubstitutionCache:
    got = _caches.get(id(group))
    if got is None or got.group is not group:
        got = _SubstitutionCache(group)
        _caches[id(group)] = got
    return got


def _check_overflow(p: Poly):
    for c in p.terms.values():
        if isinstance(c, Fraction):
            if len(str(c.numerator)) > _MAX_EXACT_DIGITS or len(str(c.denominator)) > _MAX_EXACT_DIGITS:
                raise FieldOverflow("exact coefficient exceeded the size bound")
        elif isinstance(c, QuadExt):
            for part in (c.a, c.b):
                if len(str(part.numerator)) > _MAX_EXACT_DIGITS or len(str(part.denominator)) > _MAX_EXACT_DIGITS:
                    raise FieldOverflow("exact coefficient exceeded the size bound")


def reynolds(group: FiniteGroup, p: Poly) -> Poly:
    """Group average (1/|G|) sum_g p(g x); a projection onto invariants."""
    if p.nvars != group.dim:
        raise ValueError(f"polynomial has {p.nvars} variables, group acts on {group.dim}")
    cache = _cache_for(group)
    total = Poly(group.dim)
    for gi in range(group.order):
        img = Poly(group.dim)
        for exp, c in p.terms.items():
            img = img + cache.monomial_image(gi, exp).scale(c)
        total = total + img
    if group.is_exact():
        inv_order = one_of(group.field) / group.order
        out = total.scale(inv_order)
        _check_overflow(out)
        return out
    out = total.scale(1.0 / group.order)
    return out.prune(1e-13 * max(1.0, out.max_abs_coeff()))


def _monomial_reynolds(group: FiniteGroup, exp) -> Poly:
    cache = _cache_for(group)
    total = Poly(group.dim)
    for gi in range(group.order):
        total = total + cache.monomial_image(gi, exp)
    if group.is_exact():
        return total.scale(one_of(group.field) / group.order)
    out = total.scale(1.0 / group.order)
    return out.prune(1e-13 * max(1.0, out.max_abs_coeff()))


# ---------------------------------------------------------------------------
# Molien series
# ---------------------------------------------------------------------------

def _char_poly_coeffs(mat, m, exact, field):
    """Coefficients e_0..e_m of det(I - t g) = sum_j (-1)^j e_j t^j."""
    if exact:
        one = one_of(field)
        power = mat
        traces = []
        for _ in range(m):
            traces.append(sum(power[i][i] for i in range(m)))
            power = ela.mat_mul(power, mat)
        e = [one]
        for j in range(1, m + 1):
            acc = None
            for i in range(1, j + 1):
                term = e[j - i] * traces[i - 1] * ((-1) ** (i - 1))
                acc = term if acc is None else acc + term
            e.append(acc / j)
        return e
    arr = np.asarray(mat, dtype=float)
    power = arr.copy()
    traces = []
    for _ in range(m):
        traces.append(np.trace(power))
        power = power @ arr
    e = [1.0]
    for j in range(1, m + 1):
        acc = 0.0
        for i in range(1, j + 1):
            acc += e[j - i] * traces[i - 1] * ((-1) ** (i - 1))
        e.append(acc / j)
    return e


def _series_inverse(coeffs, cap, one):
    """Power series inverse of sum_j coeffs[j] t^j up to degree cap."""
    inv = [one / coeffs[0]]
    for k in range(1, cap + 1):
        acc = None
        for i in range(1, min(k, len(coeffs) - 1) + 1):
            term = coeffs[i] * inv[k - i]
            acc = term if acc is None else acc + term
        val = -(acc / coeffs[0]) if acc is not None else (one - one) / coeffs[0]
        inv.append(val)
    return inv


def molien_dims(group: FiniteGroup, cap: int):
    """Graded dimensions dim R[V]^G_e for e = 0..cap (exact integers)."""
    m = group.dim
    exact = group.is_exact()
    one = one_of(group.field) if exact else 1.0
    total = [one - one] * (cap + 1) if exact else [0.0] * (cap + 1)
    for gi in range(group.order):
        mat = group.exact_elements[gi] if exact else group.mats[gi]
        e = _char_poly_coeffs(mat, m, exact, group.field)
        denom = [((-1) ** j) * e[j] for j in range(m + 1)]
        series = _series_inverse(denom, cap, one)
        total = [a + b for a, b in zip(total, series)]
    dims = []
    for val in total:
        if exact:
            q = val / group.order
            if isinstance(q, QuadExt):
                if q.b != 0:
                    raise ArithmeticError("Molien coefficient not rational")
                q = q.a
            if q.denominator != 1:
                raise ArithmeticError("Molien coefficient not an integer")
            dims.append(int(q))
        else:
            q = val / group.order
            r = round(q)
            if abs(q - r) > 1e-6:
                raise ArithmeticError(f"Molien coefficient {q} far from integer")
            dims.append(int(r))
    return dims


# ---------------------------------------------------------------------------
# row spaces for rank bookkeeping
# ---------------------------------------------------------------------------

class _ExactRowSpace:
    def __init__(self, ncols):
        self.ncols = ncols
        self.rows = {}  # pivot index -> normalized row list

    def _reduce(self, vec):
        for piv in sorted(self.rows):
            if vec[piv] != 0:
                f = vec[piv]
                row = self.rows[piv]
                vec = [a - f * b for a, b in zip(vec, row)]
        return vec

    def insert(self, vec):
        vec = self._reduce(list(vec))
        for i, x in enumerate(vec):
            if x != 0:
                self.rows[i] = [v / x for v in vec]
                return True
        return False

    @property
    def rank(self):
        return len(self.rows)


class _FloatRowSpace:
    def __init__(self, ncols, tol=1e-8):
        self.ncols = ncols
        self.tol = tol
        self.q = []
        self.min_margin = np.inf

    def insert(self, vec):
        v = np.asarray(vec, dtype=float)
        n0 = np.linalg.norm(v)
        if n0 == 0:
            return False
        for q in self.q:
            v = v - (q @ v) * q
        n1 = np.linalg.norm(v)
        margin = n1 / n0
        if margin <= self.tol:
            return False
        # one re-orthogonalization pass for stability
        for q in self.q:
            v = v - (q @ v) * q
        n1 = np.linalg.norm(v)
        if n1 / n0 <= self.tol:
            return False
        self.min_margin = min(self.min_margin, margin)
        self.q.append(v / n1)
        return True

    @property
    def rank(self):
        return len(self.q)


def _new_rowspace(exact, ncols):
    return _ExactRowSpace(ncols) if exact else _FloatRowSpace(ncols)


# ---------------------------------------------------------------------------
# generator systems
# ---------------------------------------------------------------------------

@dataclass
class GeneratorSystem:
    """Homogeneous invariant generators with sigma_1 = |x|^2 first."""
    gens: list                      # list of Poly
    degrees: list                   # degrees, aligned with gens
    nvars: int
    field: str
    minimal: bool
    minimal_degrees: list           # degrees of a minimal generating set
    sigma1_minimal: bool = True
    certificate: dict = dc_field(default_factory=dict)
    group: Optional[FiniteGroup] = None
    _compiled: Optional[list] = None
    _jac_compiled: Optional[list] = None

    @property
    def n(self):
        return len(self.gens)

    @property
    def d(self):
        return max(self.minimal_degrees) if self.minimal_degrees else max(self.degrees)

    # -- float evaluation --------------------------------------------------
    def _compile(self):
        if self._compiled is None:
            self._compiled = [g.float_arrays() for g in self.gens]
        return self._compiled

    def _compile_jacobian(self):
        if self._jac_compiled is None:
            self._jac_compiled = [[g.diff(i).float_arrays() for i in range(self.nvars)]
                                  for g in self.gens]
        return self._jac_compiled

    def evaluate(self, x):
        """sigma(x) for a single float point x -> array of length n."""
        x = np.asarray(x, dtype=float)
        out = np.empty(self.n)
        for i, (E, c) in enumerate(self._compile()):
            if E.shape[0] == 0:
                out[i] = 0.0
            else:
                out[i] = np.prod(x[None, :] ** E, axis=1) @ c
        return out

    def evaluate_batch(self, X):
        """sigma on rows of X, shape (T, m) -> (T, n)."""
        X = np.asarray(X, dtype=float)
        T = X.shape[0]
        out = np.empty((T, self.n))
        for i, (E, c) in enumerate(self._compile()):
            if E.shape[0] == 0:
                out[:, i] = 0.0
            else:
                out[:, i] = np.prod(X[:, None, :] ** E[None, :, :], axis=2) @ c
        return out

    def jacobian(self, x):
        """d sigma at x, shape (n, m)."""
        x = np.asarray(x, dtype=float)
        J = np.empty((self.n, self.nvars))
        for i, row in enumerate(self._compile_jacobian()):
            for j, (E, c) in enumerate(row):
                if E.shape[0] == 0:
                    J[i, j] = 0.0
                else:
                    J[i, j] = np.prod(x[None, :] ** E, axis=1) @ c
        return J

    def eval_exact(self, point):
        return [g.eval(point) for g in self.gens]


class OrbitMap:
    """Evaluable orbit map sigma = (sigma_1, ..., sigma_n)."""

    def __init__(self, system: GeneratorSystem):
        self.system = system

    def __call__(self, v):
        return orbit_map_eval(self.system, v)

    def jacobian(self, v):
        return self.system.jacobian(v)

    def scaled_point(self, y, t: float):
        """Image of t*v given y = sigma(v), using the degree weights."""
        return np.array([t ** d for d in self.system.degrees]) * np.asarray(y)


def orbit_map_eval(system: GeneratorSystem, v):
    """Evaluate the orbit map; exact when both system and point are exact."""
    if is_exact_field(system.field) and not isinstance(v, np.ndarray) \
            and all(not isinstance(x, float) for x in v):
        return system.eval_exact(list(v))
    return system.evaluate(np.asarray(v, dtype=float))


# ---------------------------------------------------------------------------
# generation
# ---------------------------------------------------------------------------

def _weighted_exponents(degrees, target):
    """All tuples a with sum a_i * degrees_i == target (a_i >= 0)."""
    out = []

    def rec(i, remaining, prefix):
        if i == len(degrees):
            if remaining == 0:
                out.append(tuple(prefix))
            return
        step = degrees[i]
        max_a = remaining // step
        for a in range(max_a + 1):
            rec(i + 1, remaining - a * step, prefix + [a])

    rec(0, target, [])
    return out


class _ProductCache:
    def __init__(self):
        self.pows = {}

    def power(self, gen_idx, gen_poly, k):
        key = (gen_idx, k)
        got = self.pows.get(key)
        if got is not None:
            return got
        if k == 1:
            p = gen_poly
        else:
            p = self.power(gen_idx, gen_poly, k - 1) * gen_poly
        self.pows[key] = p
        return p

    def product(self, gens, expo):
        p = None
        for i, a in enumerate(expo):
            if a == 0:
                continue
            q = self.power(i, gens[i], a)
            p = q if p is None else p * q
        return p


def _orbit_separation_probe(system: GeneratorSystem, group: FiniteGroup,
                            seed: int = 7, trials: int = 5):
    """Raise CapTooLow when sigma fails to separate sampled orbits."""
    rng = np.random.default_rng(seed)
    m = group.dim
    for _ in range(trials):
        v = rng.standard_normal(m)
        v /= np.linalg.norm(v)
        target = system.evaluate(v)
        scale = 1.0 + np.max(np.abs(target))
        u = rng.standard_normal(m)
        u /= np.linalg.norm(u)
        # Gauss-Newton toward sigma(u) = target
        converged = False
        for _ in range(80):
            r = system.evaluate(u) - target
            if np.max(np.abs(r)) <= 1e-11 * scale:
                converged = True
                break
            J = system.jacobian(u)
            step, *_ = np.linalg.lstsq(J, -r, rcond=None)
            if not np.all(np.isfinite(step)):
                break
            # damped update
            n = np.linalg.norm(step)
            if n > 0.5:
                step *= 0.5 / n
            u = u + step
        if not converged:
            continue
        dist_to_orbit = min(np.linalg.norm(group.mats[i] @ u - v)
                            for i in range(group.order))
        # also try the orbit of u against v in the other orientation
        dist_rev = min(np.linalg.norm(group.mats[i] @ v - u)
                       for i in range(group.order))
        if min(dist_to_orbit, dist_rev) > 1e-5:
            raise CapTooLow(
                "generated system maps points of distinct orbits to the same "
                "value; raise the degree cap")


def generate_invariants(group: FiniteGroup, degree_cap: Optional[int] = None,
                        monomial_order: str = "grlex",
                        check_separation: Optional[bool] = None) -> GeneratorSystem:
    """Minimal homogeneous generator system of the invariant ring.

    The default degree cap comes from the catalog metadata when present.
    In each degree the products of earlier generators are ranked against
    the Molien dimension; Reynolds averages of monomials fill the gap.
    """
    meta = group.spec.catalog_meta or {}
    if degree_cap is None:
        if "degrees" in meta:
            degree_cap = max(meta["degrees"])
        else:
            raise ValueError("degree_cap required for groups without catalog metadata")
    scan_cap = max(int(degree_cap), 2)
    if check_separation is None:
        check_separation = "degrees" not in meta
    exact = group.is_exact()
    m = group.dim
    one = one_of(group.field) if exact else 1.0
    dims = molien_dims(group, scan_cap)
    order_key = MONOMIAL_ORDERS[monomial_order]

    gens = []
    gen_degrees = []
    cert = {}
    float_margin = np.inf
    pcache = _ProductCache()
    sigma1 = Poly.norm_square(m, one)

    for e in range(1, scan_cap + 1):
        dim_e = dims[e]
        if dim_e == 0:
            continue
        basis = monomials_of_degree(m, e)
        basis_index = {exp: i for i, exp in enumerate(basis)}
        space = _new_rowspace(exact, len(basis))
        for expo in _weighted_exponents(gen_degrees, e):
            if sum(expo) < 2:
                continue  # single generators are not products
            prod = pcache.product(gens, expo)
            space.insert(prod.coefficient_vector(basis_index))
        products_rank = space.rank
        needed = dim_e - products_rank
        cert[e] = {"dim": dim_e, "products_rank": products_rank, "new": 0}
        if needed <= 0:
            continue
        found = []
        if e == 2 and space.insert(sigma1.coefficient_vector(basis_index)):
            found.append(sigma1)
        if len(found) < needed:
            for exp in sorted(monomials_of_degree(m, e), key=order_key):
                cand = _monomial_reynolds(group, exp)
                if cand.is_zero():
                    continue
                vec = cand.coefficient_vector(basis_index)
                if space.insert(vec):
                    found.append(_normalize_gen(cand, basis, exact))
                    if len(found) == needed:
                        break
        if len(found) != needed:
            raise ArithmeticError(
                f"degree {e}: found {len(found)} of {needed} new invariants "
                "(numerical rank trouble)")
        gens.extend(found)
        gen_degrees.extend([e] * needed)
        cert[e]["new"] = needed
        if not exact:
            float_margin = min(float_margin, getattr(space, "min_margin", np.inf))

    minimal_degrees = list(gen_degrees)
    sigma1_minimal = any(g == sigma1 for g in gens)
    if sigma1_minimal:
        # sigma1 sits among the degree-2 generators; move it to the front
        idx = next(i for i, g in enumerate(gens) if g == sigma1)
        gens.insert(0, gens.pop(idx))
        gen_degrees.insert(0, gen_degrees.pop(idx))
    else:
        # trivial-action convention: keep the norm-square first anyway
        gens.insert(0, sigma1)
        gen_degrees.insert(0, 2)
    ordered = [0] + sorted(range(1, len(gens)), key=lambda i: (gen_degrees[i], i))
    gens = [gens[i] for i in ordered]
    gen_degrees = [gen_degrees[i] for i in ordered]

    if not exact:
        cert["float_margin"] = None if not np.isfinite(float_margin) else float(float_margin)
    system = GeneratorSystem(gens=gens, degrees=gen_degrees, nvars=m,
                             field=group.field, minimal=True,
                             minimal_degrees=sorted(minimal_degrees),
                             sigma1_minimal=sigma1_minimal,
                             certificate=cert, group=group)
    if check_separation:
        _orbit_separation_probe(system, group)
    return system


def _normalize_gen(p: Poly, basis, exact) -> Poly:
    """Scale so the leading (first basis) coefficient is 1; deterministic."""
    for exp in basis:
        c = p.terms.get(exp)
        if c is not None and c != 0:
            return p.scale((one_of("rational") if isinstance(c, Fraction) else 1) / c
                           if not isinstance(c, float) else 1.0 / c)
    return p


def compute_d(system: GeneratorSystem) -> int:
    """Maximal degree of a minimal homogeneous generator system."""
    if not system.minimal or not system.certificate:
        raise NotMinimal("system lacks a minimality certificate")
    return max(system.minimal_degrees)


# ---------------------------------------------------------------------------
# re-expression in generators
# ---------------------------------------------------------------------------

def _express_homogeneous(p: Poly, system: GeneratorSystem, pcache: _ProductCache):
    e = p.degree()
    combos = [a for a in _weighted_exponents(system.degrees, e)]
    if not combos:
        return None
    combos.sort(key=lambda a: (sum(a), a))  # graded-lex, smallest first
    basis = monomials_of_degree(system.nvars, e)
    basis_index = {exp: i for i, exp in enumerate(basis)}
    cols = []
    for a in combos:
        if sum(a) == 0:
            prod = Poly.constant(system.nvars, one_of(system.field)
                                 if is_exact_field(system.field) else 1.0)
        else:
            prod = pcache.product(system.gens, a)
        cols.append(prod.coefficient_vector(basis_index))
    rhs = p.coefficient_vector(basis_index)
    if is_exact_field(system.field) and all(not isinstance(c, float) for c in p.terms.values()):
        rows = [[cols[j][i] for j in range(len(cols))] for i in range(len(basis))]
        sol = ela.exact_solve(rows, rhs)
        if sol is None:
            return None
        return {a: c for a, c in zip(combos, sol) if c != 0}
    A = np.array(cols, dtype=float).T
    b = np.array([float(x) for x in rhs])
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    resid = np.linalg.norm(A @ sol - b)
    if resid > 1e-8 * max(1.0, np.linalg.norm(b)):
        return None
    sol[np.abs(sol) < 1e-12 * max(1.0, np.max(np.abs(sol)))] = 0.0
    return {a: c for a, c in zip(combos, sol.tolist()) if c != 0}


def express_in_generators(p: Poly, system: GeneratorSystem,
                          verify: bool = True) -> Poly:
    """q with q(sigma_1, ..., sigma_n) = p, supported on the graded-lex
    smallest product monomials.  Raises NotInAlgebra when no combination of
    generator products matches.
    """
    if p.nvars != system.nvars:
        raise ValueError("variable count mismatch")
    n = system.n
    pcache = _ProductCache()
    terms = {}
    for e in sorted({sum(exp) for exp in p.terms}):
        part = p.homogeneous_part(e)
        if part.is_zero():
            continue
        combo = _express_homogeneous(part, system, pcache)
        if combo is None:
            raise NotInAlgebra(f"degree-{e} part is not in the generated algebra "
                               "up to the product-degree cap")
        for a, c in combo.items():
            cur = terms.get(a)
            terms[a] = c if cur is None else cur + c
    q = Poly(n, {a: c for a, c in terms.items() if c != 0})
    if verify:
        if is_exact_field(system.field) and all(not isinstance(c, float) for c in p.terms.values()):
            expanded = _expand_q(q, system, pcache)
            if expanded != p:
                raise NotInAlgebra("verification by exact expansion failed")
        else:
            rng = np.random.default_rng(3)
            for _ in range(4):
                x = rng.standard_normal(system.nvars)
                lhs = _eval_q_float(q, system.evaluate(x))
                rhs = float(p.eval([float(v) for v in x]))
                if abs(lhs - rhs) > 1e-8 * (1.0 + abs(rhs)):
                    raise NotInAlgebra("verification on random points failed")
    return q


def _expand_q(q: Poly, system: GeneratorSystem, pcache: _ProductCache) -> Poly:
    out = Poly(system.nvars)
    one = one_of(system.field) if is_exact_field(system.field) else 1.0
    for a, c in q.terms.items():
        if sum(a) == 0:
            out = out + Poly.constant(system.nvars, c)
            continue
        prod = pcache.product(system.gens, a)
        out = out + prod.scale(c)
    return out


def _eval_q_float(q: Poly, sigma_values: np.ndarray) -> float:
    total = 0.0
    for a, c in q.terms.items():
        v = float(c)
        for val, k in zip(sigma_values, a):
            v *= val ** k
        total += v
    return total


def change_of_generators(curve_values, from_system: GeneratorSystem,
                         to_system: GeneratorSystem):
    """Re-express a curve given in one generator system in another.

    ``curve_values`` is an array of shape (T, n_from) or a callable
    t -> R^{n_from}; the result has matching type.  Any lift of the input
    curve is a lift of the output curve.
    """
    qs = [express_in_generators(g, from_system) for g in to_system.gens]

    def convert(vals):
        vals = np.atleast_2d(np.asarray(vals, dtype=float))
        out = np.empty((vals.shape[0], len(qs)))
        for j, q in enumerate(qs):
            out[:, j] = [_eval_q_float(q, row) for row in vals]
        return out

    if callable(curve_values):
        def converted(t):
            v = np.atleast_2d(curve_values(t))
            return convert(v)[0]
        return converted
    arr = np.asarray(curve_values, dtype=float)
    single = arr.ndim == 1
    out = convert(arr)
    return out[0] if single else out


# ---------------------------------------------------------------------------
# restriction and direct sums
# ---------------------------------------------------------------------------

def restrict_to_subspace(system: GeneratorSystem, W, group: Optional[FiniteGroup] = None,
                         tol: float = 1e-9) -> GeneratorSystem:
    """Substitute an (orthonormal) parameterization of an invariant subspace.

    ``W`` is an m x w basis (columns).  The result generates the invariant
    ring of the restricted action but is marked non-minimal.
    """
    group = group or system.group
    W = np.asarray(W, dtype=float)
    if group is not None:
        P = W @ np.linalg.pinv(W)
        m = system.nvars
        for i in range(group.order):
            err = np.max(np.abs((np.eye(m) - P) @ group.mats[i] @ P))
            if err > max(tol, 1e-8):
                raise NotInvariant(f"subspace is not invariant (err {err:.2e})")
    rows = [[float(W[i, j]) for j in range(W.shape[1])] for i in range(system.nvars)]
    gens = [g.compose_linear(rows) if not g.is_zero() else Poly(W.shape[1])
            for g in _float_gens(system)]
    gens = [g.prune(1e-13 * max(1.0, g.max_abs_coeff())) for g in gens]
    return GeneratorSystem(gens=gens, degrees=list(system.degrees),
                           nvars=W.shape[1], field=FIELD_FLOAT, minimal=False,
                           minimal_degrees=list(system.minimal_degrees),
                           sigma1_minimal=system.sigma1_minimal,
                           certificate={}, group=None)


def _float_gens(system: GeneratorSystem):
    if system.field == FIELD_FLOAT:
        return system.gens
    out = []
    for g in system.gens:
        out.append(Poly(g.nvars, {e: float(c) for e, c in g.terms.items()}))
    return out


def direct_sum_system(sys_a: GeneratorSystem, sys_b: GeneratorSystem) -> GeneratorSystem:
    """Generators of the product orbit space on the direct sum of spaces.

    Keeps both block norm-squares; the combined sigma_1 is their sum and is
    recorded as derived (non-minimal).
    """
    ma, mb = sys_a.nvars, sys_b.nvars
    m = ma + mb
    float_mode = sys_a.field == FIELD_FLOAT or sys_b.field == FIELD_FLOAT

    def lift_a(g):
        return Poly(m, {tuple(list(e) + [0] * mb): (float(c) if float_mode else c)
                        for e, c in g.terms.items()})

    def lift_b(g):
        return Poly(m, {tuple([0] * ma + list(e)): (float(c) if float_mode else c)
                        for e, c in g.terms.items()})

    gens_a = [lift_a(g) for g in sys_a.gens]
    gens_b = [lift_b(g) for g in sys_b.gens]
    sigma1 = gens_a[0] + gens_b[0]
    gens = [sigma1] + gens_a + gens_b
    degrees = [2] + list(sys_a.degrees) + list(sys_b.degrees)
    field = FIELD_FLOAT if float_mode else (
        sys_a.field if sys_a.field == sys_b.field else FIELD_FLOAT)
    if field != FIELD_FLOAT and sys_a.field != sys_b.field:
        field = FIELD_FLOAT
    return GeneratorSystem(gens=gens, degrees=degrees, nvars=m, field=field,
                           minimal=False,
                           minimal_degrees=sorted(sys_a.minimal_degrees
                                                  + sys_b.minimal_degrees),
                           sigma1_minimal=False, certificate={}, group=None)


def graded_dimensions(system: GeneratorSystem, cap: int):
    """Dimensions of the subalgebra generated by the system, per degree."""
    exact = is_exact_field(system.field)
    pcache = _ProductCache()
    out = {}
    for e in range(1, cap + 1):
        basis = monomials_of_degree(system.nvars, e)
        basis_index = {exp: i for i, exp in enumerate(basis)}
        space = _new_rowspace(exact, len(basis))
        for a in _weighted_exponents(system.degrees, e):
            if sum(a) == 0:
                continue
            prod = pcache.product(system.gens, a)
            space.insert(prod.coefficient_vector(basis_index))
        out[e] = space.rank
    return out


# ---------------------------------------------------------------------------
# JSON interface
# ---------------------------------------------------------------------------

def system_to_json(system: GeneratorSystem) -> dict:
    return {
        "degrees": list(system.degrees),
        "nvars": system.nvars,
        "field": system.field,
        "minimal": system.minimal,
        "minimal_degrees": list(system.minimal_degrees),
        "gens": [{"terms": [{"exp": list(e), "coef": scalar_to_json(c)}
                            for e, c in sorted(g.terms.items())]}
                 for g in system.gens],
    }


def system_from_json(data: dict) -> GeneratorSystem:
    fieldtag = data.get("field", FIELD_FLOAT)
    nvars = int(data["nvars"])
    gens = []
    for gd in data["gens"]:
        terms = {}
        for td in gd["terms"]:
            coef = scalar_from_json(td["coef"], fieldtag)
            terms[tuple(int(x) for x in td["exp"])] = coef
        gens.append(Poly(nvars, terms))
    degrees = [int(x) for x in data["degrees"]]
    return GeneratorSystem(gens=gens, degrees=degrees, nvars=nvars,
                           field=fieldtag, minimal=bool(data.get("minimal", False)),
                           minimal_degrees=[int(x) for x in
                                            data.get("minimal_degrees", degrees)],
                           certificate={"imported": True} if data.get("minimal") else {})
