"""Finite orthogonal matrix groups: enumeration, isotropy, decompositions.

A group lives over one of three ground fields (rational, quadratic extension,
float).  Exact groups keep their matrices exactly and carry a float shadow
for numeric work; float groups use rounded-entry keys for element identity.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import exactlinalg as ela
from .errors import (CapExceeded, CertificationFailed, NotOrthogonal,
                     ToleranceAmbiguity)
from .scalars import (FIELD_FLOAT, coerce_scalar, is_exact_field, one_of,
                      scalar_from_json, scalar_to_json, zero_of)

__all__ = [
    "GroupSpec",
    "FiniteGroup",
    "IsotropyData",
    "Decomposition",
    "enumerate_group",
    "isotropy",
    "fixed_space",
    "split_fixed",
    "irreducible_decomposition",
    "strata_subspaces",
    "max_isotropy_per_component",
    "compute_k",
    "group_spec_to_json",
    "group_spec_from_json",
]

_KEY_DIGITS = 9  # float element identity: round to 1e-9 per entry


@dataclass(frozen=True)
class GroupSpec:
    """Generators of a finite subgroup of O(m) over a declared ground field."""
    name: str
    dimension: int
    generators: tuple
    field: str
    catalog_meta: Optional[dict] = None

    def generator_arrays(self):
        return [ela.matrix_to_float(g) for g in self.generators]


@dataclass(frozen=True)
class IsotropyData:
    base_point: np.ndarray
    stabilizer: tuple          # element indices into the parent group
    index: int                 # |G| / |G_v|

    @property
    def order(self):
        return len(self.stabilizer)


@dataclass
class Decomposition:
    components: list           # list of (m, w_i) orthonormal float bases
    fixed_part: np.ndarray     # orthonormal basis of V^G, shape (m, f)
    certificates: list = field(default_factory=list)


def _mat_key_exact(mat):
    return tuple(tuple(row) for row in mat)


def _mat_key_float(arr):
    return tuple(np.round(arr, _KEY_DIGITS).ravel().tolist())


class FiniteGroup:
    """Enumerated finite orthogonal matrix group with canonical element order."""

    def __init__(self, spec: GroupSpec, exact_elements, float_elements):
        self.spec = spec
        self.field = spec.field
        self.dim = spec.dimension
        self.exact_elements = exact_elements  # list of exact matrices or None
        self.mats = np.array(float_elements)  # (order, m, m)
        self.order = len(float_elements)
        self._index = {}
        for i in range(self.order):
            self._index[self._key(i)] = i
        self.identity_index = self.element_index_of(np.eye(self.dim))
        self._mul_table = None
        self._inv = None

    # -- identity / lookup -------------------------------------------------
    def _key(self, i):
        if self.exact_elements is not None:
            return _mat_key_exact(self.exact_elements[i])
        return _mat_key_float(self.mats[i])

    def element_index_of(self, mat):
        """Index of a matrix given as float array or exact matrix; None if absent."""
        if self.exact_elements is not None and not isinstance(mat, np.ndarray):
            return self._index.get(_mat_key_exact(mat))
        arr = mat if isinstance(mat, np.ndarray) else ela.matrix_to_float(mat)
        if self.exact_elements is not None:
            # match by nearest float representative
            d = np.abs(self.mats - arr[None]).reshape(self.order, -1).max(axis=1)
            j = int(np.argmin(d))
            return j if d[j] < 1e-7 else None
        return self._index.get(_mat_key_float(arr))

    def is_exact(self):
        return self.exact_elements is not None

    # -- multiplication ------------------------------------------------------
    def mul(self, i: int, j: int) -> int:
        if self._mul_table is not None:
            return int(self._mul_table[i, j])
        if self.exact_elements is not None:
            prod = ela.mat_mul(self.exact_elements[i], self.exact_elements[j])
            return self._index[_mat_key_exact(prod)]
        prod = self.mats[i] @ self.mats[j]
        return self._index[_mat_key_float(prod)]

    def build_mul_table(self):
        if self._mul_table is None:
            table = np.empty((self.order, self.order), dtype=np.int32)
            for i in range(self.order):
                for j in range(self.order):
                    table[i, j] = self.mul(i, j)
            self._mul_table = table
        return self._mul_table

    def inverse(self, i: int) -> int:
        if self._inv is None:
            self._inv = {}
        got = self._inv.get(i)
        if got is None:
            got = self.element_index_of(self.mats[i].T)
            self._inv[i] = got
        return got

    def act(self, i: int, v: np.ndarray) -> np.ndarray:
        return self.mats[i] @ v

    def stabilizer_indices(self, v: np.ndarray, tol: float = 1e-9):
        v = np.asarray(v, dtype=float)
        nv = np.linalg.norm(v)
        if nv == 0:
            return list(range(self.order))
        d = np.linalg.norm(self.mats @ v - v[None, :], axis=1) / nv
        return [int(i) for i in np.nonzero(d <= tol)[0]]

    def orbit(self, v: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        pts = self.mats @ np.asarray(v, dtype=float)
        kept = []
        for p in pts:
            if not any(np.linalg.norm(p - q) <= tol * (1 + np.linalg.norm(p)) for q in kept):
                kept.append(p)
        return np.array(kept)

    def subgroup(self, indices):
        """FiniteGroup on a subset of elements (must be closed; checked)."""
        idx = sorted(set(int(i) for i in indices))
        pos = {g: p for p, g in enumerate(idx)}
        for a in idx:
            for b in idx:
                if self.mul(a, b) not in pos:
                    raise ValueError("subset is not closed under multiplication")
        exact = None
        if self.exact_elements is not None:
            exact = [self.exact_elements[i] for i in idx]
        spec = GroupSpec(name=f"{self.spec.name}_sub{len(idx)}",
                         dimension=self.dim,
                         generators=tuple(exact) if exact else tuple(self.mats[i].tolist() for i in idx),
                         field=self.field)
        sub = FiniteGroup(spec, exact, [self.mats[i] for i in idx])
        return sub

    def __repr__(self):
        return f"FiniteGroup({self.spec.name}, order={self.order}, dim={self.dim})"


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def _check_orthogonal(spec: GroupSpec):
    m = spec.dimension
    for gen in spec.generators:
        if is_exact_field(spec.field):
            gt = ela.transpose(gen)
            prod = ela.mat_mul(gt, gen)
            one = one_of(spec.field)
            zero = zero_of(spec.field)
            expect = ela.identity_matrix(m, one, zero)
            for i in range(m):
                for j in range(m):
                    if prod[i][j] != expect[i][j]:
                        raise NotOrthogonal(f"generator of {spec.name} is not orthogonal")
        else:
            arr = ela.matrix_to_float(gen)
            if np.max(np.abs(arr.T @ arr - np.eye(m))) > 1e-12:
                raise NotOrthogonal(f"generator of {spec.name} is not orthogonal (float tol 1e-12)")


def enumerate_group(spec: GroupSpec, cap: int = 20000) -> FiniteGroup:
    """Breadth-first closure of the generators, canonically ordered.

    Raises CapExceeded when the closure grows past ``cap`` and NotOrthogonal
    when a generator fails the orthogonality invariant.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    _check_orthogonal(spec)
    m = spec.dimension
    exact = is_exact_field(spec.field)
    if exact:
        one = one_of(spec.field)
        zero = zero_of(spec.field)
        ident = ela.identity_matrix(m, one, zero)
        gens = [[[coerce_scalar(x, spec.field) for x in row] for row in g]
                for g in spec.generators]
        seen = {_mat_key_exact(ident): ident}
        frontier = [ident]
        while frontier:
            new_frontier = []
            for mat in frontier:
                for g in gens:
                    prod = ela.mat_mul(mat, g)
                    k = _mat_key_exact(prod)
                    if k not in seen:
                        seen[k] = prod
                        new_frontier.append(prod)
                        if len(seen) > cap:
                            raise CapExceeded(f"{spec.name}: closure exceeded cap {cap}")
            frontier = new_frontier
        elements = list(seen.values())
        floats = [ela.matrix_to_float(e) for e in elements]
        order_key = [tuple(np.round(f, _KEY_DIGITS).ravel().tolist()) for f in floats]
        perm = sorted(range(len(elements)), key=lambda i: order_key[i])
        elements = [elements[i] for i in perm]
        floats = [floats[i] for i in perm]
        return FiniteGroup(spec, elements, floats)
    # float path
    ident = np.eye(m)
    gens = [ela.matrix_to_float(g) for g in spec.generators]
    seen = {_mat_key_float(ident): ident}
    frontier = [ident]
    while frontier:
        new_frontier = []
        for mat in frontier:
            for g in gens:
                prod = mat @ g
                k = _mat_key_float(prod)
                if k not in seen:
                    seen[k] = prod
                    new_frontier.append(prod)
                    if len(seen) > cap:
                        raise CapExceeded(f"{spec.name}: closure exceeded cap {cap}")
        frontier = new_frontier
    floats = sorted(seen.values(), key=_mat_key_float)
    return FiniteGroup(spec, None, floats)


# ---------------------------------------------------------------------------
# isotropy and fixed spaces
# ---------------------------------------------------------------------------

def isotropy(group: FiniteGroup, v, tol: float = 1e-9) -> IsotropyData:
    """Stabilizer {g : ||g v - v|| <= tol ||v||} with an ambiguity guard."""
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("base point must be finite")
    nv = np.linalg.norm(v)
    if nv == 0:
        return IsotropyData(v, tuple(range(group.order)), 1)
    rel = np.linalg.norm(group.mats @ v - v[None, :], axis=1) / nv
    in_band = np.nonzero((rel > tol) & (rel < 10 * tol))[0]
    if in_band.size:
        raise ToleranceAmbiguity(
            f"{in_band.size} elements move v by between tol and 10*tol; "
            "point sits too near a stratum boundary")
    stab = [int(i) for i in np.nonzero(rel <= tol)[0]]
    stab_set = set(stab)
    for a in stab:
        for b in stab:
            if group.mul(a, b) not in stab_set:
                raise ToleranceAmbiguity("stabilizer candidate set is not closed")
    if group.order % len(stab) != 0:
        raise ToleranceAmbiguity("stabilizer size does not divide the group order")
    return IsotropyData(v, tuple(stab), group.order // len(stab))


def fixed_space(elements, dim=None, field=FIELD_FLOAT, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis of the common fixed space of the given matrices.

    ``elements`` may be float arrays or exact matrices; for exact input the
    rank decision is exact and only the returned basis is floated.
    """
    if isinstance(elements, FiniteGroup):
        group = elements
        if group.is_exact():
            return fixed_space(group.exact_elements, group.dim, group.field)
        return fixed_space(list(group.mats), group.dim)
    elements = list(elements)
    if not elements:
        if dim is None:
            raise ValueError("dim required for an empty element list")
        return np.eye(dim)
    first = elements[0]
    if isinstance(first, np.ndarray) or field == FIELD_FLOAT and isinstance(first[0][0], float):
        arrs = [np.asarray(e, dtype=float) for e in elements]
        m = arrs[0].shape[0]
        stacked = np.vstack([a - np.eye(m) for a in arrs])
        return ela.float_nullspace(stacked, tol)
    # exact path
    m = len(first)
    one = one_of(field)
    zero = zero_of(field)
    ident = ela.identity_matrix(m, one, zero)
    rows = []
    for e in elements:
        rows.extend(ela.mat_sub(e, ident))
    basis = ela.exact_nullspace(rows, m)
    if not basis:
        return np.zeros((m, 0))
    B = np.array([[float(x) for x in vec] for vec in basis]).T
    return ela.orthonormal_columns(B)


def split_fixed(group: FiniteGroup):
    """(V^G basis, complement basis), both orthonormal float bases."""
    fixed = fixed_space(group)
    m = group.dim
    if fixed.shape[1] == 0:
        return fixed, np.eye(m)
    if fixed.shape[1] == m:
        return fixed, np.zeros((m, 0))
    comp = ela.float_nullspace(fixed.T)
    return fixed, comp


# ---------------------------------------------------------------------------
# irreducible decomposition
# ---------------------------------------------------------------------------

def _symmetric_commutant_dim(group: FiniteGroup, basis: np.ndarray, tol: float) -> int:
    """Dimension of the symmetric matrices on span(basis) commuting with G."""
    w = basis.shape[1]
    restricted = [basis.T @ group.mats[i] @ basis for i in range(group.order)]
    # unknown symmetric S, constraints R S - S R = 0 for each element
    pairs = [(i, j) for i in range(w) for j in range(i, w)]
    cols = []
    for (i, j) in pairs:
        S = np.zeros((w, w))
        S[i, j] = S[j, i] = 1.0
        col = np.concatenate([(R @ S - S @ R).ravel() for R in restricted])
        cols.append(col)
    A = np.array(cols).T
    nullity = len(pairs) - ela.float_rank(A, tol=1e-8)
    return nullity


def irreducible_decomposition(group: FiniteGroup, tol: float = 1e-9,
                              seed: int = 0, retries: int = 5) -> Decomposition:
    """Split V into irreducible invariant subspaces.

    Eigenspaces of a random symmetrized commutant element give candidate
    components; each is certified irreducible by a symmetric-commutant
    dimension test (dimension 1 <=> irreducible).  On certification failure
    the random seed matrix is redrawn, up to ``retries`` times.
    """
    m = group.dim
    rng = np.random.default_rng(seed)
    last_error = "no attempt"
    for attempt in range(retries):
        S = rng.standard_normal((m, m))
        S = S + S.T
        A = np.einsum("kij,jl,kml->im", group.mats, S, group.mats) / group.order
        A = (A + A.T) / 2
        w, U = np.linalg.eigh(A)
        # cluster eigenvalues
        comps = []
        start = 0
        spread = max(1.0, float(w[-1] - w[0]))
        for i in range(1, m + 1):
            if i == m or (w[i] - w[i - 1]) > 1e-6 * spread:
                comps.append(U[:, start:i])
                start = i
        ok = True
        for B in comps:
            # invariance: (I - P) g P = 0
            P = B @ B.T
            Q = np.eye(m) - P
            inv_err = max(np.max(np.abs(Q @ g @ P)) for g in group.mats)
            if inv_err > max(tol, 1e-9):
                ok = False
                last_error = f"candidate subspace not invariant (err {inv_err:.2e})"
                break
            if _symmetric_commutant_dim(group, B, tol) != 1:
                ok = False
                last_error = "symmetric commutant dimension != 1"
                break
        if ok:
            comps.sort(key=lambda B: (B.shape[1],
                                      tuple(np.round(np.abs(B[:, 0]), 6).tolist())))
            fixed = fixed_space(group)
            return Decomposition(components=comps, fixed_part=fixed,
                                 certificates=[{"attempt": attempt, "seed": seed}])
    raise CertificationFailed(f"after {retries} retries: {last_error}")


# ---------------------------------------------------------------------------
# strata lattice and maximal isotropy
# ---------------------------------------------------------------------------

def strata_subspaces(group: FiniteGroup, tol: float = 1e-9):
    """Intersection lattice of element fixed spaces (float bases, deduped).

    Contains every subspace of the form Fix(g1) ∩ ... ∩ Fix(gr), r >= 1,
    of dimension >= 1, plus the full space.
    """
    m = group.dim
    base = []
    seen = set()
    for i in range(group.order):
        if i == group.identity_index:
            continue
        B = ela.float_nullspace(group.mats[i] - np.eye(m), tol)
        if B.shape[1] == 0:
            continue
        k = ela.subspace_key(B)
        if k not in seen:
            seen.add(k)
            base.append(B)
    lattice = list(base)
    frontier = list(base)
    while frontier:
        new = []
        for W in frontier:
            for B in base:
                U = ela.intersect_subspaces(W, B, tol)
                if U.shape[1] == 0:
                    continue
                k = ela.subspace_key(U)
                if k not in seen:
                    seen.add(k)
                    lattice.append(U)
                    new.append(U)
        frontier = new
    lattice.append(np.eye(m))
    return lattice


def _generic_point(B: np.ndarray, salt: int = 0) -> np.ndarray:
    """Deterministic generic-looking point in the column span of B."""
    w = B.shape[1]
    weights = np.array([1.0 / (1.3 + 0.37 * (j + salt) + 0.011 * (j + salt) ** 2)
                        for j in range(w)])
    v = B @ weights
    n = np.linalg.norm(v)
    return v / n if n > 0 else v


def _pointwise_stabilizer(group: FiniteGroup, B: np.ndarray, tol: float):
    errs = np.max(np.abs(group.mats @ B - B[None]), axis=(1, 2))
    return set(int(i) for i in np.nonzero(errs <= tol)[0])


def max_isotropy_per_component(group: FiniteGroup, decomposition: Decomposition,
                               tol: float = 1e-9):
    """One maximal-isotropy representative per irreducible component.

    Candidate points are generic points of every stratum intersected with
    the component, plus a generic point of the component itself; the
    candidate with maximal stabilizer wins, ties broken by the canonical
    (rounded, lexicographic) order of the candidate point.
    """
    lattice = strata_subspaces(group, tol)
    out = []
    for B_comp in decomposition.components:
        candidates = []
        for W in lattice:
            U = ela.intersect_subspaces(W, B_comp, tol)
            if U.shape[1] >= 1:
                candidates.append(U)
        candidates.append(B_comp)
        best = None
        for U in candidates:
            v = None
            for salt in range(8):
                trial = _generic_point(U, salt)
                stab = set(group.stabilizer_indices(trial, tol))
                if stab == _pointwise_stabilizer(group, U, 1e-7):
                    v = trial
                    break
            if v is None:
                v = _generic_point(U, 0)
            data_stab = tuple(sorted(group.stabilizer_indices(v, tol)))
            key = (-(len(data_stab)), tuple(np.round(v, 9).tolist()))
            if best is None or key < best[0]:
                best = (key, v, data_stab)
        _, v, stab = best
        out.append(IsotropyData(v, stab, group.order // len(stab)))
    return out


def compute_k(group: FiniteGroup, d: int,
              decomposition: Optional[Decomposition] = None,
              tol: float = 1e-9) -> int:
    """Regularity class max(d, |G|/|G_{v_i}|) over the irreducible components."""
    if decomposition is None:
        decomposition = irreducible_decomposition(group, tol)
    iso = max_isotropy_per_component(group, decomposition, tol)
    return max([int(d)] + [data.index for data in iso])


# ---------------------------------------------------------------------------
# JSON interface
# ---------------------------------------------------------------------------

def group_spec_to_json(spec: GroupSpec) -> dict:
    return {
        "name": spec.name,
        "dimension": spec.dimension,
        "field": spec.field,
        "generators": [[[scalar_to_json(x) for x in row] for row in g]
                       for g in spec.generators],
    }


def group_spec_from_json(data: dict) -> GroupSpec:
    fieldtag = data["field"]
    gens = tuple(
        tuple(tuple(scalar_from_json(x, fieldtag) for x in row) for row in g)
        for g in data["generators"]
    )
    return GroupSpec(name=data["name"], dimension=int(data["dimension"]),
                     generators=gens, field=fieldtag,
                     catalog_meta=data.get("catalog_meta"))
