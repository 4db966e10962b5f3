"""Linear algebra over exact scalars plus float (SVD-based) counterparts.

Exact routines operate on lists of lists whose entries support field
arithmetic and exact equality with 0 (Fraction or QuadExt).  Float routines
wrap numpy with explicit rank tolerances.
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "rref",
    "exact_rank",
    "exact_nullspace",
    "exact_solve",
    "mat_mul",
    "mat_vec",
    "mat_sub",
    "identity_matrix",
    "transpose",
    "matrix_to_float",
    "float_nullspace",
    "float_rank",
    "orthonormal_columns",
    "intersect_subspaces",
    "subspace_key",
]


# ---------------------------------------------------------------------------
# exact routines
# ---------------------------------------------------------------------------

def rref(rows):
    """Reduced row echelon form.  Returns (new_rows, pivot_columns).

    The input rows are not modified.  Entries must support exact ==0 tests.
    """
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(m)):
            if m[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        pv = m[r][c]
        m[r] = [x / pv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def exact_rank(rows) -> int:
    return len(rref(rows)[1])


def exact_nullspace(rows, ncols):
    """Basis of {x : A x = 0} for the matrix with the given rows."""
    red, pivots = rref(rows)
    pivot_set = set(pivots)
    free = [c for c in range(ncols) if c not in pivot_set]
    basis = []
    for fc in free:
        vec = [0] * ncols
        vec[fc] = 1
        for i, pc in enumerate(pivots):
            vec[pc] = -red[i][fc]
        basis.append(vec)
    return basis


def exact_solve(rows, rhs):
    """One solution of A x = b with free variables set to 0, or None.

    Columns are consumed left to right, so the particular solution is
    supported on the earliest possible columns.
    """
    if not rows:
        return None if any(b != 0 for b in rhs) else []
    ncols = len(rows[0])
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    red, pivots = rref(aug)
    if ncols in pivots:
        return None  # inconsistent system
    sol = [0] * ncols
    for i, pc in enumerate(pivots):
        sol[pc] = red[i][-1]
    return sol


def mat_mul(A, B):
    n, k, m = len(A), len(B), len(B[0])
    return [[sum(A[i][t] * B[t][j] for t in range(k)) for j in range(m)]
            for i in range(n)]


def mat_vec(A, v):
    return [sum(a * x for a, x in zip(row, v)) for row in A]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def identity_matrix(n, one, zero):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def transpose(A):
    return [list(col) for col in zip(*A)]


def matrix_to_float(A) -> np.ndarray:
    return np.array([[float(x) for x in row] for row in A], dtype=float)


# ---------------------------------------------------------------------------
# float routines
# ---------------------------------------------------------------------------

def float_rank(A: np.ndarray, tol: float = 1e-9) -> int:
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0:
        return 0
    return int(np.sum(s > tol * max(1.0, s[0])))


def float_nullspace(A: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (columns) of the nullspace of A."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.eye(n)
    u, s, vt = np.linalg.svd(A)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * max(1.0, smax)))
    return vt[rank:].T


def orthonormal_columns(B: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis for the column span of B."""
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if B.shape[1] == 0:
        return B
    u, s, _ = np.linalg.svd(B, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s[0])))
    return u[:, :rank]


def intersect_subspaces(B1: np.ndarray, B2: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis of span(B1) ∩ span(B2); bases given as columns."""
    if B1.shape[1] == 0 or B2.shape[1] == 0:
        return np.zeros((B1.shape[0], 0))
    # x in both spans: x = B1 c1 = B2 c2  =>  [B1 | -B2] (c1; c2) = 0
    stacked = np.hstack([B1, -B2])
    ns = float_nullspace(stacked, tol)
    if ns.shape[1] == 0:
        return np.zeros((B1.shape[0], 0))
    vecs = B1 @ ns[: B1.shape[1], :]
    return orthonormal_columns(vecs, tol)


def subspace_key(B: np.ndarray, digits: int = 6):
    """Hashable canonical key of a subspace: rounded orthogonal projector."""
    if B.shape[1] == 0:
        return ("null", B.shape[0])
    Q = orthonormal_columns(B)
    P = Q @ Q.T
    return tuple(np.round(P, digits).ravel().tolist())
