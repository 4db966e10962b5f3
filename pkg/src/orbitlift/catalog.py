"""Catalog of named finite orthogonal groups.

Reflection families are built from simple-root reflections; the rotation
families use explicit rotation matrices.  Ground fields: exact rationals
where all entries are rational, Q(sqrt 2), Q(sqrt 3) or Q(sqrt 5) where a
single quadratic irrationality suffices, floats otherwise (the generic
dihedral/cyclic angle cos(2*pi/n) is not quadratic for most n).
"""
from __future__ import annotations

import math
from fractions import Fraction

from .errors import BadParams, UnknownFamily
from .groups import GroupSpec
from .scalars import FIELD_FLOAT, FIELD_RATIONAL, QuadExt, sqrt_field

__all__ = ["catalog", "catalog_names", "rotation_2d_entries"]

F = Fraction
_HALF = F(1, 2)


def _perm_matrix(n, mapping):
    """Permutation matrix over Q sending e_j to e_{mapping[j]}."""
    M = [[F(0)] * n for _ in range(n)]
    for j, i in enumerate(mapping):
        M[i][j] = F(1)
    return tuple(tuple(row) for row in M)


def _transposition(n, i, j):
    mapping = list(range(n))
    mapping[i], mapping[j] = mapping[j], mapping[i]
    return _perm_matrix(n, mapping)


def _diag(entries):
    n = len(entries)
    return tuple(tuple(entries[i] if i == j else F(0) for j in range(n))
                 for i in range(n))


def _reflection_through(root):
    """Householder reflection I - 2 a a^T / <a|a> over the root's field."""
    n = len(root)
    nrm = sum(x * x for x in root)
    rows = []
    for i in range(n):
        row = []
        for j in range(n):
            val = -2 * root[i] * root[j] / nrm
            if i == j:
                val = val + 1
            row.append(val)
        rows.append(tuple(row))
    return tuple(rows)


def rotation_2d_entries(n: int):
    """(cos, sin, field) for the 2*pi/n rotation, exact where quadratic."""
    if n == 1:
        return F(1), F(0), FIELD_RATIONAL
    if n == 2:
        return F(-1), F(0), FIELD_RATIONAL
    if n == 4:
        return F(0), F(1), FIELD_RATIONAL
    if n == 3:
        return F(-1, 2), QuadExt(0, _HALF, 3), sqrt_field(3)
    if n == 6:
        return F(1, 2), QuadExt(0, _HALF, 3), sqrt_field(3)
    if n == 8:
        return QuadExt(0, _HALF, 2), QuadExt(0, _HALF, 2), sqrt_field(2)
    if n == 12:
        return QuadExt(0, _HALF, 3), F(1, 2), sqrt_field(3)
    theta = 2 * math.pi / n
    return math.cos(theta), math.sin(theta), FIELD_FLOAT


def _lift_field(entries, fieldtag):
    """Coerce rational entries into the quadratic field when mixing."""
    if fieldtag == FIELD_FLOAT:
        return [float(x) for x in entries]
    if fieldtag == FIELD_RATIONAL:
        return [F(x) for x in entries]
    D = int(fieldtag.split(":")[1])
    out = []
    for x in entries:
        if isinstance(x, QuadExt):
            out.append(x)
        else:
            out.append(QuadExt(F(x), 0, D))
    return out


def _matrix_in_field(rows, fieldtag):
    return tuple(tuple(_lift_field(row, fieldtag)) for row in rows)


# -- H3 / H4 simple roots over Q(sqrt 5) ------------------------------------
# phi/2 = (1+sqrt5)/4 and (phi-1)/2 = (-1+sqrt5)/4 in a+b*sqrt5 form.
_PHI_HALF = QuadExt(F(1, 4), F(1, 4), 5)
_PHIM1_HALF = QuadExt(F(-1, 4), F(1, 4), 5)


def _q5(x):
    return QuadExt(F(x), 0, 5)


_H3_SIMPLE_ROOTS = (
    (_q5(-1), _q5(0), _q5(0)),
    (_PHI_HALF, -_PHIM1_HALF, _q5(-1) * _HALF),
    (_q5(0), _q5(0), _q5(1)),
)

_H4_SIMPLE_ROOTS = (
    (_q5(-1), _q5(0), _q5(0), _q5(0)),
    (_PHI_HALF, _q5(F(-1, 2)), _q5(0), -_PHIM1_HALF),
    (_q5(0), _q5(F(1, 2)), -_PHIM1_HALF, _PHI_HALF),
    (_q5(0), _PHIM1_HALF, _PHI_HALF, _q5(F(-1, 2))),
)


def _meta(d, k, order, degrees):
    return {"d": d, "k": k, "order": order, "degrees": list(degrees)}


def _factorial(n):
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


# ---------------------------------------------------------------------------
# family builders
# ---------------------------------------------------------------------------

def _build_Sn(n):
    if n < 1:
        raise BadParams("Sn requires n >= 1")
    if n == 1:
        return GroupSpec("S1", 1, (), FIELD_RATIONAL,
                         _meta(1, 1, 1, [1]))
    gens = tuple(_transposition(n, i, i + 1) for i in range(n - 1))
    return GroupSpec(f"S{n}", n, gens, FIELD_RATIONAL,
                     _meta(n, n, _factorial(n), list(range(1, n + 1))))


def _build_An(n):
    if n < 1:
        raise BadParams("An requires n >= 1")
    m = n + 1
    gens = tuple(_transposition(m, i, i + 1) for i in range(n))
    return GroupSpec(f"A{n}", m, gens, FIELD_RATIONAL,
                     _meta(n + 1, n + 1, _factorial(n + 1), list(range(1, n + 2))))


def _build_Bn(n):
    if n < 2:
        raise BadParams("Bn requires n >= 2")
    gens = [_transposition(n, i, i + 1) for i in range(n - 1)]
    gens.append(_diag([F(1)] * (n - 1) + [F(-1)]))
    return GroupSpec(f"B{n}", n, tuple(gens), FIELD_RATIONAL,
                     _meta(2 * n, 2 * n, (2 ** n) * _factorial(n),
                           [2 * i for i in range(1, n + 1)]))


def _build_Dn(n):
    if n < 4:
        raise BadParams("Dn requires n >= 4")
    gens = [_transposition(n, i, i + 1) for i in range(n - 1)]
    root = [F(0)] * n
    root[n - 2] = F(1)
    root[n - 1] = F(1)
    gens.append(_reflection_through(root))
    degrees = sorted([2 * i for i in range(1, n)] + [n])
    return GroupSpec(f"D{n}", n, tuple(gens), FIELD_RATIONAL,
                     _meta(2 * n - 2, 2 * n, (2 ** (n - 1)) * _factorial(n), degrees))


def _dihedral_generators(n):
    c, s, fieldtag = rotation_2d_entries(n)
    mirror_x = _matrix_in_field([[1, 0], [0, -1]], fieldtag)
    # reflection across the line at angle pi/n: [[cos, sin], [sin, -cos]]
    r2 = _matrix_in_field([[c, s], [s, -c]], fieldtag)
    return (mirror_x, r2), fieldtag


def _build_I2n(n, strict=False):
    if n < 2:
        raise BadParams("I2n requires n >= 2")
    if n == 6:
        # standalone I2^6 is catalogued as G2
        return _build_G2()
    if strict and n < 5:
        raise BadParams("Coxeter label I2n requires n >= 5 (and n != 6)")
    gens, fieldtag = _dihedral_generators(n)
    degrees = [2, 2] if n == 2 else [2, n]
    return GroupSpec(f"I2^{n}", 2, gens, fieldtag,
                     _meta(n, n, 2 * n, degrees))


def _build_G2():
    gens, fieldtag = _dihedral_generators(6)
    return GroupSpec("G2", 2, gens, fieldtag, _meta(6, 6, 12, [2, 6]))


def _build_H3():
    gens = tuple(_reflection_through(r) for r in _H3_SIMPLE_ROOTS)
    return GroupSpec("H3", 3, gens, sqrt_field(5), _meta(10, 12, 120, [2, 6, 10]))


def _build_H4():
    gens = tuple(_reflection_through(r) for r in _H4_SIMPLE_ROOTS)
    return GroupSpec("H4", 4, gens, sqrt_field(5),
                     _meta(30, 120, 14400, [2, 12, 20, 30]))


def _build_F4():
    roots = (
        (F(0), F(1), F(-1), F(0)),
        (F(0), F(0), F(1), F(-1)),
        (F(0), F(0), F(0), F(1)),
        (_HALF, -_HALF, -_HALF, -_HALF),
    )
    gens = tuple(_reflection_through(r) for r in roots)
    return GroupSpec("F4", 4, gens, FIELD_RATIONAL,
                     _meta(12, 24, 1152, [2, 6, 8, 12]))


def _build_C2n(n):
    if n < 1:
        raise BadParams("C2n requires n >= 1")
    c, s, fieldtag = rotation_2d_entries(n)
    if n == 1:
        return GroupSpec("C2^1", 2, (), FIELD_RATIONAL, _meta(1, 1, 1, [1, 1]))
    rot = _matrix_in_field([[c, -s], [s, c]], fieldtag)
    degrees = [2, 2, 2] if n == 2 else [2, n, n]
    return GroupSpec(f"C2^{n}", 2, (rot,), fieldtag, _meta(n, n, n, degrees))


def _build_C3n(n):
    if n < 1:
        raise BadParams("C3n requires n >= 1")
    c, s, fieldtag = rotation_2d_entries(n)
    if n == 1:
        return GroupSpec("C3^1", 3, (), FIELD_RATIONAL, _meta(1, 1, 1, [1, 1, 1]))
    rot = _matrix_in_field([[c, -s, 0], [s, c, 0], [0, 0, 1]], fieldtag)
    degrees = sorted([1, 2] + ([2, 2] if n == 2 else [n, n]))
    return GroupSpec(f"C3^{n}", 3, (rot,), fieldtag, _meta(n, n, n, degrees))


def _build_I3n(n):
    if n < 2:
        raise BadParams("I3n requires n >= 2")
    c, s, fieldtag = rotation_2d_entries(n)
    rot = _matrix_in_field([[c, -s, 0], [s, c, 0], [0, 0, 1]], fieldtag)
    flip = _matrix_in_field([[1, 0, 0], [0, -1, 0], [0, 0, -1]], fieldtag)
    # note: the published d=k=n for this family disagrees with the computed
    # minimal degrees {2, 2, n, n+1}; catalog_meta keeps the published values
    degrees = sorted([2, 2, n, n + 1])
    return GroupSpec(f"I3^{n}", 3, (rot, flip), fieldtag,
                     _meta(n, n, 2 * n, degrees))


def _build_T():
    gens = (
        _diag([F(1), F(-1), F(-1)]),
        _perm_matrix(3, [1, 2, 0]),
    )
    return GroupSpec("T", 3, gens, FIELD_RATIONAL, _meta(6, 6, 12, [2, 3, 4, 6]))


def _build_W():
    rot_z = tuple(tuple(F(x) for x in row)
                  for row in [[0, -1, 0], [1, 0, 0], [0, 0, 1]])
    gens = (rot_z, _perm_matrix(3, [1, 2, 0]))
    return GroupSpec("W", 3, gens, FIELD_RATIONAL, _meta(9, 9, 24, [2, 4, 6, 9]))


def _build_H():
    from .exactlinalg import mat_mul
    r = [_reflection_through(root) for root in _H3_SIMPLE_ROOTS]
    gens = (tuple(tuple(row) for row in mat_mul(r[0], r[1])),
            tuple(tuple(row) for row in mat_mul(r[1], r[2])))
    return GroupSpec("H", 3, gens, sqrt_field(5), _meta(15, 15, 60, [2, 6, 10, 15]))


def _build_trivial(dim):
    if dim < 1:
        raise BadParams("trivial group requires dim >= 1")
    return GroupSpec(f"trivial{dim}", dim, (), FIELD_RATIONAL,
                     _meta(1, 1, 1, [1] * dim))


_FAMILIES = {
    "Sn": lambda **kw: _build_Sn(int(kw["n"])),
    "An": lambda **kw: _build_An(int(kw["n"])),
    "Bn": lambda **kw: _build_Bn(int(kw["n"])),
    "Dn": lambda **kw: _build_Dn(int(kw["n"])),
    "I2n": lambda **kw: _build_I2n(int(kw["n"]), bool(kw.get("strict", False))),
    "G2": lambda **kw: _build_G2(),
    "H3": lambda **kw: _build_H3(),
    "H4": lambda **kw: _build_H4(),
    "F4": lambda **kw: _build_F4(),
    "C2n": lambda **kw: _build_C2n(int(kw["n"])),
    "C3n": lambda **kw: _build_C3n(int(kw["n"])),
    "I3n": lambda **kw: _build_I3n(int(kw["n"])),
    "T": lambda **kw: _build_T(),
    "W": lambda **kw: _build_W(),
    "H": lambda **kw: _build_H(),
    "trivial": lambda **kw: _build_trivial(int(kw.get("dim", 1))),
}

_ALIASES = {
    "A2": ("An", {"n": 2}), "A3": ("An", {"n": 3}),
    "B2": ("Bn", {"n": 2}), "B3": ("Bn", {"n": 3}),
    "D4": ("Dn", {"n": 4}),
}


def catalog_names():
    return sorted(_FAMILIES) + sorted(_ALIASES)


def catalog(name: str, **params) -> GroupSpec:
    """GroupSpec for a named family; raises UnknownFamily / BadParams."""
    if name in _ALIASES:
        fam, fixed = _ALIASES[name]
        return _FAMILIES[fam](**fixed)
    if name not in _FAMILIES:
        raise UnknownFamily(f"no catalog family named {name!r} "
                            "(E-series orders are documented but not constructed)")
    builder = _FAMILIES[name]
    try:
        return builder(**params)
    except KeyError as exc:
        raise BadParams(f"family {name} missing parameter {exc}") from exc
