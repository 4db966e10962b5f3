"""Sparse multivariate polynomials over an exact field or floats.

Terms are stored as a dict mapping exponent tuples to nonzero coefficients.
The same class serves the exact path (Fraction / QuadExt coefficients) and
the float path; arithmetic never mixes the two.
"""
from __future__ import annotations

from itertools import combinations_with_replacement

import numpy as np

__all__ = ["Poly", "monomials_of_degree", "MONOMIAL_ORDERS"]


def monomials_of_degree(nvars: int, degree: int):
    """All exponent tuples of the given total degree, lexicographic order."""
    if degree == 0:
        return [(0,) * nvars]
    out = []
    for combo in combinations_with_replacement(range(nvars), degree):
        exp = [0] * nvars
        for i in combo:
            exp[i] += 1
        out.append(tuple(exp))
    # combinations_with_replacement already yields a deterministic order,
    # but sort for a stable, order-independent contract
    out = sorted(set(out), reverse=True)
    return out


def _order_key_grlex(exp):
    return (sum(exp), exp)


def _order_key_grevlex(exp):
    return (sum(exp), tuple(-e for e in reversed(exp)))


MONOMIAL_ORDERS = {
    "grlex": _order_key_grlex,
    "grevlex": _order_key_grevlex,
    "lex": lambda exp: exp,
    "invlex": lambda exp: tuple(reversed(exp)),
}


class Poly:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms=None):
        self.nvars = nvars
        self.terms = {}
        if terms:
            for exp, c in (terms.items() if isinstance(terms, dict) else terms):
                if c != 0:
                    cur = self.terms.get(exp)
                    if cur is None:
                        self.terms[exp] = c
                    else:
                        s = cur + c
                        if s != 0:
                            self.terms[exp] = s
                        else:
                            del self.terms[exp]

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def constant(cls, nvars, c):
        p = cls(nvars)
        if c != 0:
            p.terms[(0,) * nvars] = c
        return p

    @classmethod
    def variable(cls, nvars, i, one):
        exp = [0] * nvars
        exp[i] = 1
        return cls(nvars, {tuple(exp): one})

    @classmethod
    def monomial(cls, nvars, exp, c):
        return cls(nvars, {tuple(exp): c})

    @classmethod
    def norm_square(cls, nvars, one):
        """x_1^2 + ... + x_m^2 with the given unit element."""
        terms = {}
        for i in range(nvars):
            exp = [0] * nvars
            exp[i] = 2
            terms[tuple(exp)] = one
        return cls(nvars, terms)

    # -- basic queries -------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def degree(self):
        return max((sum(e) for e in self.terms), default=0)

    def is_homogeneous(self):
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def homogeneous_part(self, d):
        return Poly(self.nvars, {e: c for e, c in self.terms.items() if sum(e) == d})

    def copy(self):
        p = Poly(self.nvars)
        p.terms = dict(self.terms)
        return p

    def coefficient_vector(self, basis_index: dict):
        """Dense coefficient vector over a monomial basis {exp: position}."""
        vec = [0] * len(basis_index)
        for e, c in self.terms.items():
            vec[basis_index[e]] = c
        return vec

    # -- arithmetic ----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        out = dict(self.terms)
        for e, c in other.terms.items():
            cur = out.get(e)
            if cur is None:
                out[e] = c
            else:
                s = cur + c
                if s != 0:
                    out[e] = s
                else:
                    del out[e]
        p = Poly(self.nvars)
        p.terms = out
        return p

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        p = Poly(self.nvars)
        p.terms = {e: -c for e, c in self.terms.items()}
        return p

    def __mul__(self, other):
        if not isinstance(other, Poly):
            return self.scale(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                cur = out.get(e)
                if cur is None:
                    out[e] = c
                else:
                    s = cur + c
                    if s != 0:
                        out[e] = s
                    else:
                        del out[e]
        p = Poly(self.nvars)
        p.terms = out
        return p

    def scale(self, c):
        if c == 0:
            return Poly(self.nvars)
        p = Poly(self.nvars)
        p.terms = {e: cf * c for e, cf in self.terms.items()}
        return p

    def __pow__(self, k: int):
        result = Poly.constant(self.nvars, 1 if not self.terms else _unit_like(next(iter(self.terms.values()))))
        base = self
        k = int(k)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def diff(self, i: int):
        out = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            ne = list(e)
            ne[i] -= 1
            out[tuple(ne)] = c * e[i]
        p = Poly(self.nvars)
        p.terms = out
        return p

    def __eq__(self, other):
        return isinstance(other, Poly) and self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    # -- substitution --------------------------------------------------------
    def compose_linear(self, rows):
        """Substitute x_i -> sum_j rows[i][j] * y_j (rows may be rectangular)."""
        if not self.terms:
            return Poly(len(rows[0]) if rows else self.nvars)
        new_nvars = len(rows[0])
        forms = [Poly(new_nvars, {tuple(1 if k == j else 0 for k in range(new_nvars)): c
                                  for j, c in enumerate(row) if c != 0})
                 for row in rows]
        max_deg = [0] * self.nvars
        for e in self.terms:
            for i, d in enumerate(e):
                max_deg[i] = max(max_deg[i], d)
        # cache powers of each substituted linear form
        powers = []
        for i, f in enumerate(forms):
            ps = [Poly.constant(new_nvars, _one_like(next(iter(self.terms.values()))))]
            for _ in range(max_deg[i]):
                ps.append(ps[-1] * f)
            powers.append(ps)
        total = Poly(new_nvars)
        for e, c in self.terms.items():
            term = Poly.constant(new_nvars, c)
            for i, d in enumerate(e):
                if d:
                    term = term * powers[i][d]
            total = total + term
        return total

    def eval(self, point):
        """Exact or float evaluation at a point (sequence of scalars)."""
        total = None
        for e, c in self.terms.items():
            v = c
            for x, d in zip(point, e):
                for _ in range(d):
                    v = v * x
            total = v if total is None else total + v
        if total is None:
            return 0
        return total

    # -- float compilation -----------------------------------------------
    def float_arrays(self):
        """(exponent matrix, coefficient vector) for vectorized evaluation."""
        if not self.terms:
            return np.zeros((0, self.nvars), dtype=np.int64), np.zeros(0)
        exps = np.array(sorted(self.terms), dtype=np.int64)
        coeffs = np.array([float(self.terms[tuple(e)]) for e in exps.tolist()])
        return exps, coeffs

    def prune(self, tol: float):
        """Drop float terms with |coef| <= tol (no-op structure for exact)."""
        p = Poly(self.nvars)
        p.terms = {e: c for e, c in self.terms.items() if abs(float(c)) > tol}
        return p

    def max_abs_coeff(self) -> float:
        return max((abs(float(c)) for c in self.terms.values()), default=0.0)

    def __repr__(self):
        if not self.terms:
            return "Poly(0)"
        bits = []
        for e in sorted(self.terms, key=_order_key_grlex, reverse=True)[:8]:
            bits.append(f"{self.terms[e]}*x^{e}")
        more = "..." if len(self.terms) > 8 else ""
        return "Poly(" + " + ".join(bits) + more + ")"


def _one_like(c):
    if isinstance(c, float):
        return 1.0
    from fractions import Fraction
    from .scalars import QuadExt
    if isinstance(c, QuadExt):
        return QuadExt(1, 0, c.D)
    return Fraction(1)


_unit_like = _one_like
