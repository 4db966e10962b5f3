"""Scalar arithmetic for the three ground fields.

Elements of the rational field are ``fractions.Fraction``; elements of a real
quadratic extension Q(sqrt(D)) are :class:`QuadExt`; the float field uses
plain ``float``.  Field tags are the strings ``"rational"``, ``"sqrt:D"``
(D a positive non-square integer) and ``"float"``.
"""
from __future__ import annotations

import math
from fractions import Fraction

__all__ = [
    "QuadExt",
    "FIELD_RATIONAL",
    "FIELD_FLOAT",
    "sqrt_field",
    "field_radicand",
    "is_exact_field",
    "zero_of",
    "one_of",
    "coerce_scalar",
    "to_float",
    "scalar_from_json",
    "scalar_to_json",
]

FIELD_RATIONAL = "rational"
FIELD_FLOAT = "float"


def sqrt_field(D: int) -> str:
    return f"sqrt:{int(D)}"


def field_radicand(field: str) -> int:
    """Radicand D of a quadratic-extension field tag."""
    if not field.startswith("sqrt:"):
        raise ValueError(f"not a quadratic field tag: {field!r}")
    return int(field.split(":", 1)[1])


def is_exact_field(field: str) -> bool:
    return field != FIELD_FLOAT


class QuadExt:
    """Exact element a + b*sqrt(D) of a real quadratic field."""

    __slots__ = ("a", "b", "D")

    def __init__(self, a, b=0, D=5):
        self.a = a if isinstance(a, Fraction) else Fraction(a)
        self.b = b if isinstance(b, Fraction) else Fraction(b)
        self.D = int(D)

    # -- helpers ---------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, QuadExt):
            if other.D != self.D:
                raise ValueError(f"mixed radicands {self.D} and {other.D}")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadExt(other, 0, self.D)
        return None

    # -- ring operations -------------------------------------------------
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a + o.a, self.b + o.b, self.D)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a - o.a, self.b - o.b, self.D)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(o.a - self.a, o.b - self.b, self.D)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadExt(self.a * o.a + self.b * o.b * self.D,
                       self.a * o.b + self.b * o.a, self.D)

    __rmul__ = __mul__

    def inverse(self):
        n = self.a * self.a - self.b * self.b * self.D
        if n == 0:
            raise ZeroDivisionError("division by zero in quadratic field")
        return QuadExt(self.a / n, -self.b / n, self.D)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.D)

    def __pos__(self):
        return self

    # -- comparisons -------------------------------------------------------
    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        if self.b == 0:
            return hash(self.a)
        return hash((self.a, self.b, self.D))

    def __bool__(self):
        return self.a != 0 or self.b != 0

    def sign(self) -> int:
        """Exact sign of a + b*sqrt(D)."""
        if self.b == 0:
            return -1 if self.a < 0 else (0 if self.a == 0 else 1)
        if self.a == 0:
            return -1 if self.b < 0 else 1
        sa = 1 if self.a > 0 else -1
        sb = 1 if self.b > 0 else -1
        if sa == sb:
            return sa
        # signs differ: compare a^2 with b^2 D
        if self.a * self.a > self.b * self.b * self.D:
            return sa
        if self.a * self.a < self.b * self.b * self.D:
            return sb
        return 0

    def __lt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() < 0

    def __le__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() <= 0

    def __gt__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() > 0

    def __ge__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign() >= 0

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.D)

    def __repr__(self):
        if self.b == 0:
            return f"QuadExt({self.a})"
        return f"QuadExt({self.a}, {self.b}, D={self.D})"


def zero_of(field: str):
    if field == FIELD_FLOAT:
        return 0.0
    if field == FIELD_RATIONAL:
        return Fraction(0)
    return QuadExt(0, 0, field_radicand(field))


def one_of(field: str):
    if field == FIELD_FLOAT:
        return 1.0
    if field == FIELD_RATIONAL:
        return Fraction(1)
    return QuadExt(1, 0, field_radicand(field))


def coerce_scalar(x, field: str):
    """Bring a number into the given field (floats only into the float field)."""
    if field == FIELD_FLOAT:
        return float(x)
    if isinstance(x, float):
        raise TypeError("cannot coerce a float into an exact field")
    if field == FIELD_RATIONAL:
        if isinstance(x, QuadExt):
            if x.b != 0:
                raise TypeError("irrational element in rational field")
            return x.a
        return Fraction(x)
    D = field_radicand(field)
    if isinstance(x, QuadExt):
        if x.D != D:
            raise TypeError(f"radicand mismatch {x.D} != {D}")
        return x
    return QuadExt(Fraction(x), 0, D)


def to_float(x) -> float:
    return float(x)


def scalar_from_json(value, field: str):
    """Parse a JSON scalar: decimal string, "p/q", number, or [a, b] = a + b*sqrt(D)."""
    if field == FIELD_FLOAT:
        if isinstance(value, str):
            return float(Fraction(value))
        if isinstance(value, (list, tuple)):
            raise ValueError("pair syntax requires a quadratic field")
        return float(value)
    if isinstance(value, (list, tuple)):
        D = field_radicand(field)
        a, b = value
        return QuadExt(Fraction(str(a)), Fraction(str(b)), D)
    frac = Fraction(str(value))
    return coerce_scalar(frac, field)


def scalar_to_json(x):
    if isinstance(x, QuadExt):
        return [str(x.a), str(x.b)]
    if isinstance(x, Fraction):
        return str(x)
    return float(x)
