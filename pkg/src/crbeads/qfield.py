"""Exact arithmetic in Q(i, sqrt2, sqrt3).

Elements are stored as 8 rational coordinates over the basis
{1, sqrt2, sqrt3, sqrt6, i, i*sqrt2, i*sqrt3, i*sqrt6}; the representation
is unique, so equality and zero tests are exact.  Signs of real elements
are decided by interval refinement with dyadic endpoints, which terminates
because the zero test is exact.
"""

from __future__ import annotations

import math
from fractions import Fraction

try:
    from gmpy2 import mpq as QRat
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    QRat = Fraction

_Q0 = QRat(0)
_Q1 = QRat(1)

# Radical part of each basis slot: 0 -> 1, 1 -> sqrt2, 2 -> sqrt3, 3 -> sqrt6.
_RADICANDS = (1, 2, 3, 6)
_RADICAL_FLOATS = (1.0, math.sqrt(2.0), math.sqrt(3.0), math.sqrt(6.0))

# _RAD_MUL[k][l] = (integer factor, radical slot) for radical_k * radical_l.
_RAD_MUL = (
    ((1, 0), (1, 1), (1, 2), (1, 3)),
    ((1, 1), (2, 0), (1, 3), (2, 2)),
    ((1, 2), (1, 3), (3, 0), (3, 1)),
    ((1, 3), (2, 2), (3, 1), (6, 0)),
)


def _build_mul_table():
    # slot i = 4*r + k with r = 0 real, r = 1 imaginary; i^2 = -1.
    table = []
    for i in range(8):
        ri, ki = divmod(i, 4)
        row = []
        for j in range(8):
            rj, kj = divmod(j, 4)
            coef, k = _RAD_MUL[ki][kj]
            power = ri + rj
            if power == 2:
                row.append((k, -coef))
            else:
                row.append((4 * power + k, coef))
        table.append(tuple(row))
    return tuple(table)


_MUL_TABLE = _build_mul_table()


class FieldElem:
    """An element of Q(i, sqrt2, sqrt3) with exact rational coordinates."""

    __slots__ = ("_c",)

    def __init__(self, coords) -> None:
        c = tuple(QRat(x) for x in coords)
        if len(c) != 8:
            raise ValueError("FieldElem needs 8 coordinates")
        self._c = c

    @property
    def coords(self):
        return self._c

    @classmethod
    def from_int(cls, n: int) -> FieldElem:
        return cls((n, 0, 0, 0, 0, 0, 0, 0))

    @classmethod
    def from_rat(cls, q) -> FieldElem:
        return cls((q, 0, 0, 0, 0, 0, 0, 0))

    @staticmethod
    def _coerce(value):
        if isinstance(value, FieldElem):
            return value
        if isinstance(value, int):
            return FieldElem.from_int(value)
        if isinstance(value, (Fraction, type(_Q0))):
            return FieldElem.from_rat(value)
        return None

    # -- ring operations ------------------------------------------------

    def __add__(self, other) -> FieldElem:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._c, o._c
        return FieldElem(tuple(a[i] + b[i] for i in range(8)))

    __radd__ = __add__

    def __sub__(self, other) -> FieldElem:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._c, o._c
        return FieldElem(tuple(a[i] - b[i] for i in range(8)))

    def __rsub__(self, other) -> FieldElem:
        return (-self) + other

    def __neg__(self) -> FieldElem:
        return FieldElem(tuple(-x for x in self._c))

    def __mul__(self, other) -> FieldElem:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._c, o._c
        out = [_Q0] * 8
        for i in range(8):
            ai = a[i]
            if not ai:
                continue
            row = _MUL_TABLE[i]
            for j in range(8):
                bj = b[j]
                if not bj:
                    continue
                k, coef = row[j]
                out[k] += ai * bj * coef
        return FieldElem(out)

    __rmul__ = __mul__

    def __truediv__(self, other) -> FieldElem:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inv()

    def __rtruediv__(self, other) -> FieldElem:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inv()

    def __pow__(self, n: int) -> FieldElem:
        if not isinstance(n, int):
            return NotImplemented
        base = self.inv() if n < 0 else self
        n = abs(n)
        acc = ONE
        while n:
            if n & 1:
                acc = acc * base
            base = base * base
            n >>= 1
        return acc

    def inv(self) -> FieldElem:
        """Exact inverse via the conjugation tower i -> sqrt2 -> sqrt3."""
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        zc = self.conj()
        n = self * zc                     # real subfield Q(sqrt2, sqrt3)
        n2 = n * n._galois_sqrt2()        # lands in Q(sqrt3)
        n3 = n2 * n2._galois_sqrt3()      # rational
        rat = n3._c[0]
        return zc * n._galois_sqrt2() * n2._galois_sqrt3() * FieldElem.from_rat(1 / rat)

    # -- conjugations ----------------------------------------------------

    def conj(self) -> FieldElem:
        c = self._c
        return FieldElem((c[0], c[1], c[2], c[3], -c[4], -c[5], -c[6], -c[7]))

    def _galois_sqrt2(self) -> FieldElem:
        c = self._c
        return FieldElem((c[0], -c[1], c[2], -c[3], c[4], -c[5], c[6], -c[7]))

    def _galois_sqrt3(self) -> FieldElem:
        c = self._c
        return FieldElem((c[0], c[1], -c[2], -c[3], c[4], c[5], -c[6], -c[7]))

    # -- predicates and parts ---------------------------------------------

    def is_zero(self) -> bool:
        return not any(self._c)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_real(self) -> bool:
        return not any(self._c[4:])

    def is_rational(self) -> bool:
        c = self._c
        return not any(c[1:])

    def as_qrat(self):
        if not self.is_rational():
            raise ValueError("element is not rational")
        return self._c[0]

    def real(self) -> FieldElem:
        c = self._c
        return FieldElem((c[0], c[1], c[2], c[3], 0, 0, 0, 0))

    def imag(self) -> FieldElem:
        """The real element y such that self = real() + i*y."""
        c = self._c
        return FieldElem((c[4], c[5], c[6], c[7], 0, 0, 0, 0))

    def __eq__(self, other) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self._c == o._c

    def __hash__(self) -> int:
        return hash(self._c)

    # -- output -----------------------------------------------------------

    def to_complex(self) -> complex:
        c = self._c
        re = math.fsum(float(c[k]) * _RADICAL_FLOATS[k] for k in range(4))
        im = math.fsum(float(c[4 + k]) * _RADICAL_FLOATS[k] for k in range(4))
        return complex(re, im)

    def serialize(self) -> tuple[str, ...]:
        return tuple(f"{x.numerator}/{x.denominator}" for x in self._c)

    @classmethod
    def deserialize(cls, parts) -> FieldElem:
        return cls(tuple(QRat(p) for p in parts))

    def key(self) -> tuple[int, ...]:
        """Flat integer tuple (num, den) * 8, for ordering and hashing."""
        out = []
        for x in self._c:
            out.append(int(x.numerator))
            out.append(int(x.denominator))
        return tuple(out)

    def __repr__(self) -> str:
        names = ("", "*r2", "*r3", "*r6", "*i", "*i*r2", "*i*r3", "*i*r6")
        terms = [f"{x}{names[k]}" for k, x in enumerate(self._c) if x]
        return "Fe(" + (" + ".join(terms) if terms else "0") + ")"


ZERO = FieldElem.from_int(0)
ONE = FieldElem.from_int(1)
I_UNIT = FieldElem((0, 0, 0, 0, 1, 0, 0, 0))
SQRT2 = FieldElem((0, 1, 0, 0, 0, 0, 0, 0))
SQRT3 = FieldElem((0, 0, 1, 0, 0, 0, 0, 0))
SQRT6 = FieldElem((0, 0, 0, 1, 0, 0, 0, 0))
HALF = FieldElem.from_rat(QRat(1, 2))
# Primitive sixth root of unity (1 + i*sqrt3)/2 and cube root (zeta squared).
ZETA6 = FieldElem((QRat(1, 2), 0, 0, 0, 0, 0, QRat(1, 2), 0))
OMEGA = FieldElem((QRat(-1, 2), 0, 0, 0, 0, 0, QRat(1, 2), 0))


def conj(a: FieldElem) -> FieldElem:
    return a.conj()


def to_complex_float(a: FieldElem) -> complex:
    return a.to_complex()


def sign_of_real(a: FieldElem) -> int:
    """Exact sign of a real field element under the embedding sqrt2, sqrt3 > 0.

    Dyadic interval enclosures of the radicals are refined until zero is
    excluded; the exact zero test keeps this terminating.
    """
    if not a.is_real():
        raise ValueError("sign_of_real needs a real element")
    c = a._c
    if not any(c[:4]):
        return 0
    if not any(c[1:4]):
        return 1 if c[0] > 0 else -1
    bits = 32
    while True:
        scale = 1 << bits
        lo = hi = _Q0
        for k in range(4):
            q = c[k]
            if not q:
                continue
            if k == 0:
                lo += q
                hi += q
                continue
            s = math.isqrt(_RADICANDS[k] << (2 * bits))
            low_b = QRat(s, scale)
            high_b = QRat(s + 1, scale)
            if q > 0:
                lo += q * low_b
                hi += q * high_b
            else:
                lo += q * high_b
                hi += q * low_b
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        bits *= 2


def rationalize(x: float, max_den: int = 10**12):
    """Nearest rational with bounded denominator, as a QRat."""
    f = Fraction(x).limit_denominator(max_den)
    return QRat(f.numerator, f.denominator)


# The four real embeddings of Q(sqrt2, sqrt3), as sign pairs (s2, s3).
_EMBED_SIGNS = ((1, 1), (-1, 1), (1, -1), (-1, -1))


def _embed_real(a: FieldElem, s2: int, s3: int) -> float:
    c = a._c
    return (
        float(c[0])
        + float(c[1]) * s2 * _RADICAL_FLOATS[1]
        + float(c[2]) * s3 * _RADICAL_FLOATS[2]
        + float(c[3]) * s2 * s3 * _RADICAL_FLOATS[3]
    )


def sqrt_real(a: FieldElem) -> FieldElem | None:
    """Square root of a real element inside the real subfield, if one exists.

    Candidate roots are reconstructed from the four real embeddings and
    verified exactly, so a non-None result is always correct.  None means no
    root was found among candidates of moderate height; squares occurring in
    this artifact all have small coordinates.
    """
    if not a.is_real():
        raise ValueError("sqrt_real needs a real element")
    if a.is_zero():
        return ZERO
    emb = [_embed_real(a, s2, s3) for s2, s3 in _EMBED_SIGNS]
    if any(e < 0 for e in emb):
        return None  # squares are totally positive
    roots = [math.sqrt(e) for e in emb]
    r2, r3, r6 = _RADICAL_FLOATS[1], _RADICAL_FLOATS[2], _RADICAL_FLOATS[3]
    for mask in range(8):
        v = [
            roots[0],
            roots[1] * (-1 if mask & 1 else 1),
            roots[2] * (-1 if mask & 2 else 1),
            roots[3] * (-1 if mask & 4 else 1),
        ]
        p = (v[0] + v[1] + v[2] + v[3]) / 4
        q = (v[0] - v[1] + v[2] - v[3]) / (4 * r2)
        r = (v[0] + v[1] - v[2] - v[3]) / (4 * r3)
        s = (v[0] - v[1] - v[2] + v[3]) / (4 * r6)
        for max_den in (10**6, 10**12):
            cand = FieldElem(
                (
                    rationalize(p, max_den),
                    rationalize(q, max_den),
                    rationalize(r, max_den),
                    rationalize(s, max_den),
                    0,
                    0,
                    0,
                    0,
                )
            )
            if cand * cand == a:
                if sign_of_real(cand) < 0:
                    cand = -cand
                return cand
    return None
