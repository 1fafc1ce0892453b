"""Exact 3-vectors and 3x3 matrices over the field, and the signature-(2,1) form.

The Hermitian product is conjugate-linear in its first argument:
herm(z, w) = conj(z1) w3 + conj(z2) w2 + conj(z3) w1.
"""

from __future__ import annotations

from dataclasses import dataclass

from .qfield import (
    ONE,
    ZERO,
    FieldElem,
    QRat,
    rationalize,
    sign_of_real,
    sqrt_real,
)


def _fe(value) -> FieldElem:
    out = FieldElem._coerce(value)
    if out is None:
        raise TypeError(f"cannot coerce {value!r} to FieldElem")
    return out


class Vec3F:
    """A vector in C^3 with exact field coordinates."""

    __slots__ = ("_v",)

    def __init__(self, entries) -> None:
        v = tuple(_fe(x) for x in entries)
        if len(v) != 3:
            raise ValueError("Vec3F needs 3 entries")
        self._v = v

    def __getitem__(self, i: int) -> FieldElem:
        return self._v[i]

    def __iter__(self):
        return iter(self._v)

    def __add__(self, other: Vec3F) -> Vec3F:
        return Vec3F(tuple(a + b for a, b in zip(self._v, other._v)))

    def __sub__(self, other: Vec3F) -> Vec3F:
        return Vec3F(tuple(a - b for a, b in zip(self._v, other._v)))

    def __neg__(self) -> Vec3F:
        return Vec3F(tuple(-a for a in self._v))

    def scale(self, c) -> Vec3F:
        c = _fe(c)
        return Vec3F(tuple(c * a for a in self._v))

    def conj(self) -> Vec3F:
        return Vec3F(tuple(a.conj() for a in self._v))

    def is_zero(self) -> bool:
        return all(a.is_zero() for a in self._v)

    def cross(self, other: Vec3F) -> Vec3F:
        a, b = self._v, other._v
        return Vec3F(
            (
                a[1] * b[2] - a[2] * b[1],
                a[2] * b[0] - a[0] * b[2],
                a[0] * b[1] - a[1] * b[0],
            )
        )

    def __eq__(self, other) -> bool:
        return isinstance(other, Vec3F) and self._v == other._v

    def __hash__(self) -> int:
        return hash(self._v)

    def key(self) -> tuple[int, ...]:
        return self._v[0].key() + self._v[1].key() + self._v[2].key()

    def serialize(self) -> list[list[str]]:
        return [list(x.serialize()) for x in self._v]

    @classmethod
    def deserialize(cls, data) -> Vec3F:
        return cls(tuple(FieldElem.deserialize(p) for p in data))

    def to_complex(self) -> tuple[complex, complex, complex]:
        return tuple(x.to_complex() for x in self._v)

    def __repr__(self) -> str:
        return f"Vec3F({self._v[0]!r}, {self._v[1]!r}, {self._v[2]!r})"


def proportional(v: Vec3F, w: Vec3F) -> bool:
    """Projective equality: both nonzero and all 2x2 minors vanish."""
    if v.is_zero() or w.is_zero():
        return False
    for i in range(3):
        for j in range(i + 1, 3):
            if v[i] * w[j] != v[j] * w[i]:
                return False
    return True


class Mat3F:
    """A 3x3 matrix with exact field entries, row-major."""

    __slots__ = ("_m",)

    def __init__(self, entries) -> None:
        m = tuple(_fe(x) for x in entries)
        if len(m) != 9:
            raise ValueError("Mat3F needs 9 entries")
        self._m = m

    @classmethod
    def from_rows(cls, rows) -> Mat3F:
        return cls(tuple(x for row in rows for x in row))

    @classmethod
    def identity(cls) -> Mat3F:
        return cls((ONE, ZERO, ZERO, ZERO, ONE, ZERO, ZERO, ZERO, ONE))

    def __getitem__(self, idx) -> FieldElem:
        i, j = idx
        return self._m[3 * i + j]

    def row(self, i: int) -> tuple[FieldElem, FieldElem, FieldElem]:
        return self._m[3 * i : 3 * i + 3]

    def col(self, j: int) -> Vec3F:
        return Vec3F((self._m[j], self._m[3 + j], self._m[6 + j]))

    def __add__(self, other: Mat3F) -> Mat3F:
        return Mat3F(tuple(a + b for a, b in zip(self._m, other._m)))

    def __sub__(self, other: Mat3F) -> Mat3F:
        return Mat3F(tuple(a - b for a, b in zip(self._m, other._m)))

    def scale(self, c) -> Mat3F:
        c = _fe(c)
        return Mat3F(tuple(c * a for a in self._m))

    def __matmul__(self, other):
        if isinstance(other, Mat3F):
            a, b = self._m, other._m
            out = []
            for i in range(3):
                for j in range(3):
                    out.append(
                        a[3 * i] * b[j]
                        + a[3 * i + 1] * b[3 + j]
                        + a[3 * i + 2] * b[6 + j]
                    )
            return Mat3F(out)
        if isinstance(other, Vec3F):
            a = self._m
            return Vec3F(
                tuple(
                    a[3 * i] * other[0] + a[3 * i + 1] * other[1] + a[3 * i + 2] * other[2]
                    for i in range(3)
                )
            )
        return NotImplemented

    def conj_transpose(self) -> Mat3F:
        m = self._m
        return Mat3F(
            (
                m[0].conj(), m[3].conj(), m[6].conj(),
                m[1].conj(), m[4].conj(), m[7].conj(),
                m[2].conj(), m[5].conj(), m[8].conj(),
            )
        )

    def trace(self) -> FieldElem:
        m = self._m
        return m[0] + m[4] + m[8]

    def det(self) -> FieldElem:
        m = self._m
        return (
            m[0] * (m[4] * m[8] - m[5] * m[7])
            - m[1] * (m[3] * m[8] - m[5] * m[6])
            + m[2] * (m[3] * m[7] - m[4] * m[6])
        )

    def adjugate(self) -> Mat3F:
        m = self._m
        return Mat3F(
            (
                m[4] * m[8] - m[5] * m[7],
                m[2] * m[7] - m[1] * m[8],
                m[1] * m[5] - m[2] * m[4],
                m[5] * m[6] - m[3] * m[8],
                m[0] * m[8] - m[2] * m[6],
                m[2] * m[3] - m[0] * m[5],
                m[3] * m[7] - m[4] * m[6],
                m[1] * m[6] - m[0] * m[7],
                m[0] * m[4] - m[1] * m[3],
            )
        )

    def inv(self) -> Mat3F:
        d = self.det()
        if d.is_zero():
            raise ZeroDivisionError("singular matrix")
        return self.adjugate().scale(d.inv())

    def form_adjoint(self) -> Mat3F:
        """Adjoint with respect to the Hermitian form: Phi M* Phi."""
        return HERM_FORM @ self.conj_transpose() @ HERM_FORM

    def __pow__(self, n: int) -> Mat3F:
        base = self.inv() if n < 0 else self
        n = abs(n)
        acc = Mat3F.identity()
        while n:
            if n & 1:
                acc = acc @ base
            base = base @ base
            n >>= 1
        return acc

    def __eq__(self, other) -> bool:
        return isinstance(other, Mat3F) and self._m == other._m

    def __hash__(self) -> int:
        return hash(self._m)

    def key(self) -> tuple[int, ...]:
        out: tuple[int, ...] = ()
        for x in self._m:
            out += x.key()
        return out

    def serialize(self) -> list[list[str]]:
        return [list(x.serialize()) for x in self._m]

    @classmethod
    def deserialize(cls, data) -> Mat3F:
        return cls(tuple(FieldElem.deserialize(p) for p in data))

    def to_complex_rows(self):
        m = self._m
        return [[m[3 * i + j].to_complex() for j in range(3)] for i in range(3)]

    def __repr__(self) -> str:
        rows = [", ".join(repr(x) for x in self.row(i)) for i in range(3)]
        return "Mat3F[" + " | ".join(rows) + "]"


HERM_FORM = Mat3F((ZERO, ZERO, ONE, ZERO, ONE, ZERO, ONE, ZERO, ZERO))


def herm(z: Vec3F, w: Vec3F) -> FieldElem:
    return z[0].conj() * w[2] + z[1].conj() * w[1] + z[2].conj() * w[0]


def is_su21(m: Mat3F) -> bool:
    """True iff M* Phi M = Phi exactly and det M = 1."""
    return m.conj_transpose() @ HERM_FORM @ m == HERM_FORM and m.det() == ONE


def _rref(rows: list[list[FieldElem]]) -> list[int]:
    """In-place reduced row echelon form; returns the pivot columns.

    Pivot rule: first nonzero entry in column order, exact zero test.
    """
    n_rows = len(rows)
    n_cols = len(rows[0])
    piv_cols: list[int] = []
    r = 0
    for col in range(n_cols):
        prow = None
        for i in range(r, n_rows):
            if rows[i][col]:
                prow = i
                break
        if prow is None:
            continue
        rows[r], rows[prow] = rows[prow], rows[r]
        inv = rows[r][col].inv()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(n_rows):
            if i != r and rows[i][col]:
                f = rows[i][col]
                rows[i] = [rows[i][j] - f * rows[r][j] for j in range(n_cols)]
        piv_cols.append(col)
        r += 1
        if r == n_rows:
            break
    return piv_cols


def kernel(m: Mat3F) -> list[Vec3F]:
    """Exact basis of the null space; empty for full-rank input."""
    rows = [list(m.row(i)) for i in range(3)]
    piv_cols = _rref(rows)
    free_cols = [c for c in range(3) if c not in piv_cols]
    basis = []
    for fc in free_cols:
        v = [ZERO, ZERO, ZERO]
        v[fc] = ONE
        for rr, pc in enumerate(piv_cols):
            v[pc] = -rows[rr][fc]
        basis.append(Vec3F(v))
    return basis


def solve_basis(b1: Vec3F, b2: Vec3F, b3: Vec3F, target: Vec3F) -> Vec3F | None:
    """Coefficients (x1, x2, x3) with x1 b1 + x2 b2 + x3 b3 = target.

    Returns None when the basis is degenerate or the system is inconsistent.
    """
    rows = [[b1[i], b2[i], b3[i], target[i]] for i in range(3)]
    piv_cols = _rref(rows)
    if 3 in piv_cols:
        return None  # inconsistent
    if piv_cols != [0, 1, 2]:
        return None  # not a basis
    return Vec3F((rows[0][3], rows[1][3], rows[2][3]))


def char_poly(m: Mat3F) -> tuple[FieldElem, FieldElem, FieldElem]:
    """Coefficients (c0, c1, c2) of det(lambda I - M) = l^3 + c2 l^2 + c1 l + c0."""
    e = m._m
    s2 = (
        (e[4] * e[8] - e[5] * e[7])
        + (e[0] * e[8] - e[2] * e[6])
        + (e[0] * e[4] - e[1] * e[3])
    )
    return (-m.det(), s2, -m.trace())


def _twelfth_roots() -> tuple[FieldElem, ...]:
    half = QRat(1, 2)
    roots = [
        FieldElem((1, 0, 0, 0, 0, 0, 0, 0)),
        FieldElem((0, 0, half, 0, half, 0, 0, 0)),
        FieldElem((half, 0, 0, 0, 0, 0, half, 0)),
        FieldElem((0, 0, 0, 0, 1, 0, 0, 0)),
        FieldElem((-half, 0, 0, 0, 0, 0, half, 0)),
        FieldElem((0, 0, -half, 0, half, 0, 0, 0)),
    ]
    return tuple(roots + [-r for r in roots])


TWELFTH_ROOTS = _twelfth_roots()


@dataclass(frozen=True)
class EigenPair:
    value: FieldElem
    vectors: tuple[Vec3F, ...]
    alg_mult: int


@dataclass(frozen=True)
class EigenResult:
    pairs: tuple[EigenPair, ...]
    complete: bool

    def pair_for(self, value: FieldElem) -> EigenPair | None:
        for p in self.pairs:
            if p.value == value:
                return p
        return None


def _poly_eval(coeffs: list[FieldElem], x: FieldElem) -> FieldElem:
    acc = ZERO
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _poly_divide_root(coeffs: list[FieldElem], root: FieldElem) -> list[FieldElem]:
    """Divide a monic polynomial (coeffs low->high) by (x - root); exact."""
    deg = len(coeffs) - 1
    out = [ZERO] * deg
    carry = coeffs[deg]
    for k in range(deg - 1, -1, -1):
        out[k] = carry
        carry = coeffs[k] + root * carry
    return out


def _float_root_candidates(m: Mat3F) -> list[FieldElem]:
    import numpy as np

    vals = np.linalg.eigvals(np.array(m.to_complex_rows(), dtype=complex))
    out = []
    for v in vals:
        if abs(v.imag) < 1e-9:
            for max_den in (10**4, 10**9):
                out.append(FieldElem.from_rat(rationalize(float(v.real), max_den)))
    return out


def eigen_in_field(m: Mat3F) -> EigenResult:
    """Eigenvalues and exact eigenvectors, restricted to the field.

    Candidates are the twelfth roots of unity and rational reconstructions of
    the float spectrum; every accepted value is verified exactly against the
    characteristic polynomial.  After two roots the cubic deflates to a linear
    factor; a leftover quadratic is solved when its discriminant has a square
    root in the field.  Spectra outside the field yield complete=False.
    """
    c0, c1, c2 = char_poly(m)
    poly: list[FieldElem] = [c0, c1, c2, ONE]
    found: list[FieldElem] = []
    remaining = poly
    candidates = list(TWELFTH_ROOTS) + _float_root_candidates(m)
    progress = True
    while len(found) < 3 and progress:
        progress = False
        for cand in candidates:
            while len(found) < 3 and _poly_eval(remaining, cand).is_zero():
                found.append(cand)
                remaining = _poly_divide_root(remaining, cand)
                progress = True
        if len(found) == 2:
            # remaining is monic linear: x + remaining[0]
            found.append(-remaining[0])
            remaining = [ONE]
            progress = True
        elif len(found) == 1 and not progress:
            # remaining is monic quadratic x^2 + b x + c
            b, c = remaining[1], remaining[0]
            disc = b * b - c * 4
            if disc.is_real():
                root = sqrt_real(disc)
                if root is not None:
                    half = FieldElem.from_rat(QRat(1, 2))
                    found.append((-b + root) * half)
                    found.append((-b - root) * half)
                    remaining = [ONE]
                    progress = True
    mults: dict[FieldElem, int] = {}
    for v in found:
        mults[v] = mults.get(v, 0) + 1
    pairs = []
    for value, mult in mults.items():
        vecs = kernel(m - Mat3F.identity().scale(value))
        pairs.append(EigenPair(value, tuple(vecs), mult))
    return EigenResult(tuple(pairs), complete=(len(found) == 3))


def herm_sign(v: Vec3F) -> int:
    """Exact sign of herm(v, v); the self-product is always real."""
    return sign_of_real(herm(v, v))
