"""Boundary geometry in the Siegel model.

Point classification, Heisenberg chart coordinates, bisectors and spinal
spheres, C-circles and R-circles.  Every predicate is exact; floats appear
only in the final chart conversion of a pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .hlinalg import (
    HERM_FORM,
    Mat3F,
    Vec3F,
    eigen_in_field,
    herm,
    herm_sign,
    kernel,
    proportional,
    solve_basis,
)
from .qfield import (
    I_UNIT,
    ONE,
    SQRT2,
    SQRT3,
    SQRT6,
    ZERO,
    FieldElem,
    QRat,
    rationalize,
    sign_of_real,
    sqrt_real,
)

INTERIOR = "interior"
BOUNDARY = "boundary"
EXTERIOR = "exterior"


class ProjPoint:
    """A point of CP^2 given by a nonzero lift; equality is proportionality."""

    __slots__ = ("lift",)

    def __init__(self, lift: Vec3F) -> None:
        if lift.is_zero():
            raise ValueError("projective point needs a nonzero lift")
        self.lift = lift

    def __eq__(self, other) -> bool:
        return isinstance(other, ProjPoint) and proportional(self.lift, other.lift)

    def __repr__(self) -> str:
        return f"ProjPoint({self.lift!r})"


def _lift(p) -> Vec3F:
    if isinstance(p, ProjPoint):
        return p.lift
    if isinstance(p, Vec3F):
        return p
    raise TypeError(f"expected ProjPoint or Vec3F, got {type(p).__name__}")


def classify_point(p) -> str:
    s = herm_sign(_lift(p))
    if s < 0:
        return INTERIOR
    if s == 0:
        return BOUNDARY
    return EXTERIOR


@dataclass(frozen=True)
class HeisenbergCoord:
    """Chart image (z, t) of a finite boundary point, or the point at infinity."""

    z: complex = 0j
    t: float = 0.0
    infinite: bool = False

    @classmethod
    def infinity(cls) -> HeisenbergCoord:
        return cls(0j, 0.0, True)

    def to_csv_row(self) -> str:
        if self.infinite:
            return "inf"
        return f"{self.z.real!r},{self.z.imag!r},{self.t!r}"

    def as_xyz(self) -> tuple[float, float, float]:
        if self.infinite:
            raise ValueError("point at infinity has no chart coordinates")
        return (self.z.real, self.z.imag, self.t)


def normalized_boundary_lift(p) -> Vec3F | None:
    """Exact lift scaled to third coordinate 1; None for the point at infinity."""
    v = _lift(p)
    if herm_sign(v) != 0:
        raise ValueError("not a boundary point")
    if v[2].is_zero():
        return None
    s = v[2].inv()
    return Vec3F((v[0] * s, v[1] * s, ONE))


def heisenberg_exact(p) -> tuple[FieldElem, FieldElem] | None:
    """Exact chart coordinates (z, t) of a finite boundary point; None at infinity."""
    u = normalized_boundary_lift(p)
    if u is None:
        return None
    z = u[1]
    t = (u[0] * (-2)).imag()
    return z, t


def to_heisenberg(p) -> HeisenbergCoord:
    coords = heisenberg_exact(p)
    if coords is None:
        return HeisenbergCoord.infinity()
    z, t = coords
    return HeisenbergCoord(z.to_complex(), t.to_complex().real)


def lift_from_heisenberg(z: FieldElem, t: FieldElem) -> Vec3F:
    """Exact boundary lift (-(|z|^2 + i t)/2, z, 1) from exact chart coordinates."""
    if not t.is_real():
        raise ValueError("t must be a real field element")
    norm2 = z * z.conj()
    first = (norm2 + I_UNIT * t) * FieldElem.from_rat(QRat(-1, 2))
    return Vec3F((first, z, ONE))


def _outer(z: Vec3F) -> Mat3F:
    return Mat3F(tuple(z[i] * z[j].conj() for i in range(3) for j in range(3)))


class SpinalSphere:
    """Boundary locus |<z1, w>| = |<z2, w>| for lifts with equal self-products.

    The same data with the interior predicate describes the bisector.
    """

    __slots__ = ("z1", "z2")

    def __init__(self, z1: Vec3F, z2: Vec3F) -> None:
        if herm(z1, z1) != herm(z2, z2):
            raise ValueError("lifts must have equal self Hermitian products")
        if proportional(z1, z2):
            raise ValueError("defining lifts must not be proportional")
        self.z1 = z1
        self.z2 = z2

    def difference(self, p) -> FieldElem:
        """|<z1, w>|^2 - |<z2, w>|^2 as an exact real field element."""
        w = _lift(p)
        a = herm(self.z1, w)
        b = herm(self.z2, w)
        return a * a.conj() - b * b.conj()

    def transform(self, m: Mat3F) -> SpinalSphere:
        return SpinalSphere(m @ self.z1, m @ self.z2)

    def swapped(self) -> SpinalSphere:
        return SpinalSphere(self.z2, self.z1)

    def herm_matrix(self) -> Mat3F:
        """Hermitian matrix H with locus {null w : w* H w = 0}."""
        diff = _outer(self.z1) - _outer(self.z2)
        return HERM_FORM @ diff @ HERM_FORM

    def same_locus(self, other: SpinalSphere) -> bool:
        """Exact point-set equality: defining forms proportional by a real scalar."""
        h1 = self.herm_matrix()
        h2 = other.herm_matrix()
        ratio = None
        for i in range(9):
            a = h1._m[i]
            b = h2._m[i]
            if a.is_zero() != b.is_zero():
                return False
            if ratio is None and not a.is_zero():
                ratio = b * a.inv()
                if not ratio.is_real() or ratio.is_zero():
                    return False
        if ratio is None:
            return False
        return h2 == h1.scale(ratio)

    def __repr__(self) -> str:
        return f"SpinalSphere({self.z1!r}, {self.z2!r})"


def on_spinal_sphere(p, s: SpinalSphere) -> bool:
    return s.difference(p).is_zero()


def side_of_bisector(p, s: SpinalSphere) -> int:
    """Exact sign of |<z1, p>|^2 - |<z2, p>|^2 (-1: strictly z1 side)."""
    return sign_of_real(s.difference(p))


class CCircle:
    """Boundary circle of a complex line, stored by its polar vector."""

    __slots__ = ("polar",)

    def __init__(self, polar: Vec3F) -> None:
        if herm_sign(polar) <= 0:
            raise ValueError("polar vector must have positive self-product")
        self.polar = polar

    def contains(self, p) -> bool:
        w = _lift(p)
        return herm(self.polar, w).is_zero() and herm_sign(w) == 0

    def on_line(self, p) -> bool:
        return herm(self.polar, _lift(p)).is_zero()

    def transform(self, m: Mat3F) -> CCircle:
        return CCircle(m @ self.polar)

    def __repr__(self) -> str:
        return f"CCircle({self.polar!r})"


def ccircle_through(p, q) -> CCircle:
    """The C-circle through two distinct boundary points."""
    u, v = _lift(p), _lift(q)
    n = HERM_FORM @ u.cross(v).conj()
    return CCircle(n)


class RCircleParam:
    """An R-circle spanned by three lifts whose Gram matrix is real."""

    __slots__ = ("q1", "q2", "q3")

    def __init__(self, q1: Vec3F, q2: Vec3F, q3: Vec3F) -> None:
        basis = (q1, q2, q3)
        for i in range(3):
            for j in range(3):
                if not herm(basis[i], basis[j]).is_real():
                    raise ValueError("Gram matrix of the basis must be real")
        if Mat3F.from_rows([tuple(q1), tuple(q2), tuple(q3)]).det().is_zero():
            raise ValueError("basis lifts must be linearly independent")
        self.q1, self.q2, self.q3 = basis

    def basis(self) -> tuple[Vec3F, Vec3F, Vec3F]:
        return (self.q1, self.q2, self.q3)

    def gram(self) -> list[list[FieldElem]]:
        b = self.basis()
        return [[herm(b[i], b[j]) for j in range(3)] for i in range(3)]

    def transform(self, m: Mat3F) -> RCircleParam:
        return RCircleParam(m @ self.q1, m @ self.q2, m @ self.q3)

    def point_from_real_coords(self, x1, x2, x3) -> Vec3F:
        coeffs = []
        for x in (x1, x2, x3):
            fe = x if isinstance(x, FieldElem) else FieldElem.from_rat(QRat(x))
            if not fe.is_real():
                raise ValueError("coordinates on the circle must be real")
            coeffs.append(fe)
        return (
            self.q1.scale(coeffs[0])
            + self.q2.scale(coeffs[1])
            + self.q3.scale(coeffs[2])
        )

    def __repr__(self) -> str:
        return f"RCircleParam({self.q1!r}, {self.q2!r}, {self.q3!r})"


def rcircle_contains(p, r: RCircleParam) -> bool:
    """Exact membership: lift decomposes with projectively real coefficients
    and is null for the form."""
    w = _lift(p)
    x = solve_basis(r.q1, r.q2, r.q3, w)
    if x is None:
        return False
    for i in range(3):
        for j in range(i + 1, 3):
            if not (x[i] * x[j].conj()).is_real():
                return False
    return herm(w, w).is_zero()


def ccircles_of_elliptic(m: Mat3F) -> tuple[CCircle, CCircle]:
    """The two invariant C-circles of a regular elliptic element.

    Their polars are the two eigenvectors of positive self-product.
    """
    eig = eigen_in_field(m)
    if not eig.complete:
        raise ValueError("spectrum is not contained in the field")
    if len(eig.pairs) != 3:
        raise ValueError("element is not regular elliptic")
    positive = []
    for pair in eig.pairs:
        if len(pair.vectors) != 1:
            raise ValueError("element is not regular elliptic")
        if herm_sign(pair.vectors[0]) > 0:
            positive.append(pair.vectors[0])
    if len(positive) != 2:
        raise ValueError("element is not regular elliptic")
    return CCircle(positive[0]), CCircle(positive[1])


_NULL_DIRECTIONS = (
    (ONE, ZERO),
    (ZERO, ONE),
    (ONE, ONE),
    (ONE, SQRT2),
    (SQRT2, ONE),
    (ONE, SQRT3),
    (SQRT3, ONE),
    (ONE, SQRT6),
    (SQRT6, ONE),
    (ONE, FieldElem.from_int(2)),
    (FieldElem.from_int(2), ONE),
    (SQRT2, SQRT3),
    (SQRT3, SQRT2),
)


def _find_null_on_line(e: Vec3F, f: Vec3F) -> Vec3F:
    """An exact null vector in span(e, f), where the restricted form has
    signature (1,1).

    Reduces to a circle equation over the real subfield; points are sought
    along directions with coordinates in the subfield and verified exactly.
    """
    a = herm(e, e)
    if a.is_zero():
        return e
    c = herm(f, f)
    if c.is_zero():
        return f
    gamma = herm(e, f)
    g1, g2 = gamma.real(), gamma.imag()
    a_inv = a.inv()
    # alpha = X + iY for the point alpha*e + f satisfies
    # (X + g1/a)^2 + (Y + g2/a)^2 = R2.
    r2 = (g1 * g1 + g2 * g2 - a * c) * a_inv * a_inv
    if sign_of_real(r2) < 0:
        raise ArithmeticError("line does not meet the null cone")
    for dx, dy in _NULL_DIRECTIONS:
        denom = dx * dx + dy * dy
        root = sqrt_real(r2 * denom.inv())
        if root is None:
            continue
        alpha = (root * dx - g1 * a_inv) + I_UNIT * (root * dy - g2 * a_inv)
        cand = e.scale(alpha) + f
        if herm(cand, cand).is_zero():
            return cand
    raise ArithmeticError("no field-rational null point found on the line")


def null_basis_of_line(polar: Vec3F) -> tuple[Vec3F, Vec3F]:
    """Two non-proportional exact null vectors spanning the line polar-perp."""
    row = Mat3F(
        (
            polar[2].conj(), polar[1].conj(), polar[0].conj(),
            ZERO, ZERO, ZERO,
            ZERO, ZERO, ZERO,
        )
    )
    base = kernel(row)
    if len(base) != 2:
        raise ValueError("polar vector is degenerate")
    e, f = base
    u = _find_null_on_line(e, f)
    # second null point via the affine slice through a non-proportional partner
    partner = e if not proportional(u, e) else f
    c = herm(partner, partner)
    if c.is_zero():
        return u, partner
    gamma = herm(u, partner)
    if gamma.is_zero():
        raise ArithmeticError("degenerate null pair on the line")
    alpha = (-c * FieldElem.from_rat(QRat(1, 2)) * gamma.inv()).conj()
    v = u.scale(alpha) + partner
    if not herm(v, v).is_zero() or proportional(u, v):
        raise ArithmeticError("failed to build a second null point")
    return u, v


def _pencil_parameters(n: int) -> list[QRat | None]:
    """n parameters for one turn of an RP^1 pencil, uniform in angle.

    None denotes the parameter at infinity.  The exact rational values ARE the
    parameters; floats only seed them.
    """
    out: list[QRat | None] = []
    for k in range(n):
        theta = math.pi * (k / n - 0.5)
        if k == 0:
            out.append(None)
        else:
            out.append(rationalize(math.tan(theta)))
    return out


def ccircle_points_exact(c: CCircle, n: int) -> list[Vec3F]:
    """n exact boundary lifts on the C-circle, ordered along the circle."""
    if n < 3:
        raise ValueError("need at least 3 samples")
    u, v = null_basis_of_line(c.polar)
    gamma = herm(u, v)
    out = []
    for t in _pencil_parameters(n):
        if t is None:
            out.append(v)
        else:
            s = I_UNIT * FieldElem.from_rat(t) * gamma.inv()
            out.append(u + v.scale(s))
    return out


def sample_ccircle(c: CCircle, n: int) -> list[HeisenbergCoord]:
    """Chart images of exact C-circle samples; exactness checked pre-float."""
    pts = ccircle_points_exact(c, n)
    for w in pts:
        if not herm(w, w).is_zero() or not herm(c.polar, w).is_zero():
            raise AssertionError("sample fails the exact boundary/line equations")
    return [to_heisenberg(w) for w in pts]


def spinal_sphere_chart_samples(s: SpinalSphere, box: float, grid: int):
    """Float samples of a spinal sphere in the chart, via the quadratic in t.

    For fixed z the defining equation is a quadratic in t; its real roots over
    a (2*grid+1)^2 grid of z values give points on the sphere.  Numerical
    stand-in used for disjointness checks, not an exact predicate.
    """
    import numpy as np

    z1 = [x.to_complex() for x in s.z1]
    z2 = [x.to_complex() for x in s.z2]
    xs = np.linspace(-box, box, 2 * grid + 1)
    zz = (xs[:, None] + 1j * xs[None, :]).ravel()

    def coeffs(zl):
        kappa = (
            zl[0].conjugate()
            + zl[1].conjugate() * zz
            - zl[2].conjugate() * (np.abs(zz) ** 2) / 2.0
        )
        nu = zl[2].conjugate()
        c0 = np.abs(kappa) ** 2
        c1 = np.imag(np.conj(kappa) * nu)
        c2 = np.full_like(c0, abs(nu) ** 2 / 4.0)
        return c0, c1, c2

    a0, a1, a2 = coeffs(z1)
    b0, b1, b2 = coeffs(z2)
    q0, q1, q2 = a0 - b0, a1 - b1, a2 - b2
    pts = []
    quad = np.abs(q2) > 1e-14
    disc = q1 * q1 - 4.0 * q2 * q0
    ok = quad & (disc >= 0.0)
    sqrt_disc = np.sqrt(np.where(ok, disc, 0.0))
    for sign in (1.0, -1.0):
        t = np.where(ok, (-q1 + sign * sqrt_disc) / (2.0 * np.where(quad, q2, 1.0)), np.nan)
        sel = ok & np.isfinite(t)
        pts.append(np.column_stack([zz.real[sel], zz.imag[sel], t[sel]]))
    lin = (~quad) & (np.abs(q1) > 1e-14)
    t = np.where(lin, -q0 / np.where(lin, q1, 1.0), np.nan)
    sel = lin & np.isfinite(t)
    pts.append(np.column_stack([zz.real[sel], zz.imag[sel], t[sel]]))
    return np.vstack(pts)
