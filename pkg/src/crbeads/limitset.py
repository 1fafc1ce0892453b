"""The invariant boundary circle and its consequences.

Exact stability data for the circle's spanning basis, orbit point clouds,
chains of image circles with certified common points, and the planar
projection with its double point.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

from .cxhyp import (
    HeisenbergCoord,
    RCircleParam,
    ccircle_through,
    heisenberg_exact,
    rcircle_contains,
    to_heisenberg,
)
from .gamma6 import Constants, constants, orbit_bfs, parse_word
from .hlinalg import Mat3F, Vec3F, herm, solve_basis
from .qfield import FieldElem, QRat, rationalize, sqrt_real

GRAM_EXPECTED = (
    (0, -16, -16),
    (-16, 0, -64),
    (-16, -64, 0),
)


@lru_cache(maxsize=4)
def r0_circle(consts: Constants | None = None) -> RCircleParam:
    """The invariant circle spanned by p_B and its two B1-images."""
    c = consts or constants()
    circle = RCircleParam(c.p_B, c.B1 @ c.p_B, c.B1.inv() @ c.p_B)
    gram = circle.gram()
    for i in range(3):
        for j in range(3):
            if gram[i][j] != FieldElem.from_int(GRAM_EXPECTED[i][j]):
                raise AssertionError("basis Gram matrix has unexpected entries")
    return circle


def r0_conic(consts: Constants | None = None) -> list[list[QRat]]:
    """Restriction of the form to the real span, as a rational symmetric matrix.

    The value at (x1, x2, x3) is x^T Q x = -32 (x1 x2 + x1 x3 + 4 x2 x3); the
    circle is the real projective null conic of Q.
    """
    gram = r0_circle(consts).gram()
    return [[gram[i][j].as_qrat() for j in range(3)] for i in range(3)]


def conic_value(q: list[list[QRat]], x1, x2, x3) -> QRat:
    x = (QRat(x1), QRat(x2), QRat(x3))
    total = QRat(0)
    for i in range(3):
        for j in range(3):
            total += q[i][j] * x[i] * x[j]
    return total


def pencil_parameters(n: int) -> list[QRat | None]:
    """Exact rational parameters for one turn of the conic pencil.

    Uniform in the pencil angle; None is the parameter at infinity.  The
    rationalized values are the exact parameters, floats only seed them.
    """
    out: list[QRat | None] = []
    for k in range(n):
        theta = math.pi * (k / n - 0.5)
        out.append(None if k == 0 else rationalize(math.tan(theta)))
    return out


def _conic_coords(s) -> tuple:
    """Second intersection of the pencil line with the conic: (4s, -(1+s), -s(1+s)).

    Accepts a rational or real field element; None is the infinite parameter.
    """
    if s is None:
        return (QRat(0), QRat(0), QRat(1))
    if isinstance(s, FieldElem):
        one = FieldElem.from_int(1)
        return (s * 4, -(one + s), -(s * (one + s)))
    one = QRat(1)
    return (4 * s, -(one + s), -s * (one + s))


def sample_r0(n: int, consts: Constants | None = None) -> list[Vec3F]:
    """n exact null lifts on the invariant circle, ordered along the circle."""
    if n < 3:
        raise ValueError("need at least 3 samples")
    circle = r0_circle(consts)
    out = []
    for s in pencil_parameters(n):
        x1, x2, x3 = _conic_coords(s)
        out.append(circle.point_from_real_coords(x1, x2, x3))
    return out


def stability_matrix(g, consts: Constants | None = None) -> list[list[FieldElem]]:
    """Matrix of a group element acting on the circle's real span, by columns.

    Solved exactly in the spanning basis; a non-real coefficient is an error
    (the element would not preserve the real span).
    """
    c = consts or constants()
    if isinstance(g, str):
        g = {"B": c.B, "B1": c.B1}[g]
    circle = r0_circle(c)
    cols = []
    for q in circle.basis():
        x = solve_basis(circle.q1, circle.q2, circle.q3, g @ q)
        if x is None:
            raise ValueError("image leaves the span of the basis")
        for entry in x:
            if not entry.is_real():
                raise ValueError("non-real stability coefficient")
        cols.append((x[0], x[1], x[2]))
    return [[cols[j][i] for j in range(3)] for i in range(3)]


def decompose_pV(consts: Constants | None = None) -> tuple[QRat, QRat, QRat]:
    """Exact rational coordinates of p_V in the circle's spanning basis."""
    c = consts or constants()
    circle = r0_circle(c)
    x = solve_basis(circle.q1, circle.q2, circle.q3, c.p_V)
    if x is None:
        raise ValueError("p_V does not decompose in the basis")
    out = []
    for entry in x:
        if not entry.is_rational():
            raise ValueError("non-real decomposition coefficient")
        out.append(entry.as_qrat())
    return tuple(out)


@dataclass(frozen=True)
class CloudPoint:
    heis: HeisenbergCoord
    word_length: int
    sample_index: int


def cloud(
    depth: int,
    samples: int,
    generators: str = "AB",
    threads: int = 1,
    consts: Constants | None = None,
) -> list[CloudPoint]:
    """Images of the circle samples under all orbit elements up to depth.

    Points are exact null lifts converted to chart floats at the end, ordered
    by (word length, canonical element, sample index); the output is
    independent of the thread count.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    c = consts or constants()
    if generators == "AB":
        gens = [c.A, c.B]
    elif generators == "ST":
        gens = [c.S, c.T]
    else:
        raise ValueError("generators must be 'AB' or 'ST'")
    orbit = orbit_bfs(gens, depth, threads=threads)
    base = sample_r0(samples, c)

    def apply(entry):
        m = entry.elem.rep
        return [
            CloudPoint(to_heisenberg(m @ q), entry.length, i)
            for i, q in enumerate(base)
        ]

    if threads > 1 and len(orbit) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(apply, orbit))
    else:
        chunks = [apply(entry) for entry in orbit]
    return [pt for chunk in chunks for pt in chunk]


@dataclass(frozen=True)
class ChainResult:
    circles: list[RCircleParam]
    common_points: list[Vec3F]


def chain(word: str, consts: Constants | None = None) -> ChainResult:
    """Image circles along a word, with an exactly certified common point for
    each consecutive pair."""
    c = consts or constants()
    tokens = parse_word(word)
    for letter, _ in tokens:
        if letter not in ("A", "B"):
            raise ValueError("chain words use A and B letters only")
    circle0 = r0_circle(c)
    a_pb = c.A @ c.p_B
    circles = [circle0]
    commons: list[Vec3F] = []
    prefix = Mat3F.identity()
    for letter, power in tokens:
        step = c.generator(letter)
        if power == -1:
            step = step.inv()
        base_common = a_pb if (letter, power) == ("A", 1) else c.p_B
        common = prefix @ base_common
        prefix = prefix @ step
        circles.append(circle0.transform(prefix))
        commons.append(common)
    for i, common in enumerate(commons):
        if not rcircle_contains(common, circles[i]):
            raise AssertionError(f"common point {i} fails membership on circle {i}")
        if not rcircle_contains(common, circles[i + 1]):
            raise AssertionError(f"common point {i} fails membership on circle {i + 1}")
    return ChainResult(circles, commons)


# -- planar projection -------------------------------------------------------


def _chart_z(theta: float, basis_f) -> complex:
    """Chart z of the conic point at pencil angle theta, via homogeneous
    trigonometric coordinates (smooth through the infinite parameter)."""
    ct, st = math.cos(theta), math.sin(theta)
    x1 = 4.0 * st * ct
    x2 = -ct * (ct + st)
    x3 = -st * (ct + st)
    w1 = x1 * basis_f[0][1] + x2 * basis_f[1][1] + x3 * basis_f[2][1]
    w2 = x1 * basis_f[0][2] + x2 * basis_f[1][2] + x3 * basis_f[2][2]
    return w1 / w2


@dataclass(frozen=True)
class DoublePoint:
    index_a: int
    index_b: int
    param_a: FieldElem
    param_b: FieldElem
    z: complex
    gap: float
    preimage_a: Vec3F
    preimage_b: Vec3F
    exact: bool


@dataclass(frozen=True)
class LemniscateResult:
    points: list[complex]
    closure_gap: float
    double: DoublePoint
    vertical_polar: Vec3F
    all_on_vertical_exact: bool


def lemniscate(n: int, consts: Constants | None = None) -> LemniscateResult:
    """Planar projection of the circle in the chart where the translation
    fixed point sits at infinity, with a located double point.

    The double point is seeded by a nearest-approach scan over non-adjacent
    sample pairs and polished by Newton iteration on the two pencil angles;
    the polished parameters are rationalized, giving exact preimage lifts.
    """
    if n < 8:
        raise ValueError("need at least 8 samples")
    c = consts or constants()
    circle = r0_circle(c)
    lifts = sample_r0(n, c)
    coords = [to_heisenberg(w) for w in lifts]
    if any(p.infinite for p in coords):
        raise AssertionError("projection chart hits infinity")
    zs = [p.z for p in coords]
    closure_gap = abs(zs[0] - zs[-1])

    min_sep = max(2, int(0.1 * n) + 1)
    best = None
    for i in range(n):
        zi = zs[i]
        for j in range(i + min_sep, min(n, i + n - min_sep + 1)):
            d = abs(zi - zs[j])
            if best is None or d < best[0]:
                best = (d, i, j)
    _, bi, bj = best

    basis_f = [tuple(x.to_complex() for x in q) for q in circle.basis()]
    th = [math.pi * (bi / n - 0.5), math.pi * (bj / n - 0.5)]
    eps = 1e-7
    for _ in range(60):
        f = _chart_z(th[0], basis_f) - _chart_z(th[1], basis_f)
        if abs(f) < 1e-13:
            break
        d0 = (_chart_z(th[0] + eps, basis_f) - _chart_z(th[0] - eps, basis_f)) / (2 * eps)
        d1 = (_chart_z(th[1] + eps, basis_f) - _chart_z(th[1] - eps, basis_f)) / (2 * eps)
        a, b = d0, -d1
        det = a.real * b.imag - a.imag * b.real
        if abs(det) < 1e-18:
            break
        dx = (-f.real * b.imag + f.imag * b.real) / det
        dy = (-a.real * f.imag + a.imag * f.real) / det
        th[0] += dx
        th[1] += dy

    s_a, s_b, exact = _recognize_parameters(math.tan(th[0]), math.tan(th[1]))
    pre_a = circle.point_from_real_coords(*_conic_coords(s_a))
    pre_b = circle.point_from_real_coords(*_conic_coords(s_b))
    za_exact = heisenberg_exact(pre_a)[0]
    zb_exact = heisenberg_exact(pre_b)[0]
    if exact and za_exact != zb_exact:
        exact = False
    za, zb = za_exact.to_complex(), zb_exact.to_complex()
    gap = 0.0 if exact else abs(za - zb)

    vertical = ccircle_through(pre_a, c.p_A)
    if not vertical.polar[2].is_zero():
        raise AssertionError("circle through the infinite point is not vertical")
    if not vertical.contains(pre_a) or not vertical.contains(c.p_A):
        raise AssertionError("vertical circle misses its defining points")
    on_vertical_exact = vertical.contains(pre_b)

    double = DoublePoint(bi, bj, s_a, s_b, (za + zb) / 2.0, gap, pre_a, pre_b, exact)
    return LemniscateResult(zs, closure_gap, double, vertical.polar, on_vertical_exact)


def _recognize_parameters(ta: float, tb: float) -> tuple[FieldElem, FieldElem, bool]:
    """Exact parameters for the polished double point, when recognizable.

    The two parameters are conjugate roots of a rational quadratic when the
    double point is algebraic over the rationals inside the field; recognize
    the quadratic from the float sum and product, solve with an in-field
    square root, and fall back to independent rationalization otherwise.
    """
    p = rationalize(ta + tb, 10**6)
    q = rationalize(ta * tb, 10**6)
    disc = FieldElem.from_rat(p * p - 4 * q)
    root = sqrt_real(disc)
    if root is not None:
        half = FieldElem.from_rat(QRat(1, 2))
        lo = (FieldElem.from_rat(p) - root) * half
        hi = (FieldElem.from_rat(p) + root) * half
        if ta <= tb:
            cand_a, cand_b = lo, hi
        else:
            cand_a, cand_b = hi, lo
        fa = cand_a.to_complex().real
        fb = cand_b.to_complex().real
        if abs(fa - ta) < 1e-6 * (1 + abs(ta)) and abs(fb - tb) < 1e-6 * (1 + abs(tb)):
            return cand_a, cand_b, True
    return (
        FieldElem.from_rat(rationalize(ta)),
        FieldElem.from_rat(rationalize(tb)),
        False,
    )
