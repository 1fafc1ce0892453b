"""The uniformization group: generators, word evaluation, canonical
representatives in the projective group, exhaustive identity verification,
orbit enumeration, and the 12-face Dirichlet membership test."""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

from .cxhyp import ProjPoint, SpinalSphere, side_of_bisector
from .hlinalg import (
    Mat3F,
    Vec3F,
    char_poly,
    eigen_in_field,
    herm,
    herm_sign,
    is_su21,
    kernel,
    proportional,
    solve_basis,
)
from .qfield import OMEGA, ONE, ZERO, FieldElem, QRat

_HALF = QRat(1, 2)

# sqrt2 * zeta = (sqrt2 + i sqrt6)/2 and its conjugate
_S2_ZETA = FieldElem((0, _HALF, 0, 0, 0, 0, 0, _HALF))
_S2_ZETA_C = FieldElem((0, _HALF, 0, 0, 0, 0, 0, -_HALF))
_SQRT2 = FieldElem((0, 1, 0, 0, 0, 0, 0, 0))
_I_SQRT3_M1 = FieldElem((-1, 0, 0, 0, 0, 0, 1, 0))    # i*sqrt3 - 1
_MI_SQRT3_M1 = FieldElem((-1, 0, 0, 0, 0, 0, -1, 0))  # -i*sqrt3 - 1


def _standard_s() -> Mat3F:
    return Mat3F.from_rows(
        [
            (ONE, _S2_ZETA_C, FieldElem.from_int(-1)),
            (-_S2_ZETA, FieldElem.from_int(-1), ZERO),
            (FieldElem.from_int(-1), ZERO, ZERO),
        ]
    )


def _standard_t() -> Mat3F:
    return Mat3F.from_rows(
        [
            (ZERO, ZERO, FieldElem.from_int(-1)),
            (ZERO, FieldElem.from_int(-1), -_S2_ZETA_C),
            (FieldElem.from_int(-1), _S2_ZETA, ONE),
        ]
    )


class Constants:
    """Generator matrices, fixed-point lifts, and the 12 bisector faces."""

    def __init__(self, s: Mat3F | None = None, t: Mat3F | None = None) -> None:
        self.S = s if s is not None else _standard_s()
        self.T = t if t is not None else _standard_t()
        self.A = Mat3F.from_rows(
            [
                (ONE, -_SQRT2, _I_SQRT3_M1),
                (ZERO, ONE, _SQRT2),
                (ZERO, ZERO, ONE),
            ]
        )
        self.B = Mat3F.from_rows(
            [
                (ONE, ZERO, ZERO),
                (_SQRT2, ONE, ZERO),
                (_MI_SQRT3_M1, -_SQRT2, ONE),
            ]
        )
        self.S_inv = self.S.inv()
        self.T_inv = self.T.inv()
        self.U = self.S_inv @ self.T
        self.V = self.T @ self.S_inv
        self.W = self.S_inv @ self.U @ self.S
        self.B1 = self.A @ self.B @ self.B @ self.A.inv()

        self.p_A = Vec3F((ONE, ZERO, ZERO))
        self.p_B = Vec3F((ZERO, ZERO, ONE))
        # Fixed vector of U for eigenvalue 1, scaled so the self-product is -8
        # (matching p_V); this pins the Dirichlet center and the face data.
        self.p_U = Vec3F(
            (
                FieldElem.from_int(4),
                FieldElem((0, -1, 0, 0, 0, 0, 0, -1)),  # -sqrt2 (1 + i sqrt3)
                FieldElem((-2, 0, 0, 0, 0, 0, 2, 0)),   # -2 (1 - i sqrt3)
            )
        )
        self.p_V = Vec3F(
            (
                FieldElem.from_int(4),
                FieldElem((0, 1, 0, 0, 0, 0, 0, -1)),   # sqrt2 (1 - i sqrt3)
                FieldElem((-2, 0, 0, 0, 0, 0, -2, 0)),  # -2 (1 + i sqrt3)
            )
        )
        self.p_W = self.S_inv @ self.p_U

        u_pow = [Mat3F.identity()]
        for _ in range(5):
            u_pow.append(u_pow[-1] @ self.U)
        self.faces: dict[str, SpinalSphere] = {}
        for k in range(6):
            m = u_pow[k]
            self.faces[f"J{k}+"] = SpinalSphere(m @ self.p_U, m @ self.p_V)
            self.faces[f"J{k}-"] = SpinalSphere(m @ self.p_U, m @ self.p_W)

    def face(self, k: int, sign: str) -> SpinalSphere:
        return self.faces[f"J{k % 6}{sign}"]

    def generator(self, letter: str) -> Mat3F:
        return {
            "S": self.S, "T": self.T, "A": self.A,
            "B": self.B, "U": self.U, "V": self.V,
        }[letter]


@lru_cache(maxsize=1)
def constants() -> Constants:
    return Constants()


_OMEGA_SQ = OMEGA * OMEGA


class GroupElem:
    """Canonical projective representative of a matrix.

    The three lifts of one projective element differ by cube roots of unity;
    the representative is the lexicographically least serialized lift, so
    equality and hashing agree with equality in the projective group.
    """

    __slots__ = ("rep", "_key")

    def __init__(self, m: Mat3F) -> None:
        best = m
        best_key = m.key()
        for scalar in (OMEGA, _OMEGA_SQ):
            cand = m.scale(scalar)
            k = cand.key()
            if k < best_key:
                best, best_key = cand, k
        self.rep = best
        self._key = best_key

    def __matmul__(self, other: GroupElem) -> GroupElem:
        return GroupElem(self.rep @ other.rep)

    def inv(self) -> GroupElem:
        return GroupElem(self.rep.inv())

    def key(self) -> tuple[int, ...]:
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, GroupElem) and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def serialize_line(self) -> str:
        return ";".join(",".join(e.serialize()) for e in self.rep._m)

    def __repr__(self) -> str:
        return f"GroupElem({self.rep!r})"


IDENTITY = GroupElem(Mat3F.identity())


def parse_word(word: str) -> list[tuple[str, int]]:
    """Compact word syntax: uppercase letter = generator, lowercase = inverse."""
    tokens = []
    for ch in word:
        if ch in " .*":
            continue
        up = ch.upper()
        if up not in "STABUV":
            raise ValueError(f"unknown generator letter {ch!r}")
        tokens.append((up, 1 if ch.isupper() else -1))
    return tokens


def word_matrix(word: str, consts: Constants | None = None) -> Mat3F:
    c = consts or constants()
    acc = Mat3F.identity()
    for letter, power in parse_word(word):
        g = c.generator(letter)
        acc = acc @ (g if power == 1 else g.inv())
    return acc


def evaluate(word: str, consts: Constants | None = None) -> GroupElem:
    return GroupElem(word_matrix(word, consts))


# -- identity verification -------------------------------------------------


def _hash_data(data) -> str:
    return hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()[:16]


def _entry(name: str, ok: bool, lhs_data, rhs_data, detail: str | None = None) -> dict:
    out = {
        "identity": name,
        "status": "pass" if ok else "fail",
        "lhs_hash": _hash_data(lhs_data),
        "rhs_hash": _hash_data(rhs_data),
    }
    if detail is not None:
        out["detail"] = detail
    return out


def _scalar_kind(m: Mat3F) -> str | None:
    """Which multiple of the identity a matrix is: '1', 'omega', 'omega^2', or None."""
    for name, scalar in (("1", ONE), ("omega", OMEGA), ("omega^2", _OMEGA_SQ)):
        if m == Mat3F.identity().scale(scalar):
            return name
    return None


def verify_identities(consts: Constants | None = None) -> list[dict]:
    """Exact pass/fail report for every algebraic identity the group satisfies."""
    c = consts or constants()
    ident = Mat3F.identity()
    report: list[dict] = []

    def mat_check(name: str, lhs: Mat3F, rhs: Mat3F, projective: bool = True):
        su_exact = lhs == rhs
        ok = su_exact or (projective and GroupElem(lhs) == GroupElem(rhs))
        detail = "exact in SU(2,1)" if su_exact else ("exact in PU(2,1)" if ok else None)
        report.append(_entry(name, ok, lhs.serialize(), rhs.serialize(), detail))

    def vec_check(name: str, lhs: Vec3F, rhs: Vec3F):
        report.append(
            _entry(name, proportional(lhs, rhs), lhs.serialize(), rhs.serialize())
        )

    for g_name in ("S", "T", "A", "B", "U", "V"):
        g = c.generator(g_name)
        report.append(_entry(f"{g_name} in SU(2,1)", is_su21(g), g.serialize(), "SU(2,1)"))
    report.append(_entry("W in SU(2,1)", is_su21(c.W), c.W.serialize(), "SU(2,1)"))

    mat_check("S^3 = Id", c.S @ c.S @ c.S, ident, projective=False)
    mat_check("T^3 = Id", c.T @ c.T @ c.T, ident, projective=False)
    mat_check("A = S T", c.A, c.S @ c.T, projective=False)
    mat_check("B = T S", c.B, c.T @ c.S, projective=False)

    u6 = c.U ** 6
    v6 = c.V ** 6
    report.append(
        _entry(
            "(S^-1 T)^6 = Id in PU(2,1)",
            GroupElem(u6) == IDENTITY,
            u6.serialize(),
            ident.serialize(),
            detail=f"U^6 = {_scalar_kind(u6)} * Id in SU(2,1)",
        )
    )
    report.append(
        _entry(
            "V^6 = Id in PU(2,1)",
            GroupElem(v6) == IDENTITY,
            v6.serialize(),
            ident.serialize(),
            detail=f"V^6 = {_scalar_kind(v6)} * Id in SU(2,1)",
        )
    )

    v3 = c.V ** 3
    v3_sq = v3 @ v3
    order2_su = v3_sq == ident and v3 != ident
    report.append(
        _entry(
            "V^3 has order 2",
            GroupElem(v3_sq) == IDENTITY and GroupElem(v3) != IDENTITY,
            v3_sq.serialize(),
            ident.serialize(),
            detail="order 2 in SU(2,1)" if order2_su else "order 2 only in PU(2,1)",
        )
    )

    a_inv, b_inv = c.A.inv(), c.B.inv()
    mat_check("[A,B] = V^3", c.A @ c.B @ a_inv @ b_inv, v3)
    mat_check("S A S^-1 = B^-1 A^-1", c.S @ c.A @ c.S_inv, b_inv @ a_inv)
    mat_check("S B S^-1 = A", c.S @ c.B @ c.S_inv, c.A)
    mat_check("T A T^-1 = B", c.T @ c.A @ c.T_inv, c.B)
    mat_check("T B T^-1 = A^-1 B^-1", c.T @ c.B @ c.T_inv, a_inv @ b_inv)
    u_inv = c.U.inv()
    mat_check("A^-1 U A = U^-1 V U", a_inv @ c.U @ c.A, u_inv @ c.V @ c.U)
    mat_check("A^-1 W A = U", a_inv @ c.W @ c.A, c.U)
    mat_check(
        "V^3 B V^-3 = A B^2 A^-1 B^-1",
        v3 @ c.B @ (c.V ** -3),
        c.A @ c.B @ c.B @ a_inv @ b_inv,
    )

    vec_check("A U^-2 p_B ~ U p_B", c.A @ (u_inv @ u_inv @ c.p_B), c.U @ c.p_B)
    vec_check("A^-1 p_U ~ U^-1 p_V", a_inv @ c.p_U, u_inv @ c.p_V)
    vec_check("A^-1 p_W ~ p_U", a_inv @ c.p_W, c.p_U)
    vec_check("V p_V = p_V (eigenvector)", c.V @ c.p_V, c.p_V)
    vec_check("U p_U ~ p_U", c.U @ c.p_U, c.p_U)
    vec_check("A p_A = p_A", c.A @ c.p_A, c.p_A)
    vec_check("B p_B = p_B", c.B @ c.p_B, c.p_B)

    for name, mat in (("A", c.A), ("B", c.B)):
        c0, c1, c2 = char_poly(mat)
        ok = c0 == FieldElem.from_int(-1) and c1 == FieldElem.from_int(3) and c2 == FieldElem.from_int(-3)
        report.append(
            _entry(
                f"{name} unipotent (triple eigenvalue 1)",
                ok,
                [x.serialize() for x in (c0, c1, c2)],
                "charpoly (x-1)^3",
            )
        )

    herm_values = (
        ("herm(p_B, B1 p_B) = -16", herm(c.p_B, c.B1 @ c.p_B), -16),
        ("herm(p_B, B1^-1 p_B) = -16", herm(c.p_B, c.B1.inv() @ c.p_B), -16),
        ("herm(B1 p_B, B1^-1 p_B) = -64", herm(c.B1 @ c.p_B, c.B1.inv() @ c.p_B), -64),
        ("herm(p_U, p_U) = -8", herm(c.p_U, c.p_U), -8),
        ("herm(p_V, p_V) = -8", herm(c.p_V, c.p_V), -8),
    )
    for name, value, expected in herm_values:
        report.append(
            _entry(name, value == FieldElem.from_int(expected), value.serialize(), expected)
        )

    face_img = c.face(-1, "+").transform(c.A)
    report.append(
        _entry(
            "A J_-1^+ = J_0^- (point sets)",
            face_img.same_locus(c.face(0, "-")),
            face_img.z1.serialize() + face_img.z2.serialize(),
            c.face(0, "-").z1.serialize() + c.face(0, "-").z2.serialize(),
        )
    )

    j0_minus = c.face(0, "-")
    s_plus = c.face(0, "+").transform(c.S)
    s_inv_plus = c.face(0, "+").transform(c.S_inv)
    eq_s = j0_minus.same_locus(s_plus)
    eq_s_inv = j0_minus.same_locus(s_inv_plus)
    report.append(
        _entry(
            "J_0^- convention resolution",
            eq_s != eq_s_inv,
            {"S J0+": eq_s},
            {"S^-1 J0+": eq_s_inv},
            detail=(
                "B(p_U, p_W) = S J_0^+" if eq_s
                else ("B(p_U, p_W) = S^-1 J_0^+" if eq_s_inv else "matches neither")
            ),
        )
    )
    return report


# -- fixed points ------------------------------------------------------------


@dataclass(frozen=True)
class FixedPointInfo:
    kind: str
    points: tuple[ProjPoint, ...]


def _null_direction_in_plane(k1: Vec3F, k2: Vec3F) -> Vec3F | None:
    """Radical of the restricted form on span(k1, k2), when one-dimensional."""
    a, g = herm(k1, k1), herm(k1, k2)
    gc, c = herm(k2, k1), herm(k2, k2)
    sol = kernel(
        Mat3F((a, g, ZERO, gc, c, ZERO, ZERO, ZERO, ONE))
    )
    if len(sol) != 1:
        return None
    alpha, beta = sol[0][0], sol[0][1]
    return k1.scale(alpha) + k2.scale(beta)


def fixed_point(g: GroupElem | Mat3F) -> FixedPointInfo:
    """Fixed point(s) and isometry type, via exact in-field eigendata."""
    m = g.rep if isinstance(g, GroupElem) else g
    eig = eigen_in_field(m)
    if not eig.complete:
        raise ValueError("spectrum is not contained in the field")
    pairs = eig.pairs
    if len(pairs) == 1:
        lam = pairs[0].value
        if m == Mat3F.identity().scale(lam):
            raise ValueError("scalar element is not regular")
        vecs = pairs[0].vectors
        if len(vecs) == 1:
            v = vecs[0]
            if herm_sign(v) != 0:
                raise ValueError("unipotent fixed direction is not null")
            return FixedPointInfo("parabolic-unipotent", (ProjPoint(v),))
        null_dir = _null_direction_in_plane(vecs[0], vecs[1])
        if null_dir is None or herm_sign(null_dir) != 0:
            raise ValueError("degenerate unipotent fixed plane")
        return FixedPointInfo("parabolic-unipotent", (ProjPoint(null_dir),))
    if len(pairs) == 3:
        signs = {}
        for p in pairs:
            if len(p.vectors) != 1:
                raise ValueError("unexpected eigenspace dimension")
            signs[p] = herm_sign(p.vectors[0])
        negatives = [p for p in pairs if signs[p] < 0]
        nulls = [p for p in pairs if signs[p] == 0]
        if len(negatives) == 1 and not nulls:
            return FixedPointInfo("elliptic-regular", (ProjPoint(negatives[0].vectors[0]),))
        if len(nulls) == 2:
            return FixedPointInfo(
                "loxodromic", tuple(ProjPoint(p.vectors[0]) for p in nulls)
            )
        raise ValueError("unrecognized sign pattern for regular element")
    # two distinct eigenvalues: complex reflection or screw parabolic
    double = max(pairs, key=lambda p: p.alg_mult)
    single = min(pairs, key=lambda p: p.alg_mult)
    geo = sum(len(p.vectors) for p in pairs)
    if geo == 3:
        if len(single.vectors) == 1 and herm_sign(single.vectors[0]) < 0:
            return FixedPointInfo("elliptic-point-reflection", (ProjPoint(single.vectors[0]),))
        return FixedPointInfo("elliptic-line-reflection", ())
    null_fixed = [
        v for p in pairs for v in p.vectors if herm_sign(v) == 0
    ]
    if len(null_fixed) == 1:
        return FixedPointInfo("parabolic-screw", (ProjPoint(null_fixed[0]),))
    raise ValueError("unrecognized fixed-point structure")


# -- Dirichlet domain --------------------------------------------------------


def dirichlet_contains(p, consts: Constants | None = None) -> tuple[str, list[str]]:
    """Membership of an interior point in the 12-face Dirichlet domain.

    Faces are oriented toward the center: inside means the center side of
    every face, exactly.  Returns ("inside", []), ("on-face", names) or
    ("outside", violating names).
    """
    from .cxhyp import classify_point

    c = consts or constants()
    if classify_point(p) != "interior":
        raise ValueError("Dirichlet test needs an interior point")
    on_faces: list[str] = []
    outside: list[str] = []
    for name, face in c.faces.items():
        s = side_of_bisector(p, face)
        if s > 0:
            outside.append(name)
        elif s == 0:
            on_faces.append(name)
    if outside:
        return "outside", outside
    if on_faces:
        return "on-face", on_faces
    return "inside", []


# -- orbit enumeration ------------------------------------------------------


@dataclass(frozen=True)
class OrbitEntry:
    elem: GroupElem
    length: int


def _as_group_elem(g) -> GroupElem:
    return g if isinstance(g, GroupElem) else GroupElem(g)


def orbit_bfs(generators, max_len: int, threads: int = 1) -> list[OrbitEntry]:
    """All distinct projective elements of word length <= max_len.

    Deduplication is by canonical representative; the output order
    (word length, canonical key) and the content are independent of the
    worker-thread count.
    """
    if max_len < 0:
        raise ValueError("max_len must be >= 0")
    moves: list[GroupElem] = []
    for g in generators:
        ge = _as_group_elem(g)
        for m in (ge, ge.inv()):
            if all(m != existing for existing in moves):
                moves.append(m)
    moves.sort(key=lambda m: m.key())

    seen: dict[GroupElem, int] = {IDENTITY: 0}
    frontier = [IDENTITY]
    for length in range(1, max_len + 1):
        if not frontier:
            break

        def expand(chunk):
            return [f @ m for f in chunk for m in moves]

        if threads > 1 and len(frontier) > 1:
            chunks = [frontier[i::threads] for i in range(threads)]
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(expand, chunks))
            candidates = [x for chunk in results for x in chunk]
        else:
            candidates = expand(frontier)
        fresh: dict[GroupElem, None] = {}
        for cand in candidates:
            if cand not in seen and cand not in fresh:
                fresh[cand] = None
        new_elems = sorted(fresh, key=lambda e: e.key())
        for e in new_elems:
            seen[e] = length
        frontier = new_elems
    entries = [OrbitEntry(e, l) for e, l in seen.items()]
    entries.sort(key=lambda o: (o.length, o.elem.key()))
    return entries
