"""sl3 in four bases, brackets, normalizers and structural invariants."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

from .exactfield import I, ONE, ZERO, FieldElement, NotReal, as_fe, fe_real_sign
from .linalg3 import (
    Mat3, Subspace, char_poly, commutator, conjugate_by, is_squarefree, mat_inv, min_poly,
    nullspace, rref, rref_rows,
)


class NotTraceless(ValueError):
    pass


class NotClosedSpan(ValueError):
    pass


class NotOneDimensional(ValueError):
    pass


E = Mat3.unit
_half = as_fe(1) / 2

FRAME_NAMES: dict[str, tuple[str, ...]] = {
    "chevalley": ("Ha", "Hb", "Xa", "Xb", "Xab", "Ya", "Yb", "Yab"),
    "winternitz": ("K1", "K2", "L3", "D", "P1", "P2", "R1", "R2"),
    "su21_A": tuple(f"A{k}" for k in range(1, 9)),
    "su3_B": tuple(f"B{k}" for k in range(1, 9)),
}


def _frames() -> dict[str, tuple[Mat3, ...]]:
    Ha = Mat3.diag(1, -1, 0)
    Hb = Mat3.diag(0, 1, -1)
    chev = (Ha, Hb, E(0, 1), E(1, 2), -E(0, 2), E(1, 0), E(2, 1), -E(2, 0))
    win = (
        Mat3.diag(1, -1, 0).scale(_half),
        (E(0, 1) + E(1, 0)).scale(_half),
        (E(1, 0) - E(0, 1)).scale(_half),
        Mat3.diag(1, 1, -2),
        E(0, 2), E(1, 2), E(2, 0), E(2, 1),
    )
    su21 = (
        Mat3.diag(I, -I, 0),
        Mat3.diag(0, I, -I),
        E(0, 1) - E(1, 0),
        (E(0, 1) + E(1, 0)).scale(I),
        E(0, 2) + E(2, 0),
        (E(0, 2) - E(2, 0)).scale(I),
        E(1, 2) + E(2, 1),
        (E(1, 2) - E(2, 1)).scale(I),
    )
    su3 = (
        (E(0, 1) + E(1, 0)).scale(I),
        E(0, 1) - E(1, 0),
        (E(0, 2) + E(2, 0)).scale(I),
        E(0, 2) - E(2, 0),
        (E(1, 2) + E(2, 1)).scale(I),
        E(1, 2) - E(2, 1),
        Mat3.diag(I, -I, 0),
        Mat3.diag(0, I, -I),
    )
    return {"chevalley": chev, "winternitz": win, "su21_A": su21, "su3_B": su3}


FRAMES = _frames()
CHEVALLEY = FRAMES["chevalley"]


def frame_symbols() -> dict[str, Mat3]:
    """Every basis matrix of every frame under its symbol name."""
    out: dict[str, Mat3] = {}
    for kind, names in FRAME_NAMES.items():
        out.update(zip(names, FRAMES[kind]))
    return out


def bracket(x: Mat3, y: Mat3) -> Mat3:
    return commutator(x, y)


def chev_coords(m: Mat3) -> tuple[FieldElement, ...]:
    if not m.trace().is_zero():
        raise NotTraceless("matrix is not traceless")
    r = m.rows
    return (r[0][0], -r[2][2], r[0][1], r[1][2], -r[0][2], r[1][0], r[2][1], -r[2][0])


def from_chev(v: Sequence[FieldElement]) -> Mat3:
    h1, h2, xa, xb, xab, ya, yb, yab = (as_fe(c) for c in v)
    return Mat3([[h1, xa, -xab], [ya, h2 - h1, xb], [-yab, yb, -h2]])


@lru_cache(maxsize=None)
def _frame_inverse(kind: str) -> tuple[tuple[FieldElement, ...], ...]:
    # rows of M = chevalley coords of frame matrices; we need coords c with
    # sum c_k f_k = x, i.e. c = x * M^{-1}
    mats = FRAMES[kind]
    rows = []
    for k, m in enumerate(mats):
        unit = [ZERO] * 8
        unit[k] = ONE
        rows.append(list(chev_coords(m)) + unit)
    red, piv = rref_rows(rows)
    if piv[:8] != tuple(range(8)):
        raise AssertionError(f"frame {kind} is not a basis")
    return tuple(tuple(r[8:]) for r in red)


def to_frame(x: Mat3, kind: str = "chevalley") -> tuple[FieldElement, ...]:
    v = chev_coords(x)
    if kind == "chevalley":
        return v
    minv = _frame_inverse(kind)
    return tuple(
        sum((v[j] * minv[j][k] for j in range(8) if not v[j].is_zero()), ZERO) for k in range(8)
    )


def from_frame(c: Sequence, kind: str) -> Mat3:
    out = Mat3.zero()
    for a, m in zip(c, FRAMES[kind]):
        a = as_fe(a)
        if not a.is_zero():
            out = out + m.scale(a)
    return out


# -- subalgebras --------------------------------------------------------

@dataclass(frozen=True)
class Subalgebra:
    span: Subspace
    frame_hint: str = "chevalley"
    label: str = ""
    real_basis: tuple[Mat3, ...] | None = field(default=None, compare=False)

    @classmethod
    def from_matrices(cls, mats: Iterable[Mat3], label: str = "", frame_hint: str = "chevalley",
                      real: bool = False) -> "Subalgebra":
        mats = tuple(mats)
        span = rref([chev_coords(m) for m in mats], 8)
        rb = _independent(mats) if real else None
        return cls(span, frame_hint, label, rb)

    @property
    def dim(self) -> int:
        return self.span.dim

    def basis(self) -> tuple[Mat3, ...]:
        return tuple(from_chev(v) for v in self.span.basis)

    def preferred_basis(self) -> tuple[Mat3, ...]:
        return self.real_basis if self.real_basis is not None else self.basis()

    def contains(self, m: Mat3) -> bool:
        return self.span.coords_of(chev_coords(m)) is not None

    def same_span(self, other: "Subalgebra") -> bool:
        return self.span == other.span


def _independent(mats: Sequence[Mat3]) -> tuple[Mat3, ...]:
    keep: list[Mat3] = []
    rows: list[tuple] = []
    for m in mats:
        trial = rows + [chev_coords(m)]
        if rref(trial, 8).dim == len(trial):
            rows = trial
            keep.append(m)
    return tuple(keep)


def span_of(vectors: Iterable[Mat3]) -> Subspace:
    vs = [chev_coords(m) for m in vectors]
    return rref(vs, 8) if vs else Subspace((), 8)


def is_closed(u: Subalgebra) -> bool:
    b = u.basis()
    for i in range(len(b)):
        for j in range(i + 1, len(b)):
            if not u.contains(bracket(b[i], b[j])):
                return False
    return True


def transport(g: Mat3, u: Subalgebra, g_inv: Mat3 | None = None) -> Subalgebra:
    if g_inv is None:
        g_inv = mat_inv(g)
    mats = [conjugate_by(g, m, g_inv) for m in u.preferred_basis()]
    span = span_of(mats)
    return Subalgebra(span, u.frame_hint, u.label, None)


def _residual_map(s: Subspace):
    basis, pivots = s.basis, s.pivots

    def residual(w: Sequence[FieldElement]) -> list[FieldElement]:
        w = list(w)
        for row, p in zip(basis, pivots):
            c = w[p]
            if c.is_zero():
                continue
            w = [a - c * b if not b.is_zero() else a for a, b in zip(w, row)]
        return w

    return residual


def normalizer(u: Subalgebra) -> Subspace:
    """{x in sl3 : [x, u] in u}, as a subspace in chevalley coordinates."""
    residual = _residual_map(u.span)
    cols = []  # one column per chevalley unknown, stacked over u's basis
    ub = u.basis()
    for e in CHEVALLEY:
        col: list[FieldElement] = []
        for m in ub:
            col.extend(residual(chev_coords(bracket(e, m))))
        cols.append(col)
    if not ub:
        return rref([tuple(ONE if i == k else ZERO for i in range(8)) for k in range(8)], 8)
    rows = [list(r) for r in zip(*cols)]
    ker = nullspace(rows, 8)
    return rref(ker, 8) if ker else Subspace((), 8)


# -- structure ----------------------------------------------------------

class _CoordSolver:
    """Coordinates of vectors of a span relative to a fixed (non-RREF) basis."""

    def __init__(self, vectors: Sequence[Sequence[FieldElement]]):
        n = len(vectors)
        self.n = n
        rows = []
        for k, v in enumerate(vectors):
            unit = [ZERO] * n
            unit[k] = ONE
            rows.append(list(v) + unit)
        red, piv = rref_rows(rows) if rows else ((), ())
        self.amb = len(vectors[0]) if vectors else 0
        self.rows = [(p, r[: self.amb], r[self.amb:]) for r, p in zip(red, piv) if p < self.amb]
        if len(self.rows) != n:
            raise ValueError("basis vectors are dependent")

    def __call__(self, v: Sequence[FieldElement]) -> list[FieldElement]:
        w = list(v)
        out = [ZERO] * self.n
        for p, r, t in self.rows:
            c = w[p]
            if c.is_zero():
                continue
            w = [a - c * b for a, b in zip(w, r)]
            out = [o + c * s for o, s in zip(out, t)]
        if any(not a.is_zero() for a in w):
            raise ValueError("vector not in span")
        return out


def _derived(mats: Sequence[Mat3], other: Sequence[Mat3]) -> tuple[Mat3, ...]:
    prods = [bracket(a, b) for a in mats for b in other]
    s = span_of([p for p in prods if not p.is_zero()])
    return tuple(from_chev(v) for v in s.basis)


def sym_signature(gram: Sequence[Sequence[FieldElement]]) -> tuple[int, int, int] | None:
    """(positive, negative, zero) inertia by symmetric Gaussian elimination.

    Returns None when a pivot is not real (the form is not a real form)."""
    a = [list(r) for r in gram]
    n = len(a)
    pos = neg = 0
    active = list(range(n))
    while active:
        k = next((i for i in active if not a[i][i].is_zero()), None)
        if k is None:
            pair = next(((i, j) for i in active for j in active if i < j and not a[i][j].is_zero()), None)
            if pair is None:
                break
            i, j = pair
            # e_i <- e_i + e_j makes the diagonal entry 2 a_ij + a_jj = 2 a_ij
            for m in range(n):
                a[i][m] = a[i][m] + a[j][m]
            for m in range(n):
                a[m][i] = a[m][i] + a[m][j]
            k = i
        d = a[k][k]
        if not d.is_real():
            return None
        if fe_real_sign(d) > 0:
            pos += 1
        else:
            neg += 1
        dinv = d.inv()
        active.remove(k)
        for i in active:
            f = a[i][k] * dinv
            if f.is_zero():
                continue
            for j in active:
                a[i][j] = a[i][j] - f * a[k][j]
        for i in active:
            a[i][k] = ZERO
            a[k][i] = ZERO
    return pos, neg, n - pos - neg


def gram_rank(gram: Sequence[Sequence[FieldElement]]) -> int:
    if not gram:
        return 0
    return len(rref_rows(gram)[0])


@dataclass(frozen=True)
class StructureProfile:
    dim: int
    derived_dims: tuple[int, ...]
    lower_central_dims: tuple[int, ...]
    killing_rank: int
    killing_signature: tuple[int, int, int] | None
    ambient_signature: tuple[int, int, int] | None
    is_solvable: bool
    is_nilpotent: bool
    is_semisimple: bool

    def as_dict(self) -> dict:
        return {
            "dim": self.dim,
            "derived_dims": list(self.derived_dims),
            "lower_central_dims": list(self.lower_central_dims),
            "killing_rank": self.killing_rank,
            "killing_signature": list(self.killing_signature) if self.killing_signature else None,
            "ambient_signature": list(self.ambient_signature) if self.ambient_signature else None,
            "is_solvable": self.is_solvable,
            "is_nilpotent": self.is_nilpotent,
            "is_semisimple": self.is_semisimple,
        }


def killing_gram(basis: Sequence[Mat3]) -> list[list[FieldElement]]:
    """Intrinsic Killing form tr(ad x ad y), with ad taken inside the span."""
    solve = _CoordSolver([chev_coords(b) for b in basis])
    n = len(basis)
    ad = []
    for x in basis:
        cols = [solve(chev_coords(bracket(x, y))) for y in basis]
        ad.append([[cols[j][i] for j in range(n)] for i in range(n)])
    gram = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            s = ZERO
            for p in range(n):
                for q in range(n):
                    x, y = ad[i][p][q], ad[j][q][p]
                    if not x.is_zero() and not y.is_zero():
                        s = s + x * y
            gram[i][j] = gram[j][i] = s
    return gram


def ambient_gram(basis: Sequence[Mat3]) -> list[list[FieldElement]]:
    """The sl3 trace form tr(xy) restricted to the span (a positive
    multiple of the ambient Killing form)."""
    n = len(basis)
    return [[(basis[i] * basis[j]).trace() for j in range(n)] for i in range(n)]


def structure_profile(u: Subalgebra) -> StructureProfile:
    if not is_closed(u):
        raise NotClosedSpan("structure profile of a span that is not a subalgebra")
    basis = u.preferred_basis()
    dim = len(basis)
    derived = [dim]
    cur = tuple(basis)
    while cur:
        nxt = _derived(cur, cur)
        if len(nxt) == len(cur):
            break
        derived.append(len(nxt))
        cur = nxt
    lower = [dim]
    cur = tuple(basis)
    while cur:
        nxt = _derived(basis, cur)
        if len(nxt) == len(cur):
            break
        lower.append(len(nxt))
        cur = nxt
    kg = killing_gram(basis)
    krank = gram_rank(kg)
    return StructureProfile(
        dim=dim,
        derived_dims=tuple(derived),
        lower_central_dims=tuple(lower),
        killing_rank=krank,
        killing_signature=sym_signature(kg),
        ambient_signature=sym_signature(ambient_gram(basis)),
        is_solvable=derived[-1] == 0,
        is_nilpotent=lower[-1] == 0,
        is_semisimple=dim > 0 and krank == dim,
    )


# -- 1-dimensional invariants -------------------------------------------

def pq(m: Mat3) -> tuple[FieldElement, FieldElement]:
    """Coefficients of char poly t^3 + p t + q of a traceless matrix."""
    cp = char_poly(m)
    c = cp.coeffs + (ZERO,) * (4 - len(cp.coeffs))
    return c[1], c[0]


@dataclass(frozen=True)
class ProjectiveInvariant:
    cls: str  # q_nonzero | q_zero_p_nonzero | nilpotent
    j: FieldElement | None = None
    p_sign: int | None = None

    def complex_level(self) -> tuple:
        return (self.cls, self.j)

    def as_dict(self) -> dict:
        from .exactfield import format_fe

        return {
            "class": self.cls,
            "j": format_fe(self.j) if self.j is not None else None,
            "p_sign": self.p_sign,
        }


def projective_invariant(u: Subalgebra) -> ProjectiveInvariant:
    if u.dim != 1:
        raise NotOneDimensional(f"dimension {u.dim}")
    m = u.preferred_basis()[0]
    p, q = pq(m)
    if not q.is_zero():
        return ProjectiveInvariant("q_nonzero", j=p ** 3 / q ** 2)
    if not p.is_zero():
        return ProjectiveInvariant("q_zero_p_nonzero", p_sign=fe_real_sign(p) if p.is_real() else None)
    return ProjectiveInvariant("nilpotent")


def _line_spectrum(m: Mat3) -> bool:
    """Semisimple traceless m whose eigenvalues lie on one real line through
    0, i.e. some complex multiple of m has purely imaginary spectrum."""
    if not is_squarefree(min_poly(m)):
        return False
    p, q = pq(m)
    if q.is_zero():
        return not p.is_zero() or m.is_zero()
    if p.is_zero():
        return False
    j = p ** 3 / q ** 2
    if not j.is_real():
        return False
    # discriminant of the rescaled real cubic: needs -4 j - 27 >= 0
    return fe_real_sign(-4 * j - 27) >= 0


def center(u: Subalgebra) -> tuple[Mat3, ...]:
    basis = u.basis()
    n = len(basis)
    if n == 0:
        return ()
    rows: list[list[FieldElement]] = []
    for y in basis:
        brs = [chev_coords(bracket(x, y)) for x in basis]
        for k in range(8):
            rows.append([brs[i][k] for i in range(n)])
    ker = nullspace(rows, n)
    out = []
    for c in ker:
        m = Mat3.zero()
        for a, x in zip(c, basis):
            if not a.is_zero():
                m = m + x.scale(a)
        out.append(m)
    return tuple(out)


def su3_candidate(u: Subalgebra) -> bool:
    """True when u is reductive in sl3 and has a basis of semisimple
    elements with purely imaginary eigenvalues (up to the choice of a
    complex multiple of each basis element), i.e. u can be the
    complexification of a subalgebra of su(3)."""
    basis = u.basis()
    der = _derived(basis, basis)
    z = center(u)
    if len(der) + len(z) != len(basis):
        return False
    if span_of(list(der) + list(z)).dim != len(basis):
        return False
    if der and gram_rank(killing_gram(der)) != len(der):
        return False
    if not all(is_squarefree(min_poly(m)) for m in z):
        return False
    if len(z) == 1:
        return _line_spectrum(z[0])
    # a 2-dimensional toral center is a Cartan subalgebra: always split
    return True


__all__ = [
    "FRAMES", "FRAME_NAMES", "CHEVALLEY", "Subalgebra", "StructureProfile", "ProjectiveInvariant",
    "NotTraceless", "NotOneDimensional", "NotClosedSpan", "bracket", "to_frame", "from_frame", "chev_coords",
    "from_chev", "is_closed", "normalizer", "transport", "structure_profile", "su3_candidate",
    "projective_invariant", "frame_symbols", "span_of", "killing_gram", "ambient_gram",
    "sym_signature", "center", "pq",
]
