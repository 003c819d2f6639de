"""Exact linear algebra over Q(i, r2, r3): 3x3 matrices, row reduction,
characteristic and minimal polynomials."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .exactfield import ONE, ZERO, FieldElement, as_fe, format_fe


class Singular(ZeroDivisionError):
    pass


class DimensionMismatch(ValueError):
    pass


class Mat3:
    __slots__ = ("rows", "_hash")

    def __init__(self, rows: Sequence[Sequence]):
        rs = tuple(tuple(as_fe(x) for x in r) for r in rows)
        if len(rs) != 3 or any(len(r) != 3 for r in rs):
            raise DimensionMismatch("Mat3 needs 3 rows of 3 entries")
        self.rows = rs
        self._hash = None

    @classmethod
    def identity(cls) -> "Mat3":
        return _IDENTITY

    @classmethod
    def zero(cls) -> "Mat3":
        return _ZERO_MAT

    @classmethod
    def diag(cls, a, b, c) -> "Mat3":
        return cls([[a, 0, 0], [0, b, 0], [0, 0, c]])

    @classmethod
    def unit(cls, i: int, j: int) -> "Mat3":
        rows = [[0, 0, 0], [0, 0, 0], [0, 0, 0]]
        rows[i][j] = 1
        return cls(rows)

    @classmethod
    def from_flat(cls, v: Sequence) -> "Mat3":
        if len(v) != 9:
            raise DimensionMismatch("flattened Mat3 has 9 entries")
        return cls([v[0:3], v[3:6], v[6:9]])

    def __getitem__(self, ij: tuple[int, int]) -> FieldElement:
        i, j = ij
        return self.rows[i][j]

    def flat(self) -> tuple[FieldElement, ...]:
        r = self.rows
        return r[0] + r[1] + r[2]

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other: "Mat3") -> "Mat3":
        if not isinstance(other, Mat3):
            return NotImplemented
        return Mat3([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other: "Mat3") -> "Mat3":
        if not isinstance(other, Mat3):
            return NotImplemented
        return Mat3([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self) -> "Mat3":
        return Mat3([[-a for a in r] for r in self.rows])

    def scale(self, c) -> "Mat3":
        c = as_fe(c)
        return Mat3([[c * a for a in r] for r in self.rows])

    def __mul__(self, other):
        if isinstance(other, Mat3):
            return mat_mul(self, other)
        c = as_fe(other)
        if c is NotImplemented:
            return NotImplemented
        return self.scale(c)

    def __rmul__(self, other):
        c = as_fe(other)
        if c is NotImplemented:
            return NotImplemented
        return self.scale(c)

    def __truediv__(self, other):
        c = as_fe(other)
        if c is NotImplemented:
            return NotImplemented
        return self.scale(c.inv())

    def __pow__(self, n: int) -> "Mat3":
        if n < 0:
            return mat_inv(self) ** (-n)
        out = _IDENTITY
        for _ in range(n):
            out = out * self
        return out

    def transpose(self) -> "Mat3":
        r = self.rows
        return Mat3([[r[j][i] for j in range(3)] for i in range(3)])

    def conj(self) -> "Mat3":
        return Mat3([[a.conj() for a in r] for r in self.rows])

    def trace(self) -> FieldElement:
        r = self.rows
        return r[0][0] + r[1][1] + r[2][2]

    def det(self) -> FieldElement:
        return mat_det(self)

    def inv(self) -> "Mat3":
        return mat_inv(self)

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.rows for a in r)

    def is_real(self) -> bool:
        return all(a.is_real() for r in self.rows for a in r)

    def is_diagonal(self) -> bool:
        r = self.rows
        return all(r[i][j].is_zero() for i in range(3) for j in range(3) if i != j)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Mat3):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self) -> str:
        return f"Mat3({format_mat(self)})"


def format_mat(m: Mat3) -> str:
    return "[" + ", ".join("[" + ", ".join(format_fe(a) for a in r) + "]" for r in m.rows) + "]"


_IDENTITY = Mat3([[1, 0, 0], [0, 1, 0], [0, 0, 1]])
_ZERO_MAT = Mat3([[0, 0, 0], [0, 0, 0], [0, 0, 0]])


def mat_mul(a: Mat3, b: Mat3) -> Mat3:
    ar, br = a.rows, b.rows
    out = []
    for i in range(3):
        row = []
        for j in range(3):
            s = ZERO
            for k in range(3):
                x = ar[i][k]
                if x.is_zero():
                    continue
                y = br[k][j]
                if y.is_zero():
                    continue
                s = s + x * y
            row.append(s)
        out.append(row)
    return Mat3(out)


def mat_det(m: Mat3) -> FieldElement:
    (a, b, c), (d, e, f), (g, h, k) = m.rows
    return a * (e * k - f * h) - b * (d * k - f * g) + c * (d * h - e * g)


def adjugate(m: Mat3) -> Mat3:
    (a, b, c), (d, e, f), (g, h, k) = m.rows
    return Mat3([
        [e * k - f * h, c * h - b * k, b * f - c * e],
        [f * g - d * k, a * k - c * g, c * d - a * f],
        [d * h - e * g, b * g - a * h, a * e - b * d],
    ])


def mat_inv(m: Mat3) -> Mat3:
    d = mat_det(m)
    if d.is_zero():
        raise Singular("matrix is singular")
    adj = adjugate(m)
    if d == ONE:
        return adj
    return adj.scale(d.inv())


def commutator(x: Mat3, y: Mat3) -> Mat3:
    return x * y - y * x


def conjugate_by(g: Mat3, x: Mat3, g_inv: Mat3 | None = None) -> Mat3:
    if g_inv is None:
        g_inv = mat_inv(g)
    return g * x * g_inv


# -- row reduction ------------------------------------------------------

Vector = tuple[FieldElement, ...]


@dataclass(frozen=True)
class Subspace:
    """A span stored as its reduced row-echelon basis."""

    basis: tuple[Vector, ...]
    ambient_dim: int

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(_leading(r) for r in self.basis)

    def coords_of(self, v: Sequence[FieldElement]) -> tuple[FieldElement, ...] | None:
        """Coordinates of v on the RREF basis, or None if v is not in the span."""
        return _coords_in(self, v)


def _leading(row: Sequence[FieldElement]) -> int:
    for k, x in enumerate(row):
        if not x.is_zero():
            return k
    return -1


def rref_rows(vectors: Iterable[Sequence]) -> tuple[tuple[Vector, ...], tuple[int, ...]]:
    rows = [list(as_fe(x) for x in v) for v in vectors]
    if not rows:
        return (), ()
    n = len(rows[0])
    if any(len(r) != n for r in rows):
        raise DimensionMismatch("vectors of different lengths")
    pivots: list[int] = []
    r = 0
    for col in range(n):
        piv = None
        for k in range(r, len(rows)):
            if not rows[k][col].is_zero():
                piv = k
                break
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        lead = rows[r][col]
        if lead != ONE:
            inv = lead.inv()
            rows[r] = [x * inv if not x.is_zero() else x for x in rows[r]]
        prow = rows[r]
        for k in range(len(rows)):
            if k == r:
                continue
            f = rows[k][col]
            if f.is_zero():
                continue
            rows[k] = [a - f * b if not b.is_zero() else a for a, b in zip(rows[k], prow)]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return tuple(tuple(row) for row in rows[:r]), tuple(pivots)


def rref(vectors: Iterable[Sequence], ambient_dim: int | None = None) -> Subspace:
    vectors = list(vectors)
    if ambient_dim is None:
        if not vectors:
            raise DimensionMismatch("ambient dimension unknown for an empty list")
        ambient_dim = len(vectors[0])
    if any(len(v) != ambient_dim for v in vectors):
        raise DimensionMismatch("vector length differs from ambient dimension")
    basis, _ = rref_rows(vectors)
    return Subspace(basis, ambient_dim)


def _coords_in(s: Subspace, v: Sequence) -> tuple[FieldElement, ...] | None:
    if len(v) != s.ambient_dim:
        raise DimensionMismatch("vector length differs from ambient dimension")
    w = [as_fe(x) for x in v]
    coeffs = []
    for row, p in zip(s.basis, s.pivots):
        c = w[p]
        coeffs.append(c)
        if c.is_zero():
            continue
        w = [a - c * b if not b.is_zero() else a for a, b in zip(w, row)]
    if any(not a.is_zero() for a in w):
        return None
    return tuple(coeffs)


def in_span(v: Sequence, s: Subspace) -> bool:
    return _coords_in(s, v) is not None


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[Vector]:
    """Basis of {x : A x = 0} for the matrix with the given rows."""
    basis, pivots = rref_rows(rows) if rows else ((), ())
    free = [c for c in range(ncols) if c not in pivots]
    out = []
    for f in free:
        x = [ZERO] * ncols
        x[f] = ONE
        for row, p in zip(basis, pivots):
            x[p] = -row[f]
        out.append(tuple(x))
    return out


# -- polynomials --------------------------------------------------------

class Poly:
    """Univariate polynomial, coefficients from the constant term upward."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        cs = [as_fe(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def lead(self) -> FieldElement:
        return self.coeffs[-1]

    def __add__(self, other: "Poly") -> "Poly":
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (ZERO,) * (n - len(self.coeffs))
        b = other.coeffs + (ZERO,) * (n - len(other.coeffs))
        return Poly(x + y for x, y in zip(a, b))

    def __neg__(self) -> "Poly":
        return Poly(-c for c in self.coeffs)

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return Poly(c * as_fe(other) for c in self.coeffs)
        if self.is_zero() or other.is_zero():
            return Poly([])
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(out)

    __rmul__ = __mul__

    def divmod(self, other: "Poly") -> tuple["Poly", "Poly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [ZERO] * max(len(rem) - other.degree, 0)
        inv_lead = other.lead().inv()
        while len(rem) - 1 >= other.degree and rem:
            shift = len(rem) - 1 - other.degree
            c = rem[-1] * inv_lead
            q[shift] = c
            for k, b in enumerate(other.coeffs):
                rem[shift + k] = rem[shift + k] - c * b
            rem.pop()
            while rem and rem[-1].is_zero():
                rem.pop()
        return Poly(q), Poly(rem)

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return self * self.lead().inv()

    def derivative(self) -> "Poly":
        return Poly(c * k for k, c in enumerate(self.coeffs) if k > 0)

    def __call__(self, x) -> FieldElement:
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if c.is_zero():
                continue
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            terms.append(f"({format_fe(c)}){'*' + mono if mono else ''}")
        return "Poly(" + (" + ".join(terms) or "0") + ")"


def poly_gcd(a: Poly, b: Poly) -> Poly:
    while not b.is_zero():
        _, r = a.divmod(b)
        a, b = b, r
    return a.monic()


def from_roots(roots: Iterable) -> Poly:
    p = Poly([ONE])
    for r in roots:
        p = p * Poly([-as_fe(r), ONE])
    return p


def char_poly(m: Mat3) -> Poly:
    """det(t I - M) by cofactor expansion over the polynomial ring."""
    t = Poly([ZERO, ONE])
    e = [[(t if i == j else Poly([])) - Poly([m[i, j]]) for j in range(3)] for i in range(3)]
    return (
        e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1])
        - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
        + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0])
    )


def min_poly(m: Mat3) -> Poly:
    """First linear dependency among I, M, M^2, M^3."""
    powers = [Mat3.identity()]
    for k in range(1, 4):
        powers.append(powers[-1] * m)
        rows = [p.flat() for p in powers]
        # solve sum c_j M^j = 0 with c_k = 1
        cols = list(zip(*rows))  # 9 equations in k+1 unknowns
        ker = nullspace([list(c) for c in cols], k + 1)
        if ker:
            v = next(x for x in ker)
            # the kernel is one-dimensional at the first dependency
            return Poly(v).monic()
    raise AssertionError("Cayley-Hamilton guarantees degree <= 3")


def is_squarefree(p: Poly) -> bool:
    return poly_gcd(p, p.derivative()).degree == 0


__all__ = [
    "Mat3", "Subspace", "Poly", "Singular", "DimensionMismatch", "mat_mul", "mat_det",
    "mat_inv", "rref", "in_span", "nullspace", "char_poly", "min_poly", "poly_gcd",
    "from_roots", "is_squarefree", "commutator", "conjugate_by", "format_mat",
]
