"""Galois cohomology for Gal(C/R) acting through one of three conjugations.

sl3r:  sigma(g) = conj(g)                 sigma(x) = conj(x)
su3:   sigma(g) = conj(g)^-T              sigma(x) = -conj(x)^T
su21:  sigma(g) = N conj(g)^-T N^-1       sigma(x) = -N conj(x)^T N^-1,  N = diag(1, 1, -1)

A cocycle is g with g sigma(g) = 1; g ~ h^-1 g sigma(h).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .exactfield import I, ONE, ZERO, FieldElement, as_fe, fe_real_sign
from .linalg3 import Mat3, mat_inv, nullspace
from .liecore import Subalgebra, chev_coords, span_of, transport as _transport


class NotInGroup(ValueError):
    pass


class NotAGroup(ValueError):
    pass


class BadLift(ValueError):
    pass


class UnknownPattern(ValueError):
    pass


_N = Mat3.diag(1, 1, -1)


@dataclass(frozen=True)
class Conjugation:
    kind: str  # sl3r | su3 | su21

    def __post_init__(self):
        if self.kind not in ("sl3r", "su3", "su21"):
            raise ValueError(f"unknown conjugation {self.kind!r}")

    @property
    def N(self) -> Mat3:
        return _N if self.kind == "su21" else Mat3.identity()

    def group(self, g: Mat3) -> Mat3:
        if self.kind == "sl3r":
            return g.conj()
        gi = mat_inv(g.conj()).transpose()
        if self.kind == "su3":
            return gi
        return _N * gi * _N

    def algebra(self, x: Mat3) -> Mat3:
        if self.kind == "sl3r":
            return x.conj()
        y = -(x.conj().transpose())
        if self.kind == "su3":
            return y
        return _N * y * _N


SL3R = Conjugation("sl3r")
SU3 = Conjugation("su3")
SU21 = Conjugation("su21")
CONJUGATIONS = {"sl3r": SL3R, "su3": SU3, "su21": SU21}


def sigma_apply(c: Conjugation, x: Mat3, level: str = "group") -> Mat3:
    if level == "group":
        if x.det() != ONE:
            raise NotInGroup("group-level conjugation needs det 1")
        return c.group(x)
    if level == "algebra":
        return c.algebra(x)
    raise ValueError(f"unknown level {level!r}")


def _require_sl3(*gs: Mat3) -> None:
    for g in gs:
        if g.det() != ONE:
            raise NotInGroup(f"determinant {g.det()}, not an element of SL3(C)")


def is_cocycle(c: Conjugation, g: Mat3) -> bool:
    _require_sl3(g)
    return g * c.group(g) == Mat3.identity()


def verify_twist(c: Conjugation, g1: Mat3, g0: Mat3) -> bool:
    """g1^-1 sigma(g1) = g0, so g0 is a trivial class split by g1."""
    _require_sl3(g1, g0)
    return mat_inv(g1) * c.group(g1) == g0


def verify_equivalence(c: Conjugation, h: Mat3, z1: Mat3, z2: Mat3) -> bool:
    """h^-1 z1 sigma(h) = z2."""
    return h.det() == ONE and mat_inv(h) * z1 * c.group(h) == z2


def in_fixed_group(c: Conjugation, g: Mat3) -> bool:
    return g.det() == ONE and c.group(g) == g


def transport(g: Mat3, u: Subalgebra) -> Subalgebra:
    _require_sl3(g)
    return _transport(g, u)


def sigma_subalgebra(c: Conjugation, u: Subalgebra) -> Subalgebra:
    mats = [c.algebra(m) for m in u.basis()]
    return Subalgebra(span_of(mats), u.frame_hint, u.label)


def is_sigma_stable(c: Conjugation, u: Subalgebra) -> bool:
    return all(u.contains(c.algebra(m)) for m in u.basis())


def fixed_real_basis(c: Conjugation, u: Subalgebra) -> tuple[Mat3, ...]:
    """A basis of the sigma-fixed real subspace of a sigma-stable span.

    Writes x = sum (a_j + i b_j) v_j with a, b in the real subfield and
    solves sigma(x) = x, splitting every coordinate into real and imaginary
    parts."""
    vs = u.basis()
    k = len(vs)
    P = [(c.algebra(v) - v).flat() for v in vs]
    Q = [(c.algebra(v) + v).scale(-I).flat() for v in vs]
    rows = []
    for m in range(9):
        coeff = [P[j][m] for j in range(k)] + [Q[j][m] for j in range(k)]
        rows.append([x.real_part() for x in coeff])
        rows.append([x.imag_part() for x in coeff])
    ker = nullspace(rows, 2 * k)
    out = []
    for sol in ker:
        m = Mat3.zero()
        for j in range(k):
            coef = sol[j] + sol[k + j] * I
            if not coef.is_zero():
                m = m + vs[j].scale(coef)
        out.append(m)
    return tuple(out)


def real_form_of(c: Conjugation, u: Subalgebra, label: str = "") -> Subalgebra:
    rb = fixed_real_basis(c, u)
    return Subalgebra(u.span, u.frame_hint, label or u.label, rb)


# -- finite groups ------------------------------------------------------

@dataclass
class FiniteGroupData:
    """Explicit matrices forming a group, optionally modulo a normal
    subgroup given by a membership test (e.g. the identity component)."""

    elements: tuple[Mat3, ...]
    conj: Conjugation
    modulo: Callable[[Mat3], bool] | None = None
    sigma_images: tuple[int, ...] = field(init=False)
    table: tuple[tuple[int, ...], ...] = field(init=False)
    identity: int = field(init=False)

    def __post_init__(self):
        self.elements = tuple(self.elements)
        self._inv = [mat_inv(g) for g in self.elements]
        self.identity = self.index(Mat3.identity())
        self.table = tuple(tuple(self.index(a * b) for b in self.elements) for a in self.elements)
        self.sigma_images = tuple(self.index(self.conj.group(g)) for g in self.elements)

    def same(self, k: int, g: Mat3) -> bool:
        if self.modulo is None:
            return self.elements[k] == g
        return self.modulo(self._inv[k] * g)

    def index(self, g: Mat3) -> int:
        for k in range(len(self.elements)):
            if self.same(k, g):
                return k
        raise NotAGroup("set is not closed under product or sigma")

    def inverse(self, k: int) -> int:
        return self.index(self._inv[k])

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class H1Classes:
    representatives: tuple[Mat3, ...]
    trusted: tuple[bool, ...] = ()
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.trusted:
            object.__setattr__(self, "trusted", (False,) * len(self.representatives))

    def __len__(self) -> int:
        return len(self.representatives)


def h1_finite(c: Conjugation, F: FiniteGroupData) -> H1Classes:
    """Brute force: cocycles of F up to h^-1 z sigma(h), h ranging over F."""
    n = len(F)
    s = F.sigma_images
    t = F.table
    cocycles = [z for z in range(n) if t[z][s[z]] == F.identity]
    seen: set[int] = set()
    reps = []
    for z in cocycles:
        if z in seen:
            continue
        orbit = {t[t[F.inverse(h)][z]][s[h]] for h in range(n)}
        seen |= orbit
        reps.append(z)
    return H1Classes(tuple(F.elements[z] for z in reps))


def cocycle_classes(c: Conjugation, F: FiniteGroupData) -> list[set[int]]:
    """Cohomology classes of F as sets of element indices."""
    n = len(F)
    s, t = F.sigma_images, F.table
    classes: list[set[int]] = []
    seen: set[int] = set()
    for z in range(n):
        if t[z][s[z]] != F.identity or z in seen:
            continue
        orbit = {t[t[F.inverse(h)][z]][s[h]] for h in range(n)}
        seen |= orbit
        classes.append(orbit)
    return classes


# -- tori -----------------------------------------------------------------

PATTERNS = ("conjugate", "conjugate_inverse", "swap_conjugate", "swap_conjugate_inverse")


@dataclass(frozen=True)
class TorusDescriptor:
    """A diagonal torus chi(s[, t]) with the sigma-action pattern on its
    chart coordinates.  For dim 2 the non-swap patterns act coordinatewise."""

    dim: int
    sigma_pattern: str
    chart: Callable[..., Mat3]
    coords: Callable[[Mat3], tuple[FieldElement, ...]]

    def __post_init__(self):
        if self.dim not in (1, 2) or self.sigma_pattern not in PATTERNS:
            raise UnknownPattern(f"{self.dim}/{self.sigma_pattern}")
        if self.dim == 1 and self.sigma_pattern.startswith("swap"):
            raise UnknownPattern("swap patterns need a 2-dimensional torus")

    def image(self, xs: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
        p = self.sigma_pattern
        if p == "conjugate":
            return tuple(x.conj() for x in xs)
        if p == "conjugate_inverse":
            return tuple(x.conj().inv() for x in xs)
        s, t = xs
        if p == "swap_conjugate":
            return (t.conj(), s.conj())
        return (t.conj().inv(), s.conj().inv())

    def classify(self, m: Mat3) -> tuple[int, ...]:
        if self.sigma_pattern != "conjugate_inverse":
            return ()
        return tuple(fe_real_sign(x) for x in self.coords(m))


_PATTERN_SAMPLES = (
    (as_fe(2), as_fe(3)),
    (as_fe(1) + I, as_fe(-1) / 3 + I * 2),
    (as_fe(5) / 7 - I / 2, as_fe(-4) + I * 3),
)


def check_pattern(action: Callable[[Mat3], Mat3], t: TorusDescriptor) -> bool:
    for xs in _PATTERN_SAMPLES:
        xs = xs[: t.dim]
        if action(t.chart(*xs)) != t.chart(*t.image(xs)):
            return False
    return True


def h1_torus(t: TorusDescriptor) -> H1Classes:
    """Closed-form rules: coordinatewise conjugation or a swap gives the
    trivial set; conjugate-inverse gives one sign per coordinate."""
    one = as_fe(1)
    if t.sigma_pattern != "conjugate_inverse":
        return H1Classes((t.chart(*([one] * t.dim)),))
    if t.dim == 1:
        return H1Classes((t.chart(one), t.chart(-one)))
    return H1Classes(tuple(t.chart(a, b) for a in (one, -one) for b in (one, -one)))


def h1_assemble(
    c: Conjugation,
    torus: TorusDescriptor,
    C: FiniteGroupData,
    lifts: Mapping[int, tuple[Mat3, TorusDescriptor]],
) -> H1Classes:
    """H^1 of Z = Z0 . C with Z0 a torus, fiber by fiber over H^1(C).

    For each class [c] of H^1(C) a cocycle lift z is twisted in:
    tau(g) = z sigma(g) z^-1; the fiber is H^1(Z0, tau) modulo the
    action [h] -> [u^-1 h tau(u)] of the tau-fixed components."""
    if not check_pattern(c.group, torus):
        raise UnknownPattern("torus chart does not match its sigma pattern")
    reps: list[Mat3] = []
    notes: list[str] = []
    for cls in cocycle_classes(c, C):
        if C.identity in cls:
            r = C.identity
            z, tor = Mat3.identity(), torus
        else:
            keyed = sorted(k for k in lifts if k in cls)
            if not keyed:
                raise BadLift(f"no lift for the class of component {min(cls)}")
            r = keyed[0]
            z, tor = lifts[r]
            if not is_cocycle(c, z) or not C.same(r, z):
                raise BadLift(f"lift for component {r} is not a cocycle over it")
        zi = mat_inv(z)

        def tau(g, z=z, zi=zi):
            return z * c.group(g) * zi

        if not check_pattern(tau, tor):
            raise UnknownPattern(f"twisted torus pattern wrong for component {r}")
        fiber = h1_torus(tor).representatives
        fixed = [k for k in range(len(C)) if C.same(k, tau(C.elements[k]))]
        keys = [tor.classify(h) for h in fiber]
        parent = list(range(len(fiber)))

        def find(a):
            while parent[a] != a:
                a = parent[a]
            return a

        for k in fixed:
            uh = C.elements[k]
            uhi = mat_inv(uh)
            for a, h in enumerate(fiber):
                moved = uhi * h * tau(uh)
                if C.modulo is not None and not C.modulo(moved):
                    raise BadLift("component action leaves the torus")
                b = keys.index(tor.classify(moved))
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
        orbit_reps = sorted({find(a) for a in range(len(fiber))})
        notes.append(f"component {r}: {len(fiber)} torus classes, {len(orbit_reps)} orbits")
        for a in orbit_reps:
            reps.append(fiber[a] * z)
    for m in reps:
        if not is_cocycle(c, m):
            raise AssertionError("assembled representative is not a cocycle")
    return H1Classes(tuple(reps), notes=tuple(notes))


def is_diagonal(m: Mat3) -> bool:
    return m.is_diagonal()


def diag_coords2(m: Mat3) -> tuple[FieldElement, FieldElement]:
    return m[0, 0], m[1, 1]


__all__ = [
    "Conjugation", "SL3R", "SU3", "SU21", "CONJUGATIONS", "FiniteGroupData", "TorusDescriptor",
    "H1Classes", "sigma_apply", "is_cocycle", "verify_twist", "verify_equivalence",
    "in_fixed_group", "transport", "sigma_subalgebra", "is_sigma_stable", "fixed_real_basis",
    "real_form_of", "h1_finite", "h1_torus", "h1_assemble", "check_pattern", "NotInGroup",
    "NotAGroup", "BadLift", "UnknownPattern", "ZERO", "cocycle_classes", "is_diagonal",
    "diag_coords2",
]
