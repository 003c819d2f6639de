"""The claim engine: registry records become executable claims, claims become
verdicts, verdicts become a deterministic report.

Every claim is a pure function of the registry and of a per-claim random
generator seeded from (seed, claim id), so results do not depend on the
order in which claims are evaluated.
"""
from __future__ import annotations

import fnmatch
import hashlib
import itertools
import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Sequence

from .exactfield import I, FieldElement, ZeroInverse, as_fe, format_fe
from .expr import ExprError, eval_matrix, eval_scalar
from .galois import (
    CONJUGATIONS, BadLift, FiniteGroupData, NotAGroup, NotInGroup, TorusDescriptor,
    UnknownPattern, cocycle_classes, diag_coords2, h1_assemble, in_fixed_group, is_cocycle,
    is_diagonal, is_sigma_stable, sigma_subalgebra, verify_equivalence, verify_twist,
)
from .linalg3 import Mat3, char_poly, from_roots
from .liecore import (
    FRAME_NAMES, Subalgebra, frame_symbols, is_closed, normalizer, projective_invariant,
    structure_profile, su3_candidate, transport,
)
from .registry import (
    FORMS, ConstraintViolation, DomainViolation, ExcludedParameter, Record, Ref, Registry,
    StabilizerFamily, TableEntry, Witness, complete_sample, instantiate, load_registry,
    parse_bindings, split_list, stabilizer_sample,
)

STATUSES = ("VERIFIED", "VERIFIED_SAMPLED", "TRUSTED", "FAILED")
CLAIM_KINDS = (
    "closure", "realness", "dimension", "cocycle", "twist", "transport_span",
    "stabilizer_membership", "normalizer_dim", "h1_count", "dashed_conjugacy",
    "param_equivalence", "invariant_separation", "char_spectrum", "su3_filter",
    "trusted_import", "descent", "real_conjugator", "identity", "equivalence",
    "correspondence", "erratum", "row_count", "coverage", "structure_class",
)
SUITES = FORMS + ("all",)

_SYMBOLS = frame_symbols()
# sampling can land on an excluded or singular point; such draws are retried
_RETRY = (ZeroDivisionError, ZeroInverse, ExcludedParameter, DomainViolation, ConstraintViolation)


class MissingWitness(LookupError):
    pass


class SamplingError(RuntimeError):
    pass


# -- claims and results -------------------------------------------------

@dataclass(frozen=True)
class Context:
    samples: int
    rng: random.Random = field(compare=False)

    def points(self, make: Callable[[random.Random], object], n: int | None = None,
               key: Callable[[object], object] = repr) -> list:
        """n distinct admissible sample points; make() draws one or raises a
        retryable error."""
        want = self.samples if n is None else n
        out: list = []
        seen: set = set()
        tries = 0
        while len(out) < want:
            tries += 1
            if tries > 40 * want:
                raise SamplingError(f"only {len(out)} admissible sample points after {tries - 1} draws")
            try:
                p = make(self.rng)
            except _RETRY:
                continue
            k = key(p)
            if k not in seen:
                seen.add(k)
                out.append(p)
        return out


Check = Callable[[Context], tuple[str, str]]


@dataclass(frozen=True)
class Claim:
    id: str
    kind: str
    form: str
    inputs: tuple[str, ...]
    cite: str
    check: Check = field(compare=False, repr=False)


@dataclass(frozen=True)
class ClaimResult:
    claim_id: str
    status: str
    detail: str
    cite: str = ""
    elapsed: float = field(default=0.0, compare=False)

    def as_dict(self) -> dict:
        return {"id": self.claim_id, "status": self.status, "detail": self.detail, "cite": self.cite}


@dataclass(frozen=True)
class Report:
    suite: str
    fingerprint: str
    results: tuple[ClaimResult, ...]

    @property
    def summary(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for r in self.results:
            counts[r.status] = counts.get(r.status, 0) + 1
        return {s: counts[s] for s in STATUSES if s in counts}

    @property
    def failed(self) -> list[ClaimResult]:
        return [r for r in self.results if r.status == "FAILED"]

    def result(self, claim_id: str) -> ClaimResult:
        for r in self.results:
            if r.claim_id == claim_id:
                return r
        raise KeyError(claim_id)


def claim_rng(seed: int, claim_id: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{claim_id}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _verdict(ok: bool, sampled: bool, good: str, bad: str) -> tuple[str, str]:
    if not ok:
        return "FAILED", bad
    return ("VERIFIED_SAMPLED" if sampled else "VERIFIED"), good


# -- sampling -----------------------------------------------------------

def draw(rng: random.Random, domain: str) -> FieldElement:
    """A random nonzero rational (or Gaussian rational) in a named domain."""
    if domain == "unit":
        m = rng.randint(2, 12)
        return as_fe(Fraction(rng.randint(1, m - 1), m))
    if domain == "positive":
        return as_fe(Fraction(rng.randint(1, 12), rng.randint(1, 7)))
    x = as_fe(Fraction(rng.choice((-1, 1)) * rng.randint(1, 12), rng.randint(1, 7)))
    if domain == "real":
        return x
    if domain in ("complex", "nonreal"):
        y = as_fe(Fraction(rng.choice((-1, 1)) * rng.randint(1, 12), rng.randint(1, 7)))
        return x + y * I
    raise ValueError(f"unknown sample domain {domain!r}")


def fmt_env(env: Mapping[str, FieldElement]) -> str:
    return ",".join(f"{k}={format_fe(v)}" for k, v in sorted(env.items()))


def _points_text(envs: Sequence[Mapping[str, FieldElement]]) -> str:
    if not envs or not envs[0]:
        return ""
    n = len(envs)
    return f" at {n} sample{'s' if n != 1 else ''} (" + "; ".join(fmt_env(e) for e in envs) + ")"


def _parse_sample(spec: str | None) -> tuple[str, str] | None:
    if not spec:
        return None
    name, dom = spec.split(":")
    return name, dom


def _sample_envs(ctx: Context, spec: str | None, validate: Callable[[dict], object]) -> list[dict]:
    """Environments {var: value} for a 'var:domain' spec; one empty env without."""
    s = _parse_sample(spec)
    if s is None:
        validate({})
        return [{}]
    name, dom = s

    def make(rng):
        env = {name: draw(rng, dom)}
        validate(env)
        return env

    return ctx.points(make)


def entry_points(ctx: Context, e: TableEntry, fixed: Mapping[str, FieldElement] | None = None,
                 domains: Mapping[str, str] | None = None,
                 validate: Callable[[dict], object] | None = None) -> list[dict]:
    """Admissible parameter values for an entry; [{}] when it has none."""
    fixed = dict(fixed or {})
    free = [n for n in e.params.names if n not in fixed]
    if not free:
        vals = e.params.check(fixed)
        if validate:
            validate(vals)
        return [vals]
    doms = dict(zip(e.params.names, e.params.domains))
    doms.update(domains or {})

    def make(rng):
        vals = dict(fixed)
        vals.update({n: draw(rng, doms[n]) for n in free})
        vals = e.params.check(vals)
        if validate:
            validate(vals)
        return vals

    return ctx.points(make)


def _inst(reg: Registry, ref: str | Ref, env: Mapping[str, FieldElement]) -> Subalgebra:
    r = Ref.parse(ref) if isinstance(ref, str) else ref
    return instantiate(reg.entry(r.entry), r.values(env))


def _span(exprs: Iterable[str], env: Mapping[str, object], real: bool = True) -> Subalgebra:
    full: dict[str, object] = dict(_SYMBOLS)
    full.update(env)
    return Subalgebra.from_matrices([eval_matrix(x, full) for x in exprs], real=real)


def _ref_entries(*refs: str | None) -> tuple[str, ...]:
    return tuple(Ref.parse(r).entry for r in refs if r)


# -- invariants -----------------------------------------------------------

_REAL_KEYS = ("killing_signature", "ambient_signature")


def invariants(u: Subalgebra, level: str = "real") -> dict:
    """Structure profile plus, for a line, the projective invariant."""
    d = structure_profile(u).as_dict()
    if level == "complex":
        for k in _REAL_KEYS:
            d.pop(k)
    if u.dim == 1:
        pi = projective_invariant(u).as_dict()
        if level == "complex":
            pi.pop("p_sign")
        d["projective"] = pi
    return d


def _diff(a: dict, b: dict) -> str:
    keys = [k for k in a if a.get(k) != b.get(k)]
    return "; ".join(f"{k}: {json.dumps(a.get(k))} vs {json.dumps(b.get(k))}" for k in keys)


# -- entry claims -------------------------------------------------------

def _check_entry_closure(reg: Registry, e: TableEntry, ctx: Context):
    pts = entry_points(ctx, e)
    for vals in pts:
        if not is_closed(instantiate(e, vals)):
            return "FAILED", f"span is not closed under the bracket at {fmt_env(vals)}"
    return _verdict(True, bool(pts[0]), "closed" + _points_text(pts), "")


def _check_entry_dimension(reg: Registry, e: TableEntry, ctx: Context):
    pts = entry_points(ctx, e)
    for vals in pts:
        d = instantiate(e, vals).dim
        if d != e.dim:
            return "FAILED", f"dimension {d}, expected {e.dim}, at {fmt_env(vals)}"
    return _verdict(True, bool(pts[0]), f"dimension {e.dim}" + _points_text(pts), "")


def _check_entry_realness(reg: Registry, e: TableEntry, ctx: Context):
    c = CONJUGATIONS[e.form]
    pts = entry_points(ctx, e)
    for vals in pts:
        if not is_sigma_stable(c, instantiate(e, vals)):
            return "FAILED", f"basis not fixed by the {e.form} conjugation at {fmt_env(vals)}"
    return _verdict(True, bool(pts[0]), f"sigma-stable for {e.form}" + _points_text(pts), "")


def _structure_class(p) -> str:
    if p.is_solvable:
        return "solvable"
    return "semisimple" if p.is_semisimple else "levi"


def _check_entry_structure(reg: Registry, e: TableEntry, ctx: Context):
    # semisimple means a nondegenerate Killing form of u itself (Cartan's criterion)
    pts = entry_points(ctx, e)
    for vals in pts:
        got = _structure_class(structure_profile(instantiate(e, vals)))
        if got != e.structural_class:
            return "FAILED", f"{got}, listed as {e.structural_class}, at {fmt_env(vals)}"
    text = f"{e.structural_class} (semisimple = nondegenerate Killing form of u, Cartan's criterion)"
    return _verdict(True, bool(pts[0]), text + _points_text(pts), "")


def _check_entry_transport(reg: Registry, e: TableEntry, ctx: Context):
    src = reg.entry(e.source.entry)
    g = reg.eval_matrix(e.via)

    def source_ok(vals):
        src.params.check(e.source.values(vals))

    pts = entry_points(ctx, e, validate=source_ok)
    for vals in pts:
        moved = transport(g, instantiate(src, e.source.values(vals)))
        if not moved.same_span(instantiate(e, vals)):
            return "FAILED", f"{e.via} . {e.source} differs from {e.id} at {fmt_env(vals)}"
    return _verdict(True, bool(pts[0]), f"{e.via} . {e.source} spans {e.id}" + _points_text(pts), "")


def _entry_claims(reg: Registry, e: TableEntry) -> list[Claim]:
    base = (e.id,)
    cite = e.cite
    out = [
        Claim(f"{e.id}:closure", "closure", e.form, base, cite, lambda ctx, e=e: _check_entry_closure(reg, e, ctx)),
        Claim(f"{e.id}:dimension", "dimension", e.form, base, cite, lambda ctx, e=e: _check_entry_dimension(reg, e, ctx)),
    ]
    out.append(Claim(f"{e.id}:structure", "structure_class", e.form, base, cite,
                     lambda ctx, e=e: _check_entry_structure(reg, e, ctx)))
    if e.form != "complex":
        out.append(Claim(f"{e.id}:realness", "realness", e.form, base, cite,
                         lambda ctx, e=e: _check_entry_realness(reg, e, ctx)))
    if e.source is not None:
        inputs = base + (e.source.entry,) + tuple(sorted(_matrix_names(reg, e.via)))
        out.append(Claim(f"{e.id}:transport", "transport_span", e.form, inputs, cite,
                         lambda ctx, e=e: _check_entry_transport(reg, e, ctx)))
    return out


def _matrix_names(reg: Registry, expr: str | None) -> set[str]:
    from .expr import free_names

    if not expr:
        return set()
    return free_names(expr) & set(reg.matrices)


# -- stabilizer claims --------------------------------------------------

def _stab_entry_points(reg: Registry, s: StabilizerFamily, ctx: Context) -> list[dict]:
    e = reg.entry(s.entry_id)
    fixed = {k: eval_scalar(v, {}) for k, v in s.at if v != "*"}

    def avoid(vals):
        for a in s.avoid:
            if eval_scalar(a, vals).is_zero():
                raise ExcludedParameter(f"{a} vanishes")

    return entry_points(ctx, e, fixed=fixed, validate=avoid)


def _check_stab_membership(reg: Registry, s: StabilizerFamily, ctx: Context):
    e = reg.entry(s.entry_id)
    pts = _stab_entry_points(reg, s, ctx)
    shown = []
    for k in range(ctx.samples):
        vals = pts[k % len(pts)]
        u = instantiate(e, vals)

        def make(rng):
            fv = complete_sample(s, {n: draw(rng, "complex") for n in s.free})
            return fv, stabilizer_sample(s, fv)

        fv, g = ctx.points(make, 1, key=lambda p: fmt_env(p[0]))[0]
        if not transport(g, u).same_span(u):
            return "FAILED", (f"family member at {fmt_env({n: fv[n] for n in s.free})} moves "
                              f"{e.id}" + (f" at {fmt_env(vals)}" if vals else ""))
        shown.append(fmt_env({n: fv[n] for n in s.free}))
    return "VERIFIED_SAMPLED", f"{ctx.samples} family members stabilize {e.id} ({'; '.join(shown)})"


def _check_stab_normalizer(reg: Registry, s: StabilizerFamily, ctx: Context):
    e = reg.entry(s.entry_id)
    pts = _stab_entry_points(reg, s, ctx)
    for vals in pts:
        nd = normalizer(instantiate(e, vals)).dim
        if nd != s.param_dim:
            return "FAILED", f"normalizer dimension {nd} but the family has {s.param_dim} parameters" + (
                f" at {fmt_env(vals)}" if vals else "")
    return _verdict(True, bool(pts[0]),
                    f"normalizer dimension {s.param_dim} equals the family's parameter count" + _points_text(pts), "")


def _stab_claims(reg: Registry, s: StabilizerFamily) -> list[Claim]:
    inputs = (s.entry_id, f"STAB:{s.id}")
    return [
        Claim(f"{s.id}:membership", "stabilizer_membership", "complex", inputs, s.cite,
              lambda ctx, s=s: _check_stab_membership(reg, s, ctx)),
        Claim(f"{s.id}:normalizer-dim", "normalizer_dim", "complex", inputs, s.cite,
              lambda ctx, s=s: _check_stab_normalizer(reg, s, ctx)),
    ]


# -- witness claims -----------------------------------------------------

def _wmat(reg: Registry, w: Witness, role: str) -> Mat3:
    for k, v in w.matrices:
        if k == role:
            return reg.eval_matrix(v)
    raise MissingWitness(f"{w.id} has no {role} matrix")


def _wexpr(w: Witness, role: str) -> str:
    for k, v in w.matrices:
        if k == role:
            return v
    raise MissingWitness(f"{w.id} has no {role} matrix")


def _check_witness(reg: Registry, w: Witness, ctx: Context):
    kind = w.kind
    conj = CONJUGATIONS.get(w.get("conj", ""))
    if kind == "cocycle":
        ok = is_cocycle(conj, _wmat(reg, w, "g0"))
        return _verdict(ok, False, f"{_wexpr(w, 'g0')} sigma({_wexpr(w, 'g0')}) = 1",
                        f"{_wexpr(w, 'g0')} is not a cocycle for {conj.kind}")
    if kind == "twist":
        ok = verify_twist(conj, _wmat(reg, w, "g1"), _wmat(reg, w, "g0"))
        g1, g0 = _wexpr(w, "g1"), _wexpr(w, "g0")
        return _verdict(ok, False, f"{g1}^-1 sigma({g1}) = {g0}", f"{g1}^-1 sigma({g1}) != {g0}")
    if kind == "identity":
        ok = _wmat(reg, w, "lhs") == _wmat(reg, w, "rhs")
        return _verdict(ok, False, f"{_wexpr(w, 'lhs')} = {_wexpr(w, 'rhs')}",
                        f"{_wexpr(w, 'lhs')} != {_wexpr(w, 'rhs')}")
    if kind == "equivalence":
        h, z1, z2 = (_wexpr(w, r) for r in ("h", "z1", "z2"))
        ok = verify_equivalence(conj, _wmat(reg, w, "h"), _wmat(reg, w, "z1"), _wmat(reg, w, "z2"))
        return _verdict(ok, False, f"{h}^-1 {z1} sigma({h}) = {z2}", f"{h}^-1 {z1} sigma({h}) != {z2}")
    if kind == "descent":
        g0 = _wmat(reg, w, "g0")
        src = w.get("source")
        envs = _sample_envs(ctx, w.get("sample"), lambda env: _inst(reg, src, env))
        for env in envs:
            u = _inst(reg, src, env)
            if not transport(g0, sigma_subalgebra(conj, u)).same_span(u):
                return "FAILED", f"{_wexpr(w, 'g0')} sigma(u) != u for u = {src}" + (
                    f" at {fmt_env(env)}" if env else "")
        return _verdict(True, bool(envs[0]), f"{_wexpr(w, 'g0')} sigma(u) = u for u = {src}" + _points_text(envs), "")
    if kind in ("real_conjugator", "transport"):
        g = _wmat(reg, w, "g")
        src, tgt = w.get("source"), w.get("target")
        if kind == "real_conjugator" and not (in_fixed_group(conj, g) or in_fixed_group(conj, -g)):
            return "FAILED", f"{_wexpr(w, 'g')} is not in the real group of {conj.kind}"

        def valid(env):
            _inst(reg, src, env), _inst(reg, tgt, env)

        envs = _sample_envs(ctx, w.get("sample"), valid)
        for env in envs:
            if not transport(g, _inst(reg, src, env)).same_span(_inst(reg, tgt, env)):
                return "FAILED", f"{_wexpr(w, 'g')} . {src} != {tgt}" + (f" at {fmt_env(env)}" if env else "")
        return _verdict(True, bool(envs[0]), f"{_wexpr(w, 'g')} . {src} = {tgt}" + _points_text(envs), "")
    raise MissingWitness(f"unknown witness kind {kind}")


def _witness_form(reg: Registry, w: Witness) -> str:
    return reg.entry(w.entry).form


def _witness_claims(reg: Registry, w: Witness) -> list[Claim]:
    entries = (w.entry,) + _ref_entries(w.get("source"), w.get("target"))
    mats = set()
    for _, v in w.matrices:
        mats |= _matrix_names(reg, v)
    inputs = (w.id,) + entries + tuple(sorted(mats))
    return [Claim(w.id, w.kind, _witness_form(reg, w), inputs, w.cite,
                  lambda ctx, w=w: _check_witness(reg, w, ctx))]


# -- dashed pairs -------------------------------------------------------

def _dashed_witness(r: Record) -> Witness:
    a, b = r.head
    fields = tuple((k, v) for k, v in r.fields if k not in ("g", "cite"))
    g = r.get("g")
    mats = (("g", g),) if g else ()
    return Witness(f"dashed:{a}/{b}", a, "transport", mats, (("target", b),) + fields, r.require("cite"))


def _dashed_points(reg: Registry, a: TableEntry, b: TableEntry, w: Witness, ctx: Context):
    fixed = {k: eval_scalar(v, {}) for k, v in parse_bindings(w.get("at_a", ""))}

    def b_vals(vals):
        out = {n: vals[n] for n in b.params.names if n in vals}
        return b.params.check(out)

    if set(b.params.names) - set(a.params.names):
        raise MissingWitness(f"{b.id} has parameters that {a.id} does not share")
    pts = entry_points(ctx, a, fixed=fixed, validate=b_vals)
    return [(va, b_vals(va)) for va in pts]


def check_dashed_pair(a: TableEntry, b: TableEntry, w: Witness | None,
                      reg: Registry | None = None, samples: int = 5, seed: int = 0) -> ClaimResult:
    """Complex conjugacy of a dashed pair via the stored g, plus real
    separation by invariants where one exists (else TRUSTED)."""
    reg = reg or load_registry()
    if w is None or not any(k == "g" for k, _ in w.matrices):
        raise MissingWitness(f"no complex conjugator stored for {a.id} / {b.id}")
    if a.dashed_partner != b.id and b.dashed_partner != a.id:
        raise ValueError(f"{a.id} and {b.id} are not a dashed pair")
    cid = f"dashed:{a.id}/{b.id}"
    t0 = time.perf_counter()
    ctx = Context(samples, claim_rng(seed, cid))
    status, detail = _guard(lambda: _dashed_verdict(reg, a, b, w, ctx))
    return ClaimResult(cid, status, detail, w.cite, time.perf_counter() - t0)


def _dashed_verdict(reg: Registry, a: TableEntry, b: TableEntry, w: Witness, ctx: Context):
    g = _wmat(reg, w, "g")
    gname = _wexpr(w, "g")
    pts = _dashed_points(reg, a, b, w, ctx)
    sampled = bool(pts[0][0]) and not w.get("at_a")
    for va, vb in pts:
        if not transport(g, instantiate(a, va)).same_span(instantiate(b, vb)):
            return "FAILED", f"{gname} . {a.id} != {b.id}" + (f" at {fmt_env(va)}" if va else "")
    head = f"{gname} . {a.id} = {b.id}" + _points_text([p[0] for p in pts])
    mode = w.get("separate", "trusted")
    if mode == "trusted":
        return "TRUSTED", head + "; real non-conjugacy is imported from the cohomology argument"
    for va, vb in pts:
        ia, ib = invariants(instantiate(a, va)), invariants(instantiate(b, vb))
        if ia == ib:
            return "FAILED", head + "; but the real invariants do not separate the pair"
    ia, ib = invariants(instantiate(a, pts[0][0])), invariants(instantiate(b, pts[0][1]))
    return _verdict(True, sampled, head + "; separated over R by " + _diff(ia, ib), "")


def _check_separation(reg: Registry, a: TableEntry, b: TableEntry, w: Witness, ctx: Context):
    pts = _dashed_points(reg, a, b, w, ctx)
    sampled = bool(pts[0][0]) and not w.get("at_a")
    parts = []
    for va, vb in pts:
        ua, ub = instantiate(a, va), instantiate(b, vb)
        ra, rb = invariants(ua), invariants(ub)
        ca, cb = invariants(ua, "complex"), invariants(ub, "complex")
        if ra == rb:
            return "FAILED", f"real invariants of {a.id} and {b.id} agree" + (f" at {fmt_env(va)}" if va else "")
        if ca != cb:
            return "FAILED", f"complex invariants differ: {_diff(ca, cb)}"
        parts.append(_diff(ra, rb))
    return _verdict(True, sampled, f"real invariants differ ({parts[0]}); complex invariants agree"
                    + _points_text([p[0] for p in pts]), "")


def _dashed_claims(reg: Registry, r: Record) -> list[Claim]:
    a, b = reg.entry(r.head[0]), reg.entry(r.head[1])
    w = _dashed_witness(r)
    inputs = (a.id, b.id, f"DASHED:{a.id}/{b.id}") + tuple(sorted(_matrix_names(reg, r.get("g"))))

    def run(ctx, a=a, b=b, w=w):
        return _dashed_verdict(reg, a, b, w, ctx)

    out = [Claim(f"dashed:{a.id}/{b.id}", "dashed_conjugacy", a.form, inputs, w.cite, run)]
    if w.get("separate") == "invariant":
        out.append(Claim(f"separation:{a.id}/{b.id}", "invariant_separation", a.form, inputs, w.cite,
                         lambda ctx, a=a, b=b, w=w: _check_separation(reg, a, b, w, ctx)))
    return out


# -- parameter equivalences -----------------------------------------------

@lru_cache(maxsize=None)
def monomial_candidates(form: str) -> tuple[Mat3, ...]:
    """Signed-permutation times diagonal matrices in the fixed group of a
    form, up to scalars (GL3(R) and U conjugacy agree with SL3(R), SU)."""
    units = (1, -1) if form in ("sl3r", "complex") else (1, -1, I, -I)
    conj = CONJUGATIONS.get(form)
    out = []
    for perm in itertools.permutations(range(3)):
        for d2, d3 in itertools.product(units, repeat=2):
            d = (as_fe(1), as_fe(d2), as_fe(d3))
            rows = [[as_fe(0)] * 3 for _ in range(3)]
            for i in range(3):
                rows[i][perm[i]] = d[i]
            g = Mat3(rows)
            if conj is not None and conj.group(g) != g:
                continue
            out.append(g)
    return tuple(out)


def find_monomial_witness(form: str, u: Subalgebra, v: Subalgebra,
                          first: Mat3 | None = None) -> Mat3 | None:
    cands = monomial_candidates(form)
    if first is not None:
        cands = (first,) + cands
    for g in cands:
        if transport(g, u).same_span(v):
            return g
    return None


def _check_equiv(reg: Registry, r: Record, ctx: Context):
    src = r.require("source")
    targets = split_list(r.require("target"))
    form = reg.entry(Ref.parse(src).entry).form
    level = "complex" if form == "complex" else "real"

    def valid(env):
        _inst(reg, src, env)
        for t in targets:
            _inst(reg, t, env)

    envs = _sample_envs(ctx, r.get("sample"), valid)
    found: dict[str, Mat3 | None] = {t: None for t in targets}
    witnessed = {t: True for t in targets}
    for env in envs:
        u = _inst(reg, src, env)
        iu = invariants(u, level)
        for t in targets:
            v = _inst(reg, t, env)
            iv = invariants(v, level)
            if iu != iv:
                return "FAILED", f"{src} and {t} have different invariants at {fmt_env(env)}: {_diff(iu, iv)}"
            if witnessed[t]:
                g = find_monomial_witness(form, u, v, found[t])
                if g is None:
                    witnessed[t] = False
                found[t] = g
    n_w = sum(witnessed.values())
    how = "invariants agree" + _points_text(envs)
    if n_w == len(targets):
        how += "; monomial witness found for every target"
    elif n_w:
        how += f"; monomial witness found for {n_w} of {len(targets)} targets, invariant level for the rest"
    else:
        how += "; no monomial witness in the bounded search, invariant level only"
    return _verdict(True, True, how, "")


def _equiv_claim(reg: Registry, r: Record) -> Claim:
    src = r.require("source")
    entries = _ref_entries(src, *split_list(r.require("target")))
    form = reg.entry(entries[0]).form
    return Claim(f"equiv:{r.head[0]}", "param_equivalence", form,
                 entries + (f"EQUIV:{r.head[0]}",), r.require("cite"),
                 lambda ctx, r=r: _check_equiv(reg, r, ctx))


# -- correspondence rows --------------------------------------------------

def _win_env(r: Record, env: dict) -> dict:
    out = dict(env)
    for n, x in parse_bindings((r.get("derive") or "").replace(";", ",")):
        out[n] = eval_scalar(x, out)
    return out


def _check_win(reg: Registry, r: Record, ctx: Context):
    ref = r.get("entry")

    def other(env):
        return _inst(reg, ref, env) if ref else _span(split_list(r.require("other")), env)

    def valid(env):
        full = _win_env(r, env)
        other(full), _span(split_list(r.require("basis")), full)

    envs = _sample_envs(ctx, r.get("sample"), valid)
    label = ref or r.require("other")
    for env in envs:
        full = _win_env(r, env)
        w = _span(split_list(r.require("basis")), full)
        o = other(full)
        where = f" at {fmt_env(env)}" if env else ""
        if not is_closed(w):
            return "FAILED", f"the listed basis is not closed{where}"
        if w.dim != o.dim:
            return "FAILED", f"dimension {w.dim} vs {o.dim}{where}"
        iw, io = invariants(w), invariants(o)
        if iw != io:
            return "FAILED", f"invariants differ from {label}{where}: {_diff(iw, io)}"
    tail = "" if ref else "; invariant level only, no conjugator is stored"
    return _verdict(True, bool(envs[0]), f"structure profile and projective invariant match {label}"
                    + _points_text(envs) + tail, "")


def _win_claim(reg: Registry, r: Record) -> Claim:
    entries = _ref_entries(r.get("entry"))
    return Claim(f"win:{r.head[0]}", "correspondence", "sl3r", entries + (f"WIN:{r.head[0]}",),
                 r.require("cite"), lambda ctx, r=r: _check_win(reg, r, ctx))


# -- spectra ----------------------------------------------------------------

def _check_spec(reg: Registry, r: Record, ctx: Context):
    ref = r.require("entry")
    envs = _sample_envs(ctx, r.get("sample"), lambda env: _inst(reg, ref, env))
    for env in envs:
        u = _inst(reg, ref, env)
        full: dict[str, object] = dict(_SYMBOLS)
        full.update(env)
        m = eval_matrix(r.require("element"), full)
        if not u.contains(m):
            return "FAILED", f"the element is not in {ref} at {fmt_env(env)}"
        roots = [eval_scalar(x, env) for x in split_list(r.require("roots"))]
        if char_poly(m) != from_roots(roots):
            return "FAILED", f"characteristic polynomial differs from the listed roots at {fmt_env(env)}"
    return _verdict(True, bool(envs[0]), "eigenvalues {" + r.require("roots").replace(";", ", ") + "}"
                    + _points_text(envs), "")


def _spec_claim(reg: Registry, r: Record) -> Claim:
    entries = _ref_entries(r.require("entry"))
    return Claim(f"spectrum:{r.head[0]}", "char_spectrum", reg.entry(entries[0]).form,
                 entries + (f"SPEC:{r.head[0]}",), r.require("cite"), lambda ctx, r=r: _check_spec(reg, r, ctx))


# -- Galois cohomology counts -----------------------------------------------

def _chart(a, b):
    return Mat3.diag(a, b, (a * b).inv())


def compute_h1(reg: Registry, r: Record) -> tuple[int, list[Mat3], Callable[[Mat3], bool]]:
    """(class count, representatives, membership test for a named cocycle)."""
    c = CONJUGATIONS[r.require("conj")]
    els = [reg.eval_matrix(x) for x in split_list(r.require("group"))]
    if r.require("method") == "finite":
        F = FiniteGroupData(els, c, modulo=is_diagonal if r.get("modulo") == "diagonal" else None)
        classes = cocycle_classes(c, F)

        def has(z: Mat3) -> bool:
            k = F.index(z)
            return any(k in cls for cls in classes) and (z == Mat3.identity() or F.identity not in
                                                         next(cls for cls in classes if k in cls))

        return len(classes), [F.elements[min(cls)] for cls in classes], has
    F = FiniteGroupData(els, c, modulo=is_diagonal)
    torus = TorusDescriptor(2, r.require("torus"), _chart, diag_coords2)
    lifts = {}
    for item in split_list(r.get("lifts")):
        name, pattern = item.split(":")
        z = reg.eval_matrix(name)
        lifts[F.index(z)] = (z, TorusDescriptor(2, pattern, _chart, diag_coords2))
    res = h1_assemble(c, torus, F, lifts)
    reps = list(res.representatives)
    return len(reps), reps, lambda z: z in reps


def _check_h1(reg: Registry, r: Record, ctx: Context):
    n, reps, has = compute_h1(reg, r)
    want = int(r.require("expect"))
    if n != want:
        return "FAILED", f"{n} classes, expected {want}"
    for name in split_list(r.get("contains")):
        if not has(reg.eval_matrix(name)):
            return "FAILED", f"{n} classes, but none is the class of {name}"
    detail = f"{n} class" + ("es" if n != 1 else "")
    for name in split_list(r.get("contains")):
        detail += f"; [{name}] detected"
    if r.get("trusted"):
        detail += f"; nontriviality of [{r.get('trusted')}] in H1(SL3) is imported (TRUSTED)"
    detail += "; kernel membership in H1(SL3) is not checked here (trust:kernel-organizing)"
    return "VERIFIED", detail


def _h1_claim(reg: Registry, r: Record) -> Claim:
    names = set()
    for x in split_list(r.require("group")) + split_list(r.get("contains")):
        names |= _matrix_names(reg, x)
    return Claim(f"h1:{r.head[0]}", "h1_count", r.require("conj"),
                 (f"H1:{r.head[0]}",) + tuple(sorted(names)), r.require("cite"),
                 lambda ctx, r=r: _check_h1(reg, r, ctx))


# -- trusted imports, filters, errata, counts --------------------------------

def _trust_claim(reg: Registry, r: Record) -> Claim:
    entries = tuple(split_list(r.get("entry")))
    statement = r.require("statement")
    return Claim(f"trust:{r.head[0]}", "trusted_import", r.require("form"),
                 entries + (f"TRUST:{r.head[0]}",), r.require("cite"),
                 lambda ctx: ("TRUSTED", statement))


def _check_filter(reg: Registry, e: TableEntry, expect: bool, sample: str | None, ctx: Context):
    doms = {}
    s = _parse_sample(sample)
    if s:
        doms[s[0]] = s[1]
    pts = entry_points(ctx, e, domains=doms)
    for vals in pts:
        got = su3_candidate(instantiate(e, vals))
        if got != expect:
            return "FAILED", f"su3_candidate is {got}, expected {expect}" + (f" at {fmt_env(vals)}" if vals else "")
    return _verdict(True, bool(pts[0]), f"su3_candidate is {expect}" + _points_text(pts), "")


def _filter_claims(reg: Registry) -> list[Claim]:
    out = []
    listed = set()
    for r in reg.records_of("FILTER"):
        e = reg.entry(r.head[0])
        listed.add(e.id)
        s = _parse_sample(r.get("sample"))
        cid = f"filter:{e.id}" + (f":{s[1]}" if s else "")
        expect = r.require("expect") == "true"
        out.append(Claim(cid, "su3_filter", "su3", (e.id, f"FILTER:{cid}"), r.require("cite"),
                         lambda ctx, e=e, x=expect, sm=r.get("sample"): _check_filter(reg, e, x, sm, ctx)))
    for e in reg.entries.values():
        if e.form == "complex" and not e.aux and e.id not in listed:
            out.append(Claim(f"filter:{e.id}", "su3_filter", "su3", (e.id,),
                             "su(3) proof: only reductive subalgebras with compact real forms descend",
                             lambda ctx, e=e: _check_filter(reg, e, False, None, ctx)))
    return out


def _check_erratum(reg: Registry, r: Record, ctx: Context):
    src, tgt = r.require("source"), r.require("target")
    psrc = r.get("printed_source") or src
    g, pg = r.require("g"), r.get("printed_g") or r.require("g")

    def printed_span(env):
        if r.get("printed_basis"):
            return _span(split_list(r.get("printed_basis")), env)
        return _inst(reg, tgt, env)

    def valid(env):
        _inst(reg, src, env), _inst(reg, tgt, env), _inst(reg, psrc, env)

    envs = _sample_envs(ctx, r.get("sample"), valid)
    for env in envs:
        where = f" at {fmt_env(env)}" if env else ""
        if not transport(reg.eval_matrix(g), _inst(reg, src, env)).same_span(_inst(reg, tgt, env)):
            return "FAILED", f"the corrected statement {g} . {src} = {tgt} fails{where}"
        if transport(reg.eval_matrix(pg), _inst(reg, psrc, env)).same_span(printed_span(env)):
            return "FAILED", f"the printed statement holds{where}, so the erratum is wrong"
    printed = f"span {r.get('printed_basis')}" if r.get("printed_basis") else tgt
    return _verdict(True, bool(envs[0]), f"printed {pg} . {psrc} = {printed} fails; corrected {g} . {src} = {tgt} holds"
                    + _points_text(envs), "")


def _erratum_claim(reg: Registry, r: Record) -> Claim:
    entries = _ref_entries(r.require("source"), r.require("target"), r.get("printed_source"))
    mats = _matrix_names(reg, r.require("g")) | _matrix_names(reg, r.get("printed_g"))
    return Claim(f"erratum:{r.head[0]}", "erratum", reg.entry(Ref.parse(r.require("target")).entry).form,
                 entries + tuple(sorted(mats)) + (f"ERRATUM:{r.head[0]}",), r.require("cite"),
                 lambda ctx, r=r: _check_erratum(reg, r, ctx))


def _count_claim(reg: Registry, r: Record) -> Claim:
    form = r.head[0]
    want = int(r.require("expect"))

    def check(ctx):
        n = sum(1 for e in reg.entries.values() if e.form == form and not e.aux)
        return _verdict(n == want, False, f"{n} table entries", f"{n} table entries, expected {want}")

    return Claim(f"count:{form}", "row_count", form, (f"COUNT:{form}",), r.require("cite"), check)


# -- building suites ----------------------------------------------------------

def _record_keys(reg: Registry, form: str) -> set[str]:
    """Everything a suite must touch, as coverage keys."""
    keys: set[str] = set()
    for e in reg.entries.values():
        if form in ("all", e.form):
            keys.add(e.id)
    for w in reg.witnesses:
        if form in ("all", reg.entry(w.entry).form):
            keys.add(w.id)
    if form in ("all", "complex"):
        keys |= {f"STAB:{s.id}" for s in reg.stabilizers}
    if form == "all":
        keys |= set(reg.matrices)
        for kind in ("DASHED", "EQUIV", "WIN", "SPEC", "H1", "TRUST", "ERRATUM", "COUNT"):
            keys |= {f"{kind}:{'/'.join(r.head)}" for r in reg.records_of(kind)}
    return keys


def _coverage_claim(reg: Registry, form: str, claims: Sequence[Claim]) -> Claim:
    seen = {x for c in claims for x in c.inputs}
    required = _record_keys(reg, form)
    missing = sorted(required - seen)

    def check(ctx):
        if missing:
            shown = ", ".join(missing[:12]) + (" ..." if len(missing) > 12 else "")
            return "FAILED", f"{len(missing)} registry items appear in no claim: {shown}"
        return "VERIFIED", f"all {len(required)} registry items appear in a claim"

    return Claim(f"coverage:{form}", "coverage", form, (), "registry completeness", check)


def _form_claims(reg: Registry) -> list[Claim]:
    out: list[Claim] = []
    for e in reg.entries.values():
        out += _entry_claims(reg, e)
    for s in reg.stabilizers:
        out += _stab_claims(reg, s)
    for w in reg.witnesses:
        out += _witness_claims(reg, w)
    for r in reg.records_of("DASHED"):
        out += _dashed_claims(reg, r)
    out += [_equiv_claim(reg, r) for r in reg.records_of("EQUIV")]
    out += [_win_claim(reg, r) for r in reg.records_of("WIN")]
    out += [_spec_claim(reg, r) for r in reg.records_of("SPEC")]
    out += [_h1_claim(reg, r) for r in reg.records_of("H1")]
    out += [_trust_claim(reg, r) for r in reg.records_of("TRUST")]
    out += _filter_claims(reg)
    out += [_erratum_claim(reg, r) for r in reg.records_of("ERRATUM")]
    out += [_count_claim(reg, r) for r in reg.records_of("COUNT")]
    ids = [c.id for c in out]
    if len(ids) != len(set(ids)):
        dup = sorted({i for i in ids if ids.count(i) > 1})
        raise ValueError(f"duplicate claim ids {dup}")
    return out


def build_claims(form: str, reg: Registry | None = None) -> list[Claim]:
    """The full claim set for a form ('all' for every form), plus a coverage claim."""
    if form not in SUITES:
        raise ValueError(f"unknown form {form!r}")
    reg = reg or load_registry()
    claims = [c for c in _form_claims(reg) if form in ("all", c.form)]
    claims.append(_coverage_claim(reg, form, claims))
    return sorted(claims, key=lambda c: c.id)


def _guard(fn: Callable[[], tuple[str, str]]) -> tuple[str, str]:
    try:
        return fn()
    except (MissingWitness, SamplingError, ExprError, NotAGroup, NotInGroup, BadLift, UnknownPattern,
            ArithmeticError, ValueError, KeyError) as exc:
        return "FAILED", f"{type(exc).__name__}: {exc}"


def run_claim(c: Claim, samples: int = 5, seed: int = 0) -> ClaimResult:
    t0 = time.perf_counter()
    ctx = Context(samples, claim_rng(seed, c.id))
    status, detail = _guard(lambda: c.check(ctx))
    if status not in STATUSES:
        status, detail = "FAILED", f"internal: bad status {status!r}"
    return ClaimResult(c.id, status, detail, c.cite, time.perf_counter() - t0)


def run_suite(claims: Sequence[Claim], samples: int = 5, seed: int = 0, suite: str = "custom",
              fingerprint: str = "") -> Report:
    if samples < 1:
        raise ValueError("samples must be at least 1")
    results = [run_claim(c, samples, seed) for c in claims]
    return Report(suite, fingerprint, tuple(sorted(results, key=lambda r: r.claim_id)))


def select(claims: Sequence[Claim], pattern: str | None) -> list[Claim]:
    if not pattern:
        return list(claims)
    return [c for c in claims if fnmatch.fnmatchcase(c.id, pattern)]


def verify(form: str = "all", samples: int = 5, seed: int = 0, reg: Registry | None = None,
           only: str | None = None) -> Report:
    reg = reg or load_registry()
    claims = select(build_claims(form, reg), only)
    return run_suite(claims, samples, seed, form, reg.fingerprint)


# -- reports ----------------------------------------------------------------

def report_json(r: Report) -> dict:
    return {
        "suite": r.suite,
        "fingerprint": r.fingerprint,
        "results": [x.as_dict() for x in r.results],
        "summary": r.summary,
    }


def emit_report(r: Report, format: str = "json") -> str:
    if format == "json":
        return json.dumps(report_json(r), indent=1, ensure_ascii=False) + "\n"
    if format != "text":
        raise ValueError(f"unknown report format {format!r}")
    width = max([len(x.claim_id) for x in r.results] + [5])
    lines = [f"suite {r.suite}  registry {r.fingerprint[:16]}", ""]
    lines.append(f"{'CLAIM':<{width}}  {'STATUS':<16}  DETAIL")
    for x in r.results:
        lines.append(f"{x.claim_id:<{width}}  {x.status:<16}  {x.detail}")
    lines.append("")
    lines.append("summary: " + (", ".join(f"{k} {v}" for k, v in r.summary.items()) or "no claims"))
    return "\n".join(lines) + "\n"


# -- mutation testing ---------------------------------------------------------

@dataclass(frozen=True)
class Mutation:
    entry: str
    index: int
    old: str
    new: str


def mutate_registry(reg: Registry, rng: random.Random, tries: int = 50) -> tuple[Registry, Mutation]:
    """Change one basis expression E of a random entry to (E)+S for a frame
    symbol S, skipping mutants that span the same subalgebra."""
    entry_recs = [k for k, r in enumerate(reg.records) if r.kind == "ENTRY"]
    for _ in range(tries):
        k = rng.choice(entry_recs)
        rec = reg.records[k]
        e = reg.entries[rec.head[0]]
        idx = rng.randrange(len(e.basis_exprs))
        sym = rng.choice(FRAME_NAMES[e.frame])
        new_expr = f"({e.basis_exprs[idx]})+{sym}"
        exprs = list(e.basis_exprs)
        exprs[idx] = new_expr
        fields = tuple((key, ";".join(exprs) if key == "basis" else v) for key, v in rec.fields)
        new_rec = Record(rec.kind, rec.head, fields)
        records = list(reg.records)
        records[k] = new_rec
        mutated = reg.with_records(records, origin=f"{reg.origin} (mutated)")
        if not _mutant_differs(e, mutated.entries[e.id], rng):
            continue
        return mutated, Mutation(e.id, idx, e.basis_exprs[idx], new_expr)
    raise RuntimeError("no non-equivalent mutant found")


def _mutant_differs(old: TableEntry, new: TableEntry, rng: random.Random) -> bool:
    ctx = Context(2, rng)
    for vals in entry_points(ctx, old):
        if not instantiate(old, vals).same_span(instantiate(new, vals)):
            return True
    return False


def run_mutation(reg: Registry, seed: int, samples: int = 2) -> tuple[Mutation, Report]:
    """Mutate one basis expression and run only the claims that read it."""
    rng = claim_rng(seed, "mutation")
    mutated, m = mutate_registry(reg, rng)
    claims = [c for c in build_claims("all", mutated) if m.entry in c.inputs]
    return m, run_suite(claims, samples, seed, f"mutation:{m.entry}", mutated.fingerprint)


__all__ = [
    "Claim", "ClaimResult", "Report", "Context", "Mutation", "MissingWitness", "SamplingError",
    "STATUSES", "CLAIM_KINDS", "SUITES", "build_claims", "run_suite", "run_claim", "verify",
    "check_dashed_pair", "emit_report", "report_json", "select", "claim_rng", "draw",
    "invariants", "compute_h1", "monomial_candidates", "find_monomial_witness",
    "mutate_registry", "run_mutation",
]
