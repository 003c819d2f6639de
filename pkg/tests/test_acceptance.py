"""The nine acceptance criteria, one PASS/FAIL line each.

Run under pytest, or directly with `python3 tests/test_acceptance.py`.
Each check recomputes what it can from the math layers and also reads the
verdicts of the full `verify --form all` run.
"""
from __future__ import annotations

import sys

import pytest

from lie3cert.exactfield import I, ONE, as_fe
from lie3cert.linalg3 import Mat3, char_poly, from_roots
from lie3cert.liecore import normalizer, projective_invariant, su3_candidate
from lie3cert.registry import enumerate_entries, instantiate, load_registry
from lie3cert.expr import eval_scalar
from lie3cert.verifier import build_claims, compute_h1, emit_report, invariants, run_mutation, verify

GOOD = ("VERIFIED", "VERIFIED_SAMPLED", "TRUSTED")
TABLE_SIZES = {"complex": 38, "sl3r": 49, "su21": 24, "su3": 5}
NAMED_WITNESSES = ("c1", "g1", "c2", "g2c", "g0_xab", "h_xab", "u", "g3", "g2", "G", "K")
NILPOTENT = char_poly(Mat3.zero())
RATIONALS = [as_fe(n) / d for n, d in ((2, 1), (3, 1), (1, 3), (-2, 1), (5, 7))]


def _status(report, cid):
    return report.result(cid).status


def crit_coverage(reg, report):
    missing = []
    for form, n in TABLE_SIZES.items():
        entries = enumerate_entries(form, reg=reg)
        if len(entries) != n:
            return False, f"{form}: {len(entries)} entries, expected {n}"
        kinds = ("closure", "dimension") + (("realness",) if form != "complex" else ())
        for e in entries:
            for k in kinds:
                try:
                    if _status(report, f"{e.id}:{k}") not in GOOD:
                        missing.append(f"{e.id}:{k}")
                except KeyError:
                    missing.append(f"{e.id}:{k} (absent)")
    if report.failed:
        return False, f"{len(report.failed)} FAILED, first {report.failed[0].claim_id}"
    if missing:
        return False, "not verified: " + ", ".join(missing[:5])
    return True, "49 sl3r, 24 su21, 5 su3, 38 complex entries; 0 FAILED of " + str(len(report.results))


def crit_witnesses(reg, report):
    claims = {c.id: c for c in build_claims("all", reg)}
    ids = [w.id for w in reg.witnesses]
    statuses = [_status(report, i) for i in ids]
    bad = [i for i, s in zip(ids, statuses) if s not in ("VERIFIED", "VERIFIED_SAMPLED")]
    used = set()
    for i in ids:
        used |= set(claims[i].inputs)
    absent = [m for m in NAMED_WITNESSES if m not in used]
    ok = len(ids) >= 25 and not bad and not absent
    return ok, f"{len(ids)} witness identity claims, {len(bad)} not verified, named matrices missing {absent}"


def crit_stabilizers(reg, report):
    bad = []
    for s in reg.stabilizers:
        for k in ("membership", "normalizer-dim"):
            if _status(report, f"{s.id}:{k}") not in ("VERIFIED", "VERIFIED_SAMPLED"):
                bad.append(f"{s.id}:{k}")
        if not any(v == "*" for _, v in s.at):
            vals = {k: eval_scalar(v, {}) for k, v in s.at}
            if normalizer(instantiate(reg.entry(s.entry_id), vals)).dim != s.param_dim:
                bad.append(f"{s.id}: param_dim {s.param_dim}")
    xa = next(s for s in reg.stabilizers if s.entry_id == "cA1.2")
    sampled = report.result(f"{xa.id}:membership").detail.startswith("5 family members")
    ok = not bad and xa.param_dim == 5 and sampled
    return ok, f"{len(reg.stabilizers)} stabilizer rows; <X_alpha> param dim {xa.param_dim}; bad {bad[:3]}"


def crit_h1(reg, report):
    recs = {r.head[0]: r for r in reg.records_of("H1")}
    got = {}
    for key in ("sl3r:centralizer-c", "sl3r:S3", "su21:cartan"):
        got[key] = compute_h1(reg, recs[key])[0]
    _, _, has = compute_h1(reg, recs["su3:lambda0"])
    u_found = has(reg.matrices["u"])
    trusted = _status(report, "trust:su3-u-nontrivial") == "TRUSTED"
    ok = list(got.values()) == [2, 2, 3] and u_found and trusted and \
        all(_status(report, f"h1:{k}") == "VERIFIED" for k in recs)
    return ok, f"counts {got}; su3 lambda=0 [u] detected {u_found}, nontriviality TRUSTED {trusted}"


def crit_separations(reg, report):
    u15 = projective_invariant(instantiate(reg.entry("u1.5")))
    u16 = projective_invariant(instantiate(reg.entry("u1.6")))
    first = (u15.p_sign, u16.p_sign) == (-1, 1) and u15.complex_level() == u16.complex_level()
    a, b = instantiate(reg.entry("u2.5")), instantiate(reg.entry("u2.6"))
    second = invariants(a) != invariants(b) and invariants(a, "complex") == invariants(b, "complex")
    claims = all(_status(report, f"{k}:{p}") == "VERIFIED"
                 for k in ("dashed", "separation") for p in ("u1.5/u1.6", "u2.5/u2.6"))
    ok = first and second and claims
    return ok, f"sign(p) {u15.p_sign}/{u16.p_sign}, complex level equal; u2.5/u2.6 profiles separate {second}"


def crit_equivalences(reg, report):
    e = reg.entry("u1.4")
    equal = 0
    for a in RATIONALS:
        orbit = [a, ONE / a, 1 - a, ONE / (1 - a), a / (a - 1), (a - 1) / a]
        invs = {projective_invariant(instantiate(e, {"a": x})).complex_level() for x in orbit}
        equal += len(invs) == 1
    v26 = reg.entry("v2.6")
    spectra = 0
    for lam in RATIONALS:
        u = instantiate(v26, {"l": lam})
        m = u.preferred_basis()[1]
        want = from_roots([-2 * I * (I + 2 * lam), 2 * I * (I - 2 * lam), 8 * I * lam])
        spectra += char_poly(m) == want
    ok = equal == 5 and spectra == 5 and _status(report, "equiv:u1.4:orbit") == "VERIFIED_SAMPLED" \
        and _status(report, "spectrum:v2.6:diag") == "VERIFIED_SAMPLED"
    return ok, f"u1.4 orbit invariant equal at {equal}/5 points; v2.6 spectrum matches at {spectra}/5"


def crit_su3_filter(reg, report):
    true_set = set()
    wrong = []
    for e in enumerate_entries("complex", reg=reg):
        points = [{n: as_fe(3) / 7 for n in e.params.names}]
        if e.params.names:
            points.append({n: as_fe(3) / 7 + I for n in e.params.names})
        for vals in points:
            try:
                u = instantiate(e, vals)
            except ValueError:
                continue
            hit = su3_candidate(u)
            real = all(v.is_real() for v in vals.values())
            if hit:
                true_set.add(e.id if real else e.id + "(nonreal)")
            # a solvable span with a nilpotent element cannot be toral
            nil = e.structural_class == "solvable" and any(char_poly(m) == NILPOTENT for m in u.basis())
            if nil and hit:
                wrong.append(e.id)
    want = {"cA1.4", "cA2.5", "cA3.1", "cA3.2", "cA6.1"}
    filters = [r for r in report.results if r.claim_id.startswith("filter:")]
    ok = true_set == want and not wrong and all(r.status in ("VERIFIED", "VERIFIED_SAMPLED") for r in filters)
    return ok, f"true for {sorted(true_set)}; {len(filters)} filter claims"


def crit_mutations(reg, report):
    caught = 0
    missed = []
    for seed in range(20):
        m, r = run_mutation(reg, seed)
        if r.failed:
            caught += 1
        else:
            missed.append(f"{m.entry}[{m.index}] {m.new}")
    return caught == 20, f"{caught}/20 mutations produced FAILED; missed {missed}"


def crit_determinism(reg, report):
    again = verify("all", samples=5, seed=0, reg=reg)
    a, b = emit_report(report, "json"), emit_report(again, "json")
    return a == b, f"two JSON reports of {len(a)} bytes, identical {a == b}"


CRITERIA = [
    ("1 table coverage", crit_coverage),
    ("2 witness suite", crit_witnesses),
    ("3 stabilizer tables", crit_stabilizers),
    ("4 finite cohomology counts", crit_h1),
    ("5 invariant separations", crit_separations),
    ("6 parameter equivalences", crit_equivalences),
    ("7 su(3) filter", crit_su3_filter),
    ("8 mutation soundness", crit_mutations),
    ("9 determinism", crit_determinism),
]


def _line(name, ok, detail):
    return f"criterion {name}: {'PASS' if ok else 'FAIL'} ({detail})"


@pytest.mark.parametrize("name,check", CRITERIA, ids=[n for n, _ in CRITERIA])
def test_criterion(name, check, reg, full_report, capsys):
    ok, detail = check(reg, full_report)
    with capsys.disabled():
        print("\n" + _line(name, ok, detail))
    assert ok, detail


def main() -> int:
    reg = load_registry()
    report = verify("all", samples=5, seed=0, reg=reg)
    failures = 0
    for name, check in CRITERIA:
        ok, detail = check(reg, report)
        failures += not ok
        print(_line(name, ok, detail))
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
