import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from lie3cert.galois import transport
from lie3cert.liecore import Subalgebra, frame_symbols
from lie3cert.registry import Witness, instantiate
from lie3cert.verifier import (
    STATUSES, Claim, MissingWitness, Report, build_claims, check_dashed_pair, claim_rng, draw,
    emit_report, run_claim, run_suite, select, verify,
)

S = frame_symbols()


def by_form(report, forms, form):
    return [r for r in report.results if forms[r.claim_id] == form]


def dashed_witness(reg, a, g, separate="invariant", **extra):
    rec = next(r for r in reg.records_of("DASHED") if r.head == (a, reg.entry(a).dashed_partner))
    fields = (("separate", separate),) + tuple(extra.items())
    return Witness(f"dashed:{a}", a, "transport", (("g", g),), fields, rec.require("cite"))


def test_su3_claims_include_the_lambda0_h1_count(reg):
    claims = {c.id: c for c in build_claims("su3", reg)}
    c = claims["h1:su3:lambda0"]
    assert c.kind == "h1_count" and "u" in c.inputs
    r = run_claim(c)
    assert r.status == "VERIFIED" and "[u] detected" in r.detail and "TRUSTED" in r.detail


def test_sl3r_claims_include_the_second_cg_transport(reg):
    g = reg.matrices["g2c"]
    moved = transport(g, Subalgebra.from_matrices([S["Xa"], S["Xab"], S["Hb"]]))
    assert moved.same_span(Subalgebra.from_matrices([S["Xa"], S["Xab"], S["Xb"] - S["Yb"]]))
    claims = {c.id: c for c in build_claims("sl3r", reg)}
    assert claims["u3.12:transport"].kind == "transport_span"
    assert "g2c" in claims["u3.12:transport"].inputs
    assert run_claim(claims["u3.12:transport"]).status == "VERIFIED"


def test_su21_claims_include_the_v26_spectrum(reg):
    claims = {c.id: c for c in build_claims("su21", reg)}
    c = claims["spectrum:v2.6:diag"]
    assert c.kind == "char_spectrum"
    assert run_claim(c).status == "VERIFIED_SAMPLED"


def test_form_suites_have_no_failures(full_report, claim_forms):
    for form in ("complex", "sl3r", "su21", "su3"):
        rows = by_form(full_report, claim_forms, form)
        assert rows and not [r for r in rows if r.status == "FAILED"], form
    su21 = by_form(full_report, claim_forms, "su21")
    assert any(r.status == "TRUSTED" for r in su21)
    trusted = {r.claim_id for r in su21 if r.status == "TRUSTED"}
    assert "trust:su21-groebner" in trusted


def test_empty_suite():
    r = run_suite([], suite="empty")
    assert r.results == () and r.summary == {}
    assert json.loads(emit_report(r)) == {"suite": "empty", "fingerprint": "", "results": [], "summary": {}}


def test_single_closure_claim_report(reg):
    c = next(c for c in build_claims("sl3r", reg) if c.id == "u1.1:closure")
    doc = json.loads(emit_report(run_suite([c], suite="one")))
    assert len(doc["results"]) == 1
    assert doc["results"][0]["status"] == "VERIFIED" and doc["results"][0]["id"] == "u1.1:closure"
    assert doc["summary"] == {"VERIFIED": 1}


def test_su3_suite_summary(reg):
    r = verify("su3", reg=reg)
    assert r.summary.get("VERIFIED", 0) >= 5 and "FAILED" not in r.summary
    closures = [x for x in r.results if x.claim_id.endswith(":closure") and x.claim_id.startswith("w")]
    assert len(closures) == 5


def test_dashed_pair_u15_u16(reg):
    w = dashed_witness(reg, "u1.5", "g1")
    r = check_dashed_pair(reg.entry("u1.5"), reg.entry("u1.6"), w, reg)
    assert r.status == "VERIFIED"
    assert '"p_sign": -1} vs {' in r.detail and '"p_sign": 1}' in r.detail


def test_dashed_pairs_transport_half(reg):
    for a, b, g in (("u4.1", "u4.2", "g2c"), ("v3.5", "v3.6", "g2")):
        r = check_dashed_pair(reg.entry(a), reg.entry(b), dashed_witness(reg, a, g), reg)
        assert r.status == "VERIFIED", r.detail
        assert f"{g} . {a} = {b}" in r.detail
    v36 = Subalgebra.from_matrices([S["A1"], S["A3"], S["A4"]])
    assert transport(reg.matrices["g2"], instantiate(reg.entry("v3.5"))).same_span(v36)


def test_trusted_separation(reg):
    w = dashed_witness(reg, "v1.3", "g_xa", separate="trusted")
    r = check_dashed_pair(reg.entry("v1.3"), reg.entry("v1.4"), w, reg)
    assert r.status == "TRUSTED" and "imported" in r.detail


def test_dashed_pair_errors(reg):
    with pytest.raises(MissingWitness):
        check_dashed_pair(reg.entry("u1.5"), reg.entry("u1.6"), None, reg)
    with pytest.raises(ValueError):
        check_dashed_pair(reg.entry("u1.5"), reg.entry("u2.6"), dashed_witness(reg, "u1.5", "g1"), reg)


def test_wrong_conjugator_fails(reg):
    w = dashed_witness(reg, "u1.5", "G")
    assert check_dashed_pair(reg.entry("u1.5"), reg.entry("u1.6"), w, reg).status == "FAILED"


def test_crashing_claim_becomes_failed():
    def boom(ctx):
        raise ZeroDivisionError("x")

    r = run_claim(Claim("bad", "identity", "sl3r", (), "", boom))
    assert r.status == "FAILED" and "ZeroDivisionError" in r.detail


def test_select_by_glob(reg):
    picked = select(build_claims("sl3r", reg), "u1.6:*")
    assert picked and all(c.id.startswith("u1.6:") for c in picked)


def test_text_report_lists_every_claim(reg):
    r = verify("sl3r", reg=reg, only="u1.*:closure")
    text = emit_report(r, "text")
    assert all(x.claim_id in text for x in r.results)
    assert text.rstrip().splitlines()[-1] == "summary: " + ", ".join(f"{k} {v}" for k, v in r.summary.items())


def test_statuses_are_from_the_fixed_set(full_report):
    assert {r.status for r in full_report.results} <= set(STATUSES)
    assert list(full_report.summary) == [s for s in STATUSES if s in full_report.summary]


@given(st.integers(0, 10 ** 6), st.text(min_size=1, max_size=12))
def test_claim_rng_is_deterministic(seed, cid):
    assert claim_rng(seed, cid).random() == claim_rng(seed, cid).random()


@given(st.integers(0, 10 ** 6), st.sampled_from(["unit", "positive", "real", "complex", "nonreal"]))
def test_draw_respects_the_domain(seed, domain):
    x = draw(random.Random(seed), domain)
    assert not x.is_zero()
    if domain in ("unit", "positive", "real"):
        assert x.is_real()
    if domain == "nonreal":
        assert not x.is_real()
    if domain == "unit":
        assert 0 < x.coords[0] < 1


@settings(max_examples=10)
@given(st.integers(0, 2 ** 31))
def test_parametric_claims_are_seed_stable(reg, seed):
    claims = select(build_claims("sl3r", reg), "u1.4*")
    a, b = run_suite(claims, 2, seed), run_suite(claims, 2, seed)
    assert emit_report(a) == emit_report(b)
    assert "FAILED" not in a.summary
