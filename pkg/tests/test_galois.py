import pytest
from hypothesis import given, strategies as st

from lie3cert.exactfield import I, ONE, as_fe
from lie3cert.galois import (
    CONJUGATIONS, SL3R, SU3, SU21, FiniteGroupData, NotAGroup, NotInGroup, TorusDescriptor,
    UnknownPattern, diag_coords2, fixed_real_basis, h1_assemble, h1_finite, h1_torus, is_cocycle,
    is_diagonal, is_sigma_stable, sigma_apply, transport, verify_twist,
)
from lie3cert.linalg3 import Mat3
from lie3cert.liecore import FRAMES, Subalgebra, frame_symbols
from lie3cert.verifier import compute_h1

from conftest import matrices, traceless

S = frame_symbols()


def span(*mats, real=False):
    return Subalgebra.from_matrices(mats, real=real)


def chart2(a, b):
    return Mat3.diag(a, b, (a * b).inv())


def chart1(s):
    return Mat3.diag(s, 1, s.inv())


def test_sigma_apply_examples(reg):
    d = Mat3.diag(-1, -1, 1)
    assert sigma_apply(SU21, d, "group") == d
    g = reg.matrices["g1"]
    assert sigma_apply(SL3R, g, "group") == g.conj()
    for a in FRAMES["su21_A"]:
        assert sigma_apply(SU21, a, "algebra") == a
    for b in FRAMES["su3_B"]:
        assert sigma_apply(SU3, b, "algebra") == b
    with pytest.raises(NotInGroup):
        sigma_apply(SL3R, Mat3.diag(2, 1, 1), "group")


def test_is_cocycle_examples(reg):
    assert is_cocycle(SL3R, Mat3.identity())
    assert is_cocycle(SL3R, reg.matrices["c1"])
    assert is_cocycle(SU21, reg.matrices["g0_xab"])
    with pytest.raises(NotInGroup):
        is_cocycle(SU21, Mat3.diag(2, 2, 2))


def test_verify_twist_examples(reg):
    m = reg.matrices
    assert verify_twist(SL3R, m["g1"], m["c1"])
    assert verify_twist(SU21, m["h_xab"], m["g0_xab"])
    assert verify_twist(SL3R, Mat3.identity(), Mat3.identity())
    assert not verify_twist(SL3R, m["g1"], Mat3.identity())


def test_transport_examples(reg):
    m = reg.matrices
    moved = transport(m["g1"], span(S["Ha"] + S["Hb"]))
    assert moved.same_span(span(Mat3([[0, 0, -I], [0, 0, 0], [I, 0, 0]])))
    u = span(S["Xab"], S["Yab"])
    assert transport(Mat3.identity(), u).same_span(u)
    assert transport(m["h_xab"], span(S["Xa"] + S["Xb"])).same_span(
        span(S["A3"] + S["A4"] + S["A7"] - S["A8"]))
    with pytest.raises(NotInGroup):
        transport(Mat3.diag(1, 1, 2), u)


def test_fixed_real_basis_examples(reg):
    u = transport(reg.matrices["g1"], span(S["Ha"] + S["Hb"]))
    rb = fixed_real_basis(SL3R, u)
    assert len(rb) == 1 and span(*rb).same_span(span(-S["Xab"] + S["Yab"]))
    assert span(*fixed_real_basis(SL3R, span(S["Ha"], S["Hb"]))).same_span(span(S["Ha"], S["Hb"]))
    sl2 = span(S["Xab"], S["Yab"], S["Ha"] + S["Hb"])
    rb = fixed_real_basis(SU21, sl2)
    assert len(rb) == 3
    assert span(*rb).same_span(span(S["A1"] + S["A2"], S["A5"], S["A6"]))
    assert all(SU21.algebra(x) == x for x in rb)


def test_h1_finite_examples(reg):
    c = reg.matrices["c1"]
    assert len(h1_finite(SL3R, FiniteGroupData([Mat3.identity(), c], SL3R))) == 2
    assert len(h1_finite(SL3R, FiniteGroupData([Mat3.identity()], SL3R))) == 1
    s3 = next(r for r in reg.records_of("H1") if r.head[0] == "sl3r:S3")
    n, reps, has = compute_h1(reg, s3)
    assert n == 2 and has(c)
    with pytest.raises(NotAGroup):
        FiniteGroupData([Mat3.identity(), reg.matrices["G"]], SL3R)


def test_h1_torus_examples():
    one = TorusDescriptor(1, "conjugate", chart1, lambda m: (m[0, 0],))
    assert h1_torus(one).representatives == (Mat3.identity(),)
    inv = TorusDescriptor(1, "conjugate_inverse", chart1, lambda m: (m[0, 0],))
    assert set(h1_torus(inv).representatives) == {Mat3.identity(), Mat3.diag(-1, 1, -1)}
    swap = TorusDescriptor(2, "swap_conjugate", chart2, diag_coords2)
    assert len(h1_torus(swap)) == 1
    with pytest.raises(UnknownPattern):
        TorusDescriptor(1, "swap_conjugate", chart1, lambda m: (m[0, 0],))
    with pytest.raises(UnknownPattern):
        TorusDescriptor(2, "rotate", chart2, diag_coords2)


def test_h1_assemble_examples(reg):
    by_id = {r.head[0]: r for r in reg.records_of("H1")}
    n, reps, has = compute_h1(reg, by_id["su21:cartan"])
    assert n == 3
    assert Mat3.identity() in reps and Mat3.diag(-1, -1, 1) in reps and has(reg.matrices["u"])
    assert compute_h1(reg, by_id["sl3r:cartan"])[0] == 2
    n, reps, has = compute_h1(reg, by_id["su3:lambda0"])
    assert has(reg.matrices["u"])
    # a trivial component group leaves the torus part unchanged
    tor = TorusDescriptor(2, "conjugate_inverse", chart2, diag_coords2)
    trivial = FiniteGroupData([Mat3.identity()], SU3, modulo=is_diagonal)
    assert set(h1_assemble(SU3, tor, trivial, {}).representatives) == set(h1_torus(tor).representatives)


def test_torus_pattern_must_match_the_conjugation():
    tor = TorusDescriptor(2, "conjugate", chart2, diag_coords2)
    trivial = FiniteGroupData([Mat3.identity()], SU3, modulo=is_diagonal)
    with pytest.raises(UnknownPattern):
        h1_assemble(SU3, tor, trivial, {})


@given(st.sampled_from(sorted(CONJUGATIONS)), traceless)
def test_sigma_is_an_involution_on_the_algebra(kind, x):
    c = CONJUGATIONS[kind]
    assert c.algebra(c.algebra(x)) == x
    # x + sigma(x) is fixed, so it is in the real form
    y = x + c.algebra(x)
    assert c.algebra(y) == y


@given(st.sampled_from(sorted(CONJUGATIONS)), matrices)
def test_sigma_is_an_involutive_group_automorphism(kind, m):
    if m.det().is_zero():
        return
    c = CONJUGATIONS[kind]
    assert c.group(c.group(m)) == m
    assert c.group(m * m) == c.group(m) * c.group(m)


@given(st.sampled_from(sorted(CONJUGATIONS)), traceless, traceless)
def test_sigma_is_a_real_lie_algebra_automorphism(kind, x, y):
    c = CONJUGATIONS[kind]
    assert c.algebra(x * y - y * x) == c.algebra(x) * c.algebra(y) - c.algebra(y) * c.algebra(x)
    assert c.algebra(x.scale(I)) == c.algebra(x).scale(-I)


@given(st.sampled_from(sorted(CONJUGATIONS)), traceless)
def test_fixed_real_basis_spans_the_whole_stable_span(kind, x):
    c = CONJUGATIONS[kind]
    if x.is_zero():
        return
    u = span(x, c.algebra(x))
    assert is_sigma_stable(c, u)
    rb = fixed_real_basis(c, u)
    assert len(rb) == u.dim and span(*rb).same_span(u)
