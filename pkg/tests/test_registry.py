import json

import pytest
from hypothesis import given, strategies as st

from lie3cert.exactfield import I, ONE, as_fe
from lie3cert.linalg3 import Mat3
from lie3cert.liecore import Subalgebra, frame_symbols
from lie3cert.registry import (
    FORMS, ConstraintViolation, DomainViolation, ExcludedParameter, Ref, Registry, RegistryError,
    UnknownEntry, complete_sample, enumerate_entries, export_json, instantiate, normalize_id,
    parse_line, registry_from_json, stabilizer_sample, witnesses_for,
)

S = frame_symbols()


def ids(entries):
    return [e.id for e in entries]


def test_enumerate_entries_examples(reg):
    assert ids(enumerate_entries("su3", reg=reg)) == ["w1", "w2", "w3.1", "w3.2", "w4"]
    v5 = [e for e in enumerate_entries("su21", reg=reg) if e.dim == 5 and e.structural_class == "solvable"]
    assert ids(v5) == ["v5.1"]
    ss = [e for e in enumerate_entries("sl3r", reg=reg) if e.structural_class == "semisimple"]
    assert ids(ss) == ["u3.16", "u3.17", "u3.18"]


def test_table_sizes(reg):
    sizes = {f: len(enumerate_entries(f, reg=reg)) for f in FORMS}
    assert sizes == {"complex": 38, "sl3r": 49, "su21": 24, "su3": 5}


def test_instantiate_examples(reg):
    u = instantiate(reg.entry("u1.4"), {"a": 2})
    assert u.same_span(Subalgebra.from_matrices([S["Ha"] + S["Hb"].scale(2)]))
    with pytest.raises(ExcludedParameter):
        instantiate(reg.entry("u3.8"), {"t": 0})
    v = instantiate(reg.entry("v1.5"), {"l": 0})
    assert v.same_span(Subalgebra.from_matrices([S["A1"]]))
    with pytest.raises(DomainViolation):
        instantiate(reg.entry("v1.5"), {"l": 1 + I})
    with pytest.raises(DomainViolation):
        instantiate(reg.entry("v1.5"), {})


def test_stabilizer_sample_examples(reg):
    fam = next(s for s in reg.stabilizers if s.entry_id == "cA1.2")
    vals = dict(zip("abcdef", (1, 2, 3, 1, 4, 1)))
    assert stabilizer_sample(fam, vals) == Mat3([[1, 2, 3], [0, 1, 0], [0, 4, 1]])
    assert stabilizer_sample(fam, dict(zip("abcdef", (1, 0, 0, 1, 0, 1)))) == Mat3.identity()
    with pytest.raises(ConstraintViolation):
        stabilizer_sample(fam, dict(zip("abcdef", (1, 2, 3, 2, 4, 1))))
    assert fam.param_dim == 5


def test_witnesses_for_examples(reg):
    def matrices(eid):
        return {e for w in witnesses_for(eid, reg) for _, e in w.matrices}

    assert {"c1", "g1"} <= matrices("u1.6")
    assert {"h_xa", "g_xa"} <= matrices("v1.1")
    assert witnesses_for("w2", reg) == []
    with pytest.raises(UnknownEntry):
        witnesses_for("u9.9", reg)


def test_latex_ids_are_normalized(reg):
    assert normalize_id("u_{1,6}") == "u1.6"
    assert reg.entry("u_{1,6}").id == "u1.6"
    assert reg.entry("u1.6").label == "u_{1,6}"


def test_ref_parse():
    r = Ref.parse("cA1.4(a=1/2-l*i)")
    assert r.entry == "cA1.4"
    assert r.values({"l": ONE})["a"] == as_fe(1) / 2 - I


def test_parser_rejects_bad_lines():
    with pytest.raises(RegistryError):
        parse_line("BOGUS|x|cite=y", 1)
    with pytest.raises(RegistryError):
        parse_line("MATRIX|c1|value=1|value=2|cite=x", 1)
    with pytest.raises(RegistryError):
        Registry("MATRIX|c1|value=[[1,0,0],[0,1,0],[0,0,1]]|cite=x")  # no final newline


def test_registry_rejects_dangling_references():
    text = "ENTRY|u1.1|sl3r|1|solvable|-|basis=Xa|from=cZ.9|via=I|cite=x\n"
    with pytest.raises(RegistryError):
        Registry(text)


def test_every_stored_matrix_is_in_sl3(reg):
    for name, m in reg.matrices.items():
        if name == "D_u38":
            continue
        assert m.det() == ONE, name


def test_json_roundtrip(reg, tmp_path):
    path = tmp_path / "reg.json"
    export_json(reg, path)
    back = registry_from_json(json.loads(path.read_text()))
    assert back.fingerprint == reg.fingerprint
    assert set(back.entries) == set(reg.entries)


@given(st.data())
def test_stabilizer_samples_satisfy_their_constraints(reg, data):
    fam = data.draw(st.sampled_from([s for s in reg.stabilizers if s.free]))
    free = {n: data.draw(st.integers(1, 6)) for n in fam.free}
    try:
        vals = complete_sample(fam, free)
        g = stabilizer_sample(fam, vals)
    except (ZeroDivisionError, ConstraintViolation):
        return
    assert g.det() == ONE


@given(st.data())
def test_instantiated_spans_have_the_listed_dimension(reg, data):
    e = data.draw(st.sampled_from(sorted(reg.entries.values(), key=lambda e: e.id)))
    vals = {n: as_fe(data.draw(st.integers(2, 9))) / 7 for n in e.params.names}
    try:
        u = instantiate(e, vals)
    except (ExcludedParameter, DomainViolation):
        return
    assert u.dim == e.dim
