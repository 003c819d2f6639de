import json

from lie3cert.cli import main


def test_verify_writes_json(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["verify", "--form", "su3", "--json", str(out), "--quiet"]) == 0
    doc = json.loads(out.read_text())
    assert set(doc) == {"suite", "fingerprint", "results", "summary"}
    assert doc["suite"] == "su3" and "FAILED" not in doc["summary"]
    assert capsys.readouterr().out.startswith("VERIFIED=")


def test_verify_only_glob(capsys):
    assert main(["verify", "--form", "sl3r", "--only", "u1.6:*"]) == 0
    text = capsys.readouterr().out
    assert "u1.6:closure" in text and "u1.5:closure" not in text


def test_show_prints_all_frames(capsys):
    assert main(["show", "u1.6"]) == 0
    out = capsys.readouterr().out
    for frame in ("[chevalley]", "[winternitz]", "[su21_A]", "[su3_B]"):
        assert frame in out
    assert "-Xab + Yab" in out


def test_show_with_parameter(capsys):
    assert main(["show", "u1.4", "--param", "a=2"]) == 0
    assert "Ha + 2*Hb" in capsys.readouterr().out


def test_invariant(capsys):
    assert main(["invariant", "u1.5"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["projective_invariant"]["p_sign"] == -1
    assert main(["invariant", "u2.5"]) == 0
    assert json.loads(capsys.readouterr().out)["projective_invariant"] is None


def test_export_registry(tmp_path):
    out = tmp_path / "reg.json"
    assert main(["export-registry", "--json", str(out)]) == 0
    assert len(json.loads(out.read_text())["records"]) > 400


def test_errors_exit_2(capsys):
    assert main(["show", "u9.9"]) == 2
    assert main(["show", "u3.8", "--param", "t=0"]) == 2
    assert main(["show", "u1.4"]) == 2
    assert main(["verify", "--samples", "0"]) == 2
    assert "lie3cert:" in capsys.readouterr().err
