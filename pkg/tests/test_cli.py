import json
import xml.etree.ElementTree as ET

import jsonschema
import pytest

from quadnets.cli import load_schema, main

from conftest import DIAG_NET, ODD_NET, nonsingular_nets


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def _run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if code == 0 and out.strip() else None)


@pytest.fixture(scope="module")
def n3_net():
    return nonsingular_nets(3, 1, seed=11)[0]


def test_analyze_n3_matches_schema_and_verdicts(tmp_path, capsys, n3_net):
    path = _write(tmp_path, "net.json", n3_net.to_json())
    code, rep = _run(["analyze", path], capsys)
    assert code == 0
    jsonschema.validate(rep, load_schema("analysis"))
    v = rep["verdicts"]
    for key in ("axioms", "e2_patterns", "orientation", "prediction_vs_oracle", "euler", "empty_oval_law"):
        assert v[key] == "consistent", key
    assert v["kronecker"] == "not-checked"


def test_analyze_is_byte_identical(tmp_path, n3_net):
    path = _write(tmp_path, "net.json", n3_net.to_json())
    outs = []
    for k in range(2):
        dest = tmp_path / f"out{k}.json"
        assert main(["analyze", path, "--json-out", str(dest)]) == 0
        outs.append(dest.read_bytes())
    assert outs[0] == outs[1]


def test_analyze_singular_exit_3(tmp_path, capsys):
    path = _write(tmp_path, "diag.json", DIAG_NET.to_json())
    assert main(["analyze", path]) == 3
    assert "SingularInput" in capsys.readouterr().err


def test_bad_input_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert main(["analyze", str(p)]) == 2
    assert main(["analyze", str(tmp_path / "missing.json")]) == 2
    assert main(["construct", "hilbert", "--degree", "9"]) == 2
    assert main(["construct", "hilbert", "--degree", "4", "--epsilon-floor", "abc"]) == 2
    capsys.readouterr()


def test_kronecker_via_analyze(tmp_path, capsys):
    path = _write(tmp_path, "odd.json", ODD_NET.to_json())
    code, rep = _run(["analyze", path], capsys)
    assert code == 0
    assert rep["oracle"]["kind"] == "kronecker" and rep["oracle"]["parity"] == 1
    assert set(rep["index"]["attained"]) == {1, 2}
    assert rep["verdicts"]["kronecker"] == "consistent"


def test_construct_hilbert_6(tmp_path, capsys):
    art = tmp_path / "h6.json"
    code, rep = _run(["construct", "hilbert", "--degree", "6", "--artifact-out", str(art)], capsys)
    assert code == 0
    jsonschema.validate(rep, load_schema("hilbert"))
    assert rep["count"] == 9
    assert rep["validation"]["nonsingular"] and rep["validation"]["within_petrovsky"]
    assert "coeffs" in json.loads(art.read_text())


def test_construct_hilbert_floor_too_high_exit_4(capsys):
    # d = 6 needs |eps| = 2^-60
    assert main(["construct", "hilbert", "--degree", "6", "--epsilon-floor", "2**-20"]) == 4
    assert "exhausted" in capsys.readouterr().err


def test_harnack_artifact_through_oracle(tmp_path, capsys):
    art = tmp_path / "h3.json"
    code, rep = _run(["construct", "harnack", "--dimension", "3", "--artifact-out", str(art)], capsys)
    assert code == 0
    jsonschema.validate(rep, load_schema("harnack"))
    assert rep["count"] == 2
    for method in ("tower", "tracking"):
        code, res = _run(["oracle", str(art), "--method", method], capsys)
        assert code == 0
        jsonschema.validate(res, load_schema("oracle"))
        assert res["count"] == 2, method


def test_oracle_points(tmp_path, capsys, n3_net):
    path = _write(tmp_path, "net.json", n3_net.to_json())
    code, res = _run(["oracle", path], capsys)
    assert code == 0
    jsonschema.validate(res, load_schema("oracle"))
    assert res["kind"] == "points" and res["count"] in (0, 2, 4, 6, 8)


def test_dixon_roundtrip(tmp_path, capsys, n3_net):
    path = _write(tmp_path, "net.json", n3_net.to_json())
    code, rep = _run(["dixon", path], capsys)
    assert code == 0
    jsonschema.validate(rep, load_schema("dixon"))
    assert rep["identities_ok"] and rep["c"] != 0


def test_tolerance_override_rejects_unknown_key(tmp_path, capsys, n3_net):
    path = _write(tmp_path, "net.json", n3_net.to_json())
    assert main(["oracle", path, "--tolerance", "no_such_key=1"]) == 2
    capsys.readouterr()


def test_render_two_panels_deterministic(tmp_path, capsys, n3_net):
    path = _write(tmp_path, "net.json", n3_net.to_json())
    svgs = []
    for k in range(2):
        dest = tmp_path / f"r{k}.svg"
        assert main(["render", path, "--svg-out", str(dest)]) == 0
        svgs.append(dest.read_bytes())
    capsys.readouterr()
    assert svgs[0] == svgs[1]
    root = ET.fromstring(svgs[0])
    axes = [g for g in root.iter("{http://www.w3.org/2000/svg}g") if g.get("id", "").startswith("axes_")]
    assert len(axes) >= 2
