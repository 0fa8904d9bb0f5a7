"""Exit codes, report formats, and round-trips of the command-line surface."""

import json
import pathlib

import pytest

from hypersolve.cli import main

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def write_json(path, doc):
    path.write_text(json.dumps(doc))
    return path


def corrupted_fixture(tmp_path, name="example2"):
    with open(FIXTURES / f"{name}.json") as fh:
        doc = json.load(fh)
    doc["equations"][0]["matrix"][0][0] = "x"
    return write_json(tmp_path / "broken.json", doc)


ISO_HEADER = {
    "variables": ["n"],
    "parameters": ["x", "m"],
    "maps": [{"name": "sn", "kind": "automorphism", "action": {"n": 1}}],
}


# -- solve -------------------------------------------------------------------


def test_solve_reports_groups(capsys):
    code, out, _ = run(capsys, "solve", FIXTURES / "example1.json")
    assert code == 0
    doc = json.loads(out)
    assert [g["certificate"] for g in doc["groups"]] \
        == [{"sn": "n"}, {"sn": "x"}]
    assert [g["display"] for g in doc["groups"]] == ["Γ(n)", "x^n"]
    assert doc["groups"][1]["vectors"] == [["0", "0", "1"]]


def test_solve_pretty_report(capsys):
    code, out, _ = run(capsys, "solve", FIXTURES / "example3.json",
                       "--format", "pretty")
    assert code == 0
    assert "group 1: exp(x/y)*Γ(k)" in out
    assert "dy: -x/(y^2)" in out
    assert "(y*k/(x + k), y/(x + k), 0)" in out


def test_solve_deterministic(capsys):
    first = run(capsys, "solve", FIXTURES / "example2.json")
    second = run(capsys, "solve", FIXTURES / "example2.json")
    assert first == second


def test_solve_order_flag(capsys):
    code, out, _ = run(capsys, "solve", FIXTURES / "example2.json",
                       "--order", "d,sx")
    assert code == 0
    certs = [g["certificate"] for g in json.loads(out)["groups"]]
    assert certs == [{"sx": "1", "d": "0"}, {"sx": "1", "d": "2"},
                     {"sx": "e", "d": "0"}, {"sx": "e", "d": "2"}]


def test_solve_rejects_bad_order(capsys):
    code, _, err = run(capsys, "solve", FIXTURES / "example2.json",
                       "--order", "d")
    assert code == 2
    assert "order" in err


def test_solve_caps_surface_incompleteness(capsys):
    code, _, err = run(capsys, "solve", FIXTURES / "example3.json",
                       "--max-degree", "1")
    assert code == 4
    assert err.startswith("incomplete:")
    assert "map 'dx'" in err


def test_solve_missing_file(capsys):
    code, _, err = run(capsys, "solve", "no-such-file.json")
    assert code == 2
    assert err.startswith("error:")


def test_solve_parse_error_position(capsys, tmp_path):
    bad = tmp_path / "trunc.json"
    bad.write_text('{"variables": [')
    code, _, err = run(capsys, "solve", bad)
    assert code == 2
    assert "line 1" in err


# -- verify ------------------------------------------------------------------


def test_round_trip_verify(capsys, tmp_path):
    code, out, _ = run(capsys, "solve", FIXTURES / "example2.json")
    assert code == 0
    rep = write_json(tmp_path / "rep.json", json.loads(out))
    code, out, _ = run(capsys, "verify", FIXTURES / "example2.json", rep,
                       "--format", "pretty")
    assert code == 0
    assert out.splitlines() == [f"group {k}: passed" for k in range(1, 5)]


def test_verify_locates_corruption(capsys, tmp_path):
    code, out, _ = run(capsys, "solve", FIXTURES / "example1.json")
    assert code == 0
    doc = json.loads(out)
    doc["groups"][1]["vectors"][0][2] = "n"
    rep = write_json(tmp_path / "rep.json", doc)
    code, out, _ = run(capsys, "verify", FIXTURES / "example1.json", rep)
    assert code == 5
    report = json.loads(out)["groups"]
    assert report[0]["passed"] is True
    assert report[1]["passed"] is False
    assert {(f["map"], f["row"], f["column"])
            for f in report[1]["failures"]} \
        == {("sn", 2, 0)}


# -- check -------------------------------------------------------------------


def test_check_integrable(capsys):
    code, out, _ = run(capsys, "check", FIXTURES / "example2.json")
    assert code == 0
    assert json.loads(out) == {"integrable": True}


def test_check_reports_violated_pair(capsys, tmp_path):
    broken = corrupted_fixture(tmp_path)
    code, out, _ = run(capsys, "check", broken)
    assert code == 3
    doc = json.loads(out)
    assert doc["integrable"] is False
    assert doc["violations"]
    assert doc["violations"][0]["maps"] == ["sx", "d"]


def test_solve_rejects_non_integrable(capsys, tmp_path):
    broken = corrupted_fixture(tmp_path)
    code, _, err = run(capsys, "solve", broken)
    assert code == 3
    assert "sx" in err and "d" in err


# -- iso ---------------------------------------------------------------------


def test_iso_recovers_witness(capsys, tmp_path):
    doc = dict(ISO_HEADER, f={"sn": "n"}, g={"sn": "n+2"})
    path = write_json(tmp_path / "iso.json", doc)
    code, out, _ = run(capsys, "iso", path)
    assert code == 0
    assert json.loads(out) == {"isomorphic": True, "witness": "1/(n^2 + n)"}


def test_iso_non_isomorphic(capsys, tmp_path):
    doc = dict(ISO_HEADER, f={"sn": "n"}, g={"sn": "x"})
    path = write_json(tmp_path / "iso.json", doc)
    code, out, _ = run(capsys, "iso", path, "--format", "pretty")
    assert code == 0
    assert out.strip() == "non-isomorphic"


def test_iso_requires_all_map_values(capsys, tmp_path):
    doc = dict(ISO_HEADER, f={"sn": "n"}, g={})
    path = write_json(tmp_path / "iso.json", doc)
    code, _, err = run(capsys, "iso", path)
    assert code == 2
    assert "sn" in err


# -- associated --------------------------------------------------------------


def test_associated_converts_structure(capsys, tmp_path):
    doc = {
        "variables": ["x"],
        "parameters": [],
        "maps": [{"name": "d", "kind": "derivation", "action": {"x": 1}}],
        "equations": [{"map": "d", "matrix": [["0", "1"], ["0", "0"]]}],
        "input_kind": "structure",
    }
    path = write_json(tmp_path / "struct.json", doc)
    code, out, _ = run(capsys, "associated", path)
    assert code == 0
    converted = json.loads(out)
    assert converted["input_kind"] == "associated"
    assert converted["equations"] == [
        {"map": "d", "matrix": [["0", "0"], ["-1", "0"]]},
    ]


def test_associated_rejects_singular_structure(capsys, tmp_path):
    doc = {
        "variables": ["n"],
        "parameters": [],
        "maps": [{"name": "s", "kind": "automorphism", "action": {"n": 1}}],
        "equations": [{"map": "s", "matrix": [["0"]]}],
        "input_kind": "structure",
    }
    path = write_json(tmp_path / "struct.json", doc)
    code, _, err = run(capsys, "associated", path)
    assert code == 2
    assert err.startswith("error:")


def test_associated_requires_structure_kind(capsys):
    code, _, err = run(capsys, "associated", FIXTURES / "example1.json")
    assert code == 2
    assert "structure" in err
