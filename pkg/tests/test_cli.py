import json

import pytest

from qrewrite.cli import cli_main


@pytest.fixture
def bell_file(tmp_path):
    path = tmp_path / "bell.cqc"
    path.write_text("qubits 2\nh q0\ncx q0 q1\n")
    return str(path)


@pytest.fixture
def run(capsys):
    def _run(*argv):
        code = cli_main(list(argv))
        captured = capsys.readouterr()
        return code, captured.out, captured.err
    return _run


def test_parse_canonicalizes(run, tmp_path):
    path = tmp_path / "c.cqc"
    path.write_text("qubits 2\n# comment\nmcz q1 q0\n")
    code, out, _ = run("parse", "--file", str(path))
    assert code == 0
    assert out.strip() == "qubits 2\ncz q0 q1"


def test_parse_error_exit_code_one(run, tmp_path):
    path = tmp_path / "bad.cqc"
    path.write_text("qubits 1\nwat q0\n")
    code, _, err = run("parse", "--file", str(path))
    assert code == 1
    assert "line 2" in err


def test_usage_error_exit_code_two():
    with pytest.raises(SystemExit) as err:
        cli_main(["parse"])  # missing --file
    assert err.value.code == 2


def test_render_ascii(run, bell_file):
    code, out, _ = run("render", "--file", bell_file)
    assert code == 0
    assert "H" in out and "q1" in out


def test_render_svg(run, bell_file):
    code, out, _ = run("render", "--file", bell_file, "--format", "svg")
    assert code == 0 and out.startswith("<svg")


def test_simulate_json(run, bell_file):
    code, out, _ = run("simulate", "--file", bell_file, "--json")
    assert code == 0
    entries = json.loads(out)["amplitudes"]
    assert {e["basis"] for e in entries} == {"00", "11"}


def test_sample_json(run, tmp_path):
    path = tmp_path / "m.cqc"
    path.write_text("qubits 1\nbits 1\nx q0\nmeasure q0 -> c0\n")
    code, out, _ = run("sample", "--file", str(path), "--shots", "32",
                       "--seed", "1", "--json")
    assert code == 0
    assert json.loads(out) == {"1": 32}


def test_verify_equiv(run, tmp_path):
    a = tmp_path / "a.cqc"
    b = tmp_path / "b.cqc"
    a.write_text("qubits 1\nh q0\nz q0\nh q0\n")
    b.write_text("qubits 1\nx q0\n")
    code, out, _ = run("verify-equiv", "--file", str(a), "--other", str(b))
    assert code == 0 and "equivalent" in out
    b.write_text("qubits 1\nz q0\n")
    code, out, _ = run("verify-equiv", "--file", str(a), "--other", str(b))
    assert code == 1 and "NOT" in out


def test_classify_json(run, bell_file):
    code, out, _ = run("classify", "--file", bell_file, "--json")
    assert code == 0
    verdict = json.loads(out)
    assert verdict["family"] == "III"


def test_rules_list(run):
    code, out, _ = run("rules", "list")
    assert code == 0
    assert "HZH_TO_X" in out and "MCZ_EXHAUSTION_MERGE" in out


def test_matches_and_apply(run, tmp_path):
    path = tmp_path / "c.cqc"
    path.write_text("qubits 1\nh q0\nz q0\nh q0\n")
    code, out, _ = run("matches", "--file", str(path), "--rule", "HZH_TO_X",
                       "--json")
    assert code == 0
    match = json.loads(out)[0]
    code, out, _ = run("apply", "--file", str(path), "--rule", "HZH_TO_X",
                       "--at", ",".join(str(k) for k in match["at"]),
                       "--wires", "0")
    assert code == 0
    assert out.strip() == "qubits 1\nx q0"


def test_normalize(run, tmp_path):
    path = tmp_path / "c.cqc"
    path.write_text("qubits 2\nh q0\nh q0\nx q1\n")
    code, out, _ = run("normalize", "--file", str(path))
    assert code == 0
    assert out.strip() == "qubits 2\nx q1"


def test_derive_bv_prints_six_snapshots(run):
    code, out, _ = run("derive", "bv", "--secret", "101")
    assert code == 0
    assert out.count("---") == 12  # six labelled snapshot headers
    assert "all steps equivalent" in out


def test_derive_bv_json(run):
    code, out, _ = run("derive", "bv", "--secret", "11", "--json")
    assert code == 0
    payload = json.loads(out)
    assert len(payload["snapshots"]) == 6
    assert payload["all_verified"] is True
    assert payload["final_cqc"].startswith("qubits 3")


def test_derive_dj(run):
    code, out, _ = run("derive", "dj")
    assert code == 0
    assert "irreducible" in out
    assert "cz q0 q1" in out and "z q2" in out


def test_derive_trace_replays(run, tmp_path):
    code, out, _ = run("derive", "bv", "--secret", "10", "--trace",
                       "--no-verify")
    assert code == 0
    path = tmp_path / "trace.txt"
    path.write_text(out)
    code, out, _ = run("replay", "--file", str(path))
    assert code == 0 and "replayed" in out


def test_identities(run):
    code, out, _ = run("identities")
    assert code == 0
    assert "h z h = x" in out and "FAIL" not in out
