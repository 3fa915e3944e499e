import json

import pytest

from fimlab.cli import load_config, main, parse_coords


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_build_validate_round_trip(tmp_path, capsys):
    out = tmp_path / "m1.json"
    code, payload = run_cli(
        capsys, "build", "free", "--n", "1", "--window", "3", "-o", str(out)
    )
    assert code == 0 and payload["dims"]["(3,)"] == 3
    code, payload = run_cli(capsys, "validate", str(out))
    assert code == 0 and payload["ok"]


def test_build_tensor_and_functors(tmp_path, capsys):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    t = tmp_path / "t.json"
    run_cli(capsys, "build", "free", "--n", "1", "--window", "2", "-o", str(a))
    run_cli(capsys, "build", "cofree", "--l", "1", "--window", "2", "-o", str(b))
    code, payload = run_cli(capsys, "build", "tensor", str(a), str(b), "-o", str(t))
    assert code == 0
    assert payload["dims"]["(1, 2)"] == 0  # E(1) vanishes above degree 1
    s = tmp_path / "s.json"
    code, payload = run_cli(capsys, "shift", str(a), "-i", "1", "-o", str(s))
    assert code == 0 and payload["dims"]["(1,)"] == 2
    d = tmp_path / "d.json"
    code, payload = run_cli(capsys, "derivative", str(a), "-i", "1", "-o", str(d))
    assert code == 0
    k = tmp_path / "k.json"
    code, payload = run_cli(capsys, "kernel", str(a), "-i", "1", "-o", str(k))
    assert code == 0
    assert all(v == 0 for v in payload["dims"].values())


def test_homology_and_torsion_commands(tmp_path, capsys):
    mod = tmp_path / "e0.json"
    run_cli(capsys, "build", "cofree", "--l", "0", "--window", "3", "-o", str(mod))
    code, payload = run_cli(capsys, "homology", str(mod), "--S", "1")
    assert code == 0
    assert payload["t0"] == 0 and payload["t1"] == 1
    code, payload = run_cli(capsys, "torsion", str(mod), "--S", "1")
    assert code == 0 and payload["status"] in ("EXACT", "WINDOW_BOUNDED")
    assert payload["dims"]["(0,)"] == 1


def test_shift_theorem_command(tmp_path, capsys):
    mod = tmp_path / "m.json"
    run_cli(capsys, "build", "free", "--n", "1", "--window", "4", "-o", str(mod))
    code, payload = run_cli(
        capsys, "shift-theorem", str(mod), "--S", "1", "--max-n", "2"
    )
    assert code == 0 and payload["n"] == 0


def test_cogenerate_and_endring_commands(tmp_path, capsys):
    mod = tmp_path / "m.json"
    run_cli(capsys, "build", "free", "--n", "1", "--window", "3", "-o", str(mod))
    code, payload = run_cli(capsys, "cogenerate", str(mod), "--max-shift", "1")
    assert code == 0 and payload["verified"]
    code, payload = run_cli(capsys, "endring", str(mod))
    assert code == 0 and payload["dim"] == 1 and payload["is_local"]


def test_verify_paper_single_suite(capsys):
    code, payload = run_cli(capsys, "verify-paper", "--suite", "roundtrip")
    assert code == 0 and payload["passed"]
    names = [s["suite"] for s in payload["suites"]]
    assert names == ["roundtrip"]


def test_verify_paper_alias(capsys):
    code, payload = run_cli(capsys, "verify-paper", "--suite", "lemma2.8")
    assert code == 0
    assert payload["suites"][0]["suite"] == "degree"


def test_unknown_suite_fails(capsys):
    code, payload = run_cli(capsys, "verify-paper", "--suite", "bogus")
    assert code == 2 and "error" in payload


def test_config_parsing(tmp_path):
    cfg = tmp_path / "fimlab.cfg"
    cfg.write_text("# sample\nwindow = 3,3\nm = 2\nseed = 11\n")
    conf = load_config(str(cfg))
    assert conf == {"window": "3,3", "m": "2", "seed": "11"}
    assert parse_coords(conf["window"]) == (3, 3)


def test_group_file_build(tmp_path, capsys):
    from fimlab.category import GroupTable

    gpath = tmp_path / "s2.json"
    gpath.write_text(json.dumps(GroupTable.symmetric(2).to_dict()))
    out = tmp_path / "mg.json"
    code, payload = run_cli(
        capsys, "build", "free", "--n", "0", "--window", "2",
        "--group", str(gpath), "-o", str(out),
    )
    assert code == 0 and payload["dims"]["(1,)"] == 2
