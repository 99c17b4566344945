import json
import subprocess

import pytest
from fractions import Fraction

from unirdc import BINARY, binary_entropy, build_universal_table, sphere_mass, hamming
from unirdc.cli import run


def invoke(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_help_exits_zero(capsys):
    assert run(["--help"]) == 0
    capsys.readouterr()


def test_unknown_subcommand_exits_two(capsys):
    assert run(["frobnicate"]) == 2
    capsys.readouterr()


def test_lz_length_csv(tmp_path, capsys):
    p = tmp_path / "blocks.txt"
    p.write_text("abbabaabbaaabaa\naaaa\n")
    code, out = invoke(
        capsys, "lz-length", "--alphabet", "ab", "--in", str(p)
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "index,c,bits,final_duplicate"
    assert lines[1] == "0,8,24,True"
    assert lines[2] == "1,3,5,True"


def test_lz_length_json(tmp_path, capsys):
    p = tmp_path / "blocks.txt"
    p.write_text("01\n")
    code, out = invoke(
        capsys, "lz-length", "--alphabet", "01", "--in", str(p), "--format", "json"
    )
    assert code == 0
    assert json.loads(out) == [
        {"index": 0, "c": 2, "bits": 3, "final_duplicate": False}
    ]


def test_sample_deterministic(capsys):
    args = ["sample", "--alphabet", "01", "--n", "6", "--seed", "5", "--count", "8"]
    code1, out1 = invoke(capsys, *args)
    code2, out2 = invoke(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    assert len(out1.splitlines()) == 8
    assert all(len(line) == 6 and set(line) <= {"0", "1"} for line in out1.splitlines())
    _, out3 = invoke(capsys, *args[:-4], "--seed", "6", "--count", "8")
    assert out3 != out1


def test_sample_bitfeed_mode(capsys):
    code, out = invoke(
        capsys, "sample", "--alphabet", "01", "--n", "4", "--seed", "1",
        "--count", "3", "--mode", "bitfeed",
    )
    assert code == 0
    assert len(out.splitlines()) == 3


def test_sphere_mass_output(tmp_path, capsys):
    p = tmp_path / "blocks.txt"
    p.write_text("0000\n")
    code, out = invoke(
        capsys, "sphere-mass", "--alphabet", "01", "--in", str(p), "--D", "1/4",
        "--format", "json",
    )
    assert code == 0
    row = json.loads(out)[0]
    t = build_universal_table(4, 2, "plain")
    m = sphere_mass(BINARY.to_block("0000"), Fraction(1, 4), hamming(BINARY), t)
    assert row["mass"] == str(m.mass)
    assert row["sphere_size"] == 5


def test_encode_decode_round_trip(tmp_path, capsys):
    blocks = tmp_path / "blocks.txt"
    blocks.write_text("011010\n000000\n111100\n")
    container = tmp_path / "out.bin"
    code, _ = invoke(
        capsys, "encode", "--alphabet", "01", "--in", str(blocks), "--D", "1/6",
        "--seed", "42", "--out", str(container),
    )
    assert code == 0
    assert container.read_bytes()[:2] == b"UR"
    code, out = invoke(capsys, "decode", "--alphabet", "01", "--in", str(container))
    assert code == 0
    decoded = out.splitlines()
    originals = ["011010", "000000", "111100"]
    for x, y in zip(originals, decoded):
        assert sum(a != b for a, b in zip(x, y)) <= 1  # semifaithful at D=1/6


def test_encode_decode_pipe():
    cmd = (
        "printf '0110\\n0011\\n' | "
        "unirdc encode --alphabet 01 --in - --D 1/4 --seed 3 --out - | "
        "unirdc decode --alphabet 01 --in -"
    )
    out = subprocess.run(
        cmd, shell=True, capture_output=True, text=True, check=True
    ).stdout
    assert len(out.splitlines()) == 2


def test_rd_curve(capsys):
    code, out = invoke(
        capsys, "rd-curve", "--alphabet", "01", "--grid", "1/10:3/10:1/10"
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "D,R,E,minus_log_U_mass_over_n"
    first = lines[1].split(",")
    assert first[0] == "1/10"
    assert float(first[1]) == pytest.approx(1 - binary_entropy(0.1), abs=1e-6)
    assert float(first[2]) == pytest.approx(binary_entropy(0.1), abs=1e-6)


def test_rd_curve_with_mass_column(capsys):
    code, out = invoke(
        capsys, "rd-curve", "--alphabet", "01", "--grid", "1/4:1/4:1/4",
        "--source", "010101",
    )
    assert code == 0
    val = out.splitlines()[1].split(",")[3]
    t = build_universal_table(6, 2, "plain")
    m = sphere_mass(BINARY.to_block("010101"), Fraction(1, 4), hamming(BINARY), t)
    assert float(val) == pytest.approx(m.neg_log2_mass() / 6)


def test_converse_check_wire_keys(capsys):
    code, out = invoke(
        capsys, "converse-check", "--alphabet", "01", "--n", "6", "--D", "1/6",
        "--epsilon", "1.0", "--type-counts", '{"0": 3, "1": 3}',
    )
    assert code == 0
    data = json.loads(out)
    assert set(data) == {
        "M0", "M_greedy", "Delta", "delta", "S_ell", "identity_ok",
        "uq2lz_worst_slack",
    }
    assert data["M0"] == "5"
    assert data["identity_ok"] is True
    assert data["S_ell"] == 3


def test_counting_seq(capsys):
    code, out = invoke(capsys, "counting-seq", "--alphabet", "01", "--depth", "2")
    assert code == 0
    data = json.loads(out)
    assert data["n"] == 10 and data["c"] == 6 and data["bits"] == 17
    assert data["block"] == "0100011011"


def test_experiment_subcommand(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "experiment": "converse", "n": 6, "level": "1/6", "epsilon": 1.0,
        "type_counts": {"0": 3, "1": 3},
    }))
    code, out = invoke(capsys, "experiment", "--config", str(cfg))
    assert code == 0
    data = json.loads(out)
    assert data["min_codebook_size"] == "5"
    assert data["schema_version"] == "1"


def test_experiment_requires_name(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"n": 4}')
    code, out = invoke(capsys, "experiment", "--config", str(cfg))
    assert code == 2
    assert json.loads(out)["error"]["code"] == "precondition"


def test_bad_alphabet_is_precondition_error(tmp_path, capsys):
    p = tmp_path / "b.txt"
    p.write_text("aa\n")
    code, out = invoke(capsys, "lz-length", "--alphabet", "aa", "--in", str(p))
    assert code == 2
    err = json.loads(out)["error"]
    assert err["code"] == "precondition"


def test_missing_file_is_precondition_error(capsys):
    code, out = invoke(capsys, "lz-length", "--alphabet", "01", "--in", "/no/such/file")
    assert code == 2
    assert json.loads(out)["error"]["code"] == "precondition"


def test_corrupt_container_is_runtime_error(tmp_path, capsys):
    bad = tmp_path / "bad.bin"
    bad.write_bytes(b"XX not a container")
    code, out = invoke(capsys, "decode", "--alphabet", "01", "--in", str(bad))
    assert code == 1
    assert json.loads(out)["error"]["code"] == "corrupt_stream"


def test_enumeration_cap_is_runtime_error(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("UNIRDC_CAP", "8")
    code, out = invoke(
        capsys, "sample", "--alphabet", "01", "--n", "5", "--seed", "1"
    )
    assert code == 1
    assert json.loads(out)["error"]["code"] == "enumeration_cap"


def test_installed_entry_point():
    out = subprocess.run(
        ["unirdc", "counting-seq", "--alphabet", "01", "--depth", "1"],
        capture_output=True, text=True,
    )
    assert out.returncode == 0
    assert json.loads(out.stdout)["block"] == "01"
