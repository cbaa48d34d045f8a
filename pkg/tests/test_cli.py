import json

import pytest

from rspolar.cli import main


def run_cli(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture()
def seq_file(tmp_path, capsys):
    path = tmp_path / "seq.json"
    code, _, err = run_cli(capsys, "construct", "--q", "4", "--m", "2",
                           "--beta", "1.512", "--out", str(path))
    assert code == 0, err
    return str(path)


def test_construct_writes_schema(seq_file):
    doc = json.loads(open(seq_file).read())
    assert doc["q"] == 4 and doc["m"] == 2 and doc["method"] == "pdpw"
    assert doc["beta"] == 1.512
    assert len(doc["weights"]) == 16 and sorted(doc["order"]) == list(range(16))
    assert doc["zeta"] == [0.0, 0.7097, 0.8782, 1.0]


def test_construct_mc_method(tmp_path, capsys):
    path = tmp_path / "mc.json"
    code, _, _ = run_cli(capsys, "construct", "--q", "4", "--m", "1",
                         "--method", "mc", "--trials", "2000", "--out", str(path))
    assert code == 0
    doc = json.loads(open(path).read())
    assert doc["method"] == "mc" and doc["beta"] is None


def test_encode_decode_roundtrip(seq_file, capsys):
    code, out, _ = run_cli(capsys, "encode", "--seq", seq_file, "--k-bits", "16",
                           "--info", "ab")
    assert code == 0
    cw_hex = out.strip()
    assert len(cw_hex) == 8            # 32 bits
    code, out, _ = run_cli(capsys, "decode", "--seq", seq_file, "--k-bits", "16",
                           "--received", cw_hex, "--ebn0", "6")
    assert code == 0
    doc = json.loads(out)
    assert doc["payload_hex"] == "ab" and doc["crc_ok"]


def test_encode_rejects_oversized_hex(seq_file, capsys):
    code, _, err = run_cli(capsys, "encode", "--seq", seq_file, "--k-bits", "16",
                           "--info", "fff")
    assert code == 2 and "error" in err


def test_ratematch_schema(seq_file, capsys):
    code, out, _ = run_cli(capsys, "ratematch", "--scheme", "mpwp", "--seq", seq_file,
                           "--k-bits", "16", "--nb", "32", "--mb", "27")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"full_symbols", "partial", "bits"}
    assert len(doc["bits"]) == 5
    assert doc["partial"]["sigma"] == 1


def test_po_check_relation(capsys):
    code, out, _ = run_cli(capsys, "po-check", "--m", "3", "--i", "25", "--j", "29")
    assert code == 0 and out.strip() == "29 dominates 25"
    code, out, _ = run_cli(capsys, "po-check", "--m", "2", "--i", "3", "--j", "8")
    assert out.strip() == "incomparable"


def test_po_check_list(capsys):
    code, out, _ = run_cli(capsys, "po-check", "--m", "1", "--list")
    lines = out.strip().splitlines()
    assert lines[0] == "i,j"
    assert len(lines) == 7            # 6 pairs in the single-layer chain
    assert "0,3" in lines


def test_simulate_from_config(tmp_path, capsys):
    cfg = {
        "q": 4, "m": 2, "k_info_bits": 16, "crc_width": 8, "list_size": 2,
        "construction": "pdpw", "beta": 1.512, "zeta": None,
        "design_eb_n0_db": -1.8, "mc_trials": 1000, "construction_seed": 0,
        "ratematch": "none", "m_bits": None, "eb_n0_grid": [3.0, 5.0],
        "max_trials": 100, "max_block_errors": 20, "master_seed": 4,
        "worker_count": 1,
    }
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out_path = tmp_path / "out.csv"
    code, out, _ = run_cli(capsys, "simulate", "--config", str(cfg_path),
                           "--out", str(out_path), "--json", str(tmp_path / "out.json"))
    assert code == 0
    rows = out_path.read_text().strip().splitlines()
    assert len(rows) == 3
    assert "bler" in out


def test_simulate_infeasible_config_exit_code(tmp_path, capsys):
    cfg = {"q": 4, "m": 2, "k_info_bits": 15, "eb_n0_grid": [2.0]}
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text(json.dumps(cfg))
    code, _, err = run_cli(capsys, "simulate", "--config", str(cfg_path),
                           "--out", str(tmp_path / "o.csv"))
    assert code == 2
    assert "error" in err
