from __future__ import annotations

import json

import pytest

from cspack import cli, packing, reduction
from cspack.cnf import parse_dimacs

PHI1 = "p cnf 1 2\n1 0\n-1 0\n"
PHI2 = "p cnf 3 2\n1 2 3 0\n-1 -2 -3 0\n"


def write(path, text):
    path.write_text(text)
    return str(path)


def test_gen_cnf_writes_file(tmp_path, capsys):
    out = tmp_path / "f.cnf"
    rc = cli.main(["gen-cnf", "--n", "5", "--m", "10", "--seed", "3", "--output", str(out)])
    assert rc == 0
    formula = parse_dimacs(out.read_text())
    assert formula.num_vars == 5 and formula.num_clauses == 10


def test_gen_cnf_planted_deterministic(tmp_path):
    a = tmp_path / "a.cnf"
    b = tmp_path / "b.cnf"
    assert cli.main(["gen-cnf", "--n", "6", "--m", "9", "--seed", "4", "--planted", "--output", str(a)]) == 0
    assert cli.main(["gen-cnf", "--n", "6", "--m", "9", "--seed", "4", "--planted", "--output", str(b)]) == 0
    assert a.read_text() == b.read_text()


def test_reduce_writes_instance_and_witness(tmp_path, capsys):
    cnf_path = write(tmp_path / "phi1.cnf", PHI1)
    out = tmp_path / "phi1.sp"
    rc = cli.main(["reduce", cnf_path, "--r", "2", "--no-pad", "--output", str(out)])
    assert rc == 0
    text = out.read_text()
    assert text.splitlines()[0] == "p sp 6 2 2"
    inst = packing.parse_instance(text)
    wit = reduction.witness_from_text((tmp_path / "phi1.sp.wit").read_text())
    assert inst.universe_size == wit.layout.universe_size
    printed = capsys.readouterr().out
    assert "universe 6" in printed and "core 2" in printed


def test_reduce_reparse_matches_in_memory(tmp_path):
    cnf_path = write(tmp_path / "phi2.cnf", PHI2)
    out = tmp_path / "phi2.sp"
    assert cli.main(["reduce", cnf_path, "--r", "2", "--pad", "2", "--output", str(out)]) == 0
    formula = parse_dimacs(PHI2)
    inst, _ = reduction.reduce_to_packing(formula, 2, dull_width=2)
    assert packing.parse_instance(out.read_text()) == inst


def test_reduce_r1_with_padding_fails(tmp_path, capsys):
    cnf_path = write(tmp_path / "phi2.cnf", PHI2)
    rc = cli.main(["reduce", cnf_path, "--r", "1", "--pad", "1", "--output", str(tmp_path / "x.sp")])
    assert rc == 1
    assert "padding requires r >= 2" in capsys.readouterr().err


def test_missing_input_file(tmp_path, capsys):
    rc = cli.main(["reduce", str(tmp_path / "nope.cnf"), "--r", "2", "--output", str(tmp_path / "x.sp")])
    assert rc == 1
    assert "nope.cnf" in capsys.readouterr().err


def test_solve_and_verify(tmp_path, capsys):
    cnf_path = write(tmp_path / "phi2.cnf", PHI2)
    out = tmp_path / "phi2.sp"
    cli.main(["reduce", cnf_path, "--r", "2", "--no-pad", "--output", str(out)])
    capsys.readouterr()

    rc = cli.main(["solve", str(out)])
    assert rc == 0
    printed = capsys.readouterr().out
    assert "verdict yes" in printed
    indices = printed.splitlines()[1].split()[1:]

    rc = cli.main(["verify", str(out), *indices])
    assert rc == 0
    assert "valid" in capsys.readouterr().out

    rc = cli.main(["verify", str(out), indices[0], indices[0]])
    assert rc == 2
    assert "duplicate" in capsys.readouterr().out


def test_solve_budget_exit_code(tmp_path, capsys):
    gen = tmp_path / "g.cnf"
    cli.main(["gen-cnf", "--n", "8", "--m", "16", "--seed", "5", "--output", str(gen)])
    out = tmp_path / "g.sp"
    cli.main(["reduce", str(gen), "--r", "2", "--no-pad", "--output", str(out)])
    capsys.readouterr()
    rc = cli.main(["solve", str(out), "--budget", "1"])
    assert rc == 3
    assert "verdict budget" in capsys.readouterr().out


def test_roundtrip_unsat_agrees(tmp_path, capsys):
    cnf_path = write(tmp_path / "phi1.cnf", PHI1)
    rc = cli.main(["roundtrip", cnf_path, "--r", "2", "--no-pad"])
    assert rc == 0
    printed = capsys.readouterr().out
    assert "packing verdict: no" in printed
    assert "oracle verdict:  unsat" in printed
    assert "AGREE" in printed


def test_roundtrip_sat_agrees(tmp_path, capsys):
    cnf_path = write(tmp_path / "phi2.cnf", PHI2)
    rc = cli.main(["roundtrip", cnf_path, "--r", "2"])
    assert rc == 0
    assert "AGREE" in capsys.readouterr().out


def test_roundtrip_planted_instance(tmp_path, capsys):
    gen = tmp_path / "g.cnf"
    cli.main(["gen-cnf", "--n", "8", "--m", "16", "--seed", "5", "--planted", "--output", str(gen)])
    rc = cli.main(["roundtrip", str(gen), "--r", "2", "--no-pad"])
    assert rc == 0
    printed = capsys.readouterr().out
    assert "packing verdict: yes" in printed and "AGREE" in printed


def test_roundtrip_budget_inconclusive(tmp_path, capsys):
    gen = tmp_path / "g.cnf"
    cli.main(["gen-cnf", "--n", "8", "--m", "16", "--seed", "5", "--output", str(gen)])
    rc = cli.main(["roundtrip", str(gen), "--r", "2", "--no-pad", "--budget", "1"])
    assert rc == 3
    assert "INCONCLUSIVE" in capsys.readouterr().out


def test_audit_with_witness(tmp_path, capsys):
    cnf_path = write(tmp_path / "phi2.cnf", PHI2)
    out = tmp_path / "phi2.sp"
    cli.main(["reduce", cnf_path, "--r", "2", "--no-pad", "--output", str(out)])
    capsys.readouterr()
    rc = cli.main(["audit", str(out), "--witness", str(out) + ".wit"])
    assert rc == 0
    printed = capsys.readouterr().out
    assert "ratio" in printed and "breakdown: grid 12 iss 10 dull 0" in printed


def test_bench_writes_csv(tmp_path, capsys):
    config = tmp_path / "sweep.json"
    config.write_text(json.dumps({
        "n_values": [6, 9, 12],
        "r_rule": "log2",
        "instances": 2,
        "seed": 11,
        "density": 2.0,
        "padding": "none",
    }))
    out = tmp_path / "rows.csv"
    rc = cli.main(["bench", str(config), "--output", str(out)])
    assert rc in (0, 3)
    lines = out.read_text().splitlines()
    assert lines[0].startswith("n,m,r,")
    assert len(lines) == 1 + 6
    rs = [int(line.split(",")[2]) for line in lines[1:]]
    assert rs == [3, 3, 4, 4, 4, 4]


def test_bench_bad_config(tmp_path, capsys):
    config = tmp_path / "sweep.json"
    config.write_text(json.dumps({"n_values": []}))
    rc = cli.main(["bench", str(config)])
    assert rc == 1


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["reduce"])  # missing required args
    assert exc.value.code == 1
