"""Command line interface: exit codes, artifacts, determinism."""

import json
import subprocess
import sys

import pytest

from qdimul import __version__
from qdimul.cli import main, parse_delay_model
from qdimul.netlist import GateKind, deserialize
from qdimul.sim import DelayModel


def run_main(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def gen_netlist(tmp_path, name="m.json", extra=()):
    path = tmp_path / name
    assert main(["gen", "--n", "2", "--out", str(path), *extra]) == 0
    return path


def test_parse_delay_model_unit():
    assert parse_delay_model("unit", 0) == DelayModel.unit()


def test_parse_delay_model_random():
    dm = parse_delay_model("random:2,9", 7)
    assert dm == DelayModel.random_per_gate(2, 9, 7)


def test_parse_delay_model_table(tmp_path):
    path = tmp_path / "delays.json"
    path.write_text(json.dumps({"c2": 3, "or2": 1}))
    dm = parse_delay_model(f"table:{path}", 0)
    assert dm.delay_of(5, GateKind.C2) == 3
    assert dm.delay_of(5, GateKind.OR2) == 1


def test_parse_delay_model_errors(tmp_path):
    from qdimul.cli import UsageError

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    for text in ("gaussian", "table:", "table:/no/such/file",
                 f"table:{bad}", "random:5", "random:a,b"):
        with pytest.raises(UsageError):
            parse_delay_model(text, 0)


def test_gen_writes_valid_netlist(tmp_path):
    path = gen_netlist(tmp_path)
    netlist = deserialize(path.read_text())
    assert netlist.validate() == []
    assert netlist.meta["run"]["command"] == "gen"
    assert netlist.meta["n"] == 2


def test_gen_is_deterministic(tmp_path):
    a = gen_netlist(tmp_path, "a.json")
    b = gen_netlist(tmp_path, "b.json")
    assert a.read_bytes() == b.read_bytes()


def test_gen_rejects_unknown_adder(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["gen", "--n", "2", "--adder", "carry4"])
    assert exc.value.code == 2


def test_sim_single_pair_csv(tmp_path, capsys):
    path = gen_netlist(tmp_path)
    code, out, _ = run_main(["sim", "--netlist", str(path), "--a", "3", "--b", "2"],
                            capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "a,b,product,forward,reverse,cycle,transitions"
    assert lines[1].startswith("3,2,6,")


def test_sim_pairs_json_payload(tmp_path, capsys):
    path = gen_netlist(tmp_path)
    code, out, _ = run_main(
        ["sim", "--netlist", str(path), "--pairs", "3x3,1x2", "--json"], capsys)
    assert code == 0
    payload = json.loads(out)
    assert payload["run"]["command"] == "sim"
    assert [r["product"] for r in payload["reports"]] == [9, 2]


def test_sim_requires_operands(tmp_path):
    path = gen_netlist(tmp_path)
    with pytest.raises(SystemExit) as exc:
        main(["sim", "--netlist", str(path)])
    assert exc.value.code == 2


def test_sim_rejects_oversized_pair(tmp_path):
    path = gen_netlist(tmp_path)
    with pytest.raises(SystemExit) as exc:
        main(["sim", "--netlist", str(path), "--pairs", "9x1"])
    assert exc.value.code == 2


def test_sim_missing_netlist_is_an_io_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sim", "--netlist", "/no/such.json", "--a", "1", "--b", "1"])
    assert exc.value.code == 2


def test_sim_trace_csv_and_vcd(tmp_path, capsys):
    path = gen_netlist(tmp_path)
    csv_path = tmp_path / "t.csv"
    vcd_path = tmp_path / "t.vcd"
    base = ["sim", "--netlist", str(path), "--a", "1", "--b", "3"]
    assert main([*base, "--trace", str(csv_path), "--out", str(tmp_path / "o1")]) == 0
    assert main([*base, "--trace", str(vcd_path), "--out", str(tmp_path / "o2")]) == 0
    assert csv_path.read_text().splitlines()[0] == "time,net,level,cause"
    assert "$dumpvars" in vcd_path.read_text()


def test_verify_green_exit_zero(tmp_path, capsys):
    path = gen_netlist(tmp_path)
    code, out, _ = run_main(
        ["verify", "--netlist", str(path), "--checks", "functional,duality"], capsys)
    assert code == 0
    assert out.count("PASS") == 2 and "FAIL" not in out


def test_verify_red_exit_one_with_counterexample(tmp_path, capsys):
    path = gen_netlist(tmp_path)
    netlist = deserialize(path.read_text())
    from qdimul.verify import swap_port_rails
    from qdimul.netlist import serialize

    broken = tmp_path / "broken.json"
    broken.write_text(serialize(swap_port_rails(netlist)))
    code, out, _ = run_main(
        ["verify", "--netlist", str(broken), "--checks", "functional"], capsys)
    assert code == 1
    assert "FAIL functional" in out
    assert "counterexample" in out


def test_verify_json_artifact(tmp_path, capsys):
    path = gen_netlist(tmp_path)
    artifact = tmp_path / "verify.json"
    code, _, err = run_main(
        ["verify", "--netlist", str(path), "--checks", "functional",
         "--json", "--out", str(artifact)], capsys)
    assert code == 0
    payload = json.loads(artifact.read_text())
    assert payload["checks"][0]["check"] == "functional"
    assert payload["checks"][0]["passed"] is True
    assert "PASS functional" in err


def test_verify_unknown_check(tmp_path):
    path = gen_netlist(tmp_path)
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--netlist", str(path), "--checks", "vibes"])
    assert exc.value.code == 2


def test_bench_table_and_determinism(tmp_path, capsys):
    argv = ["bench", "--n", "2", "--samples", "8"]
    code, first, _ = run_main(argv, capsys)
    assert code == 0
    assert "design" in first.splitlines()[0]
    assert "weak-rtz-2x2" in first and "dims-rtz-2x2" in first
    _, second, _ = run_main(argv, capsys)
    assert first == second


def test_bench_json_then_report_merge(tmp_path, capsys):
    rtz = tmp_path / "rtz.json"
    rto = tmp_path / "rto.json"
    base = ["bench", "--n", "2", "--samples", "8", "--json"]
    assert main([*base, "--protocol", "rtz", "--out", str(rtz)]) == 0
    assert main([*base, "--protocol", "rto", "--out", str(rto)]) == 0
    code, out, _ = run_main(["report", str(rtz), str(rto)], capsys)
    assert code == 0
    body = out.splitlines()[2:]
    assert len(body) == 4
    assert any("rto" in line for line in body) and any("rtz" in line for line in body)


def test_report_rejects_empty_payload(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text(json.dumps({"rows": []}))
    with pytest.raises(SystemExit) as exc:
        main(["report", str(empty)])
    assert exc.value.code == 2


def test_installed_entry_point_version():
    proc = subprocess.run([sys.executable, "-m", "qdimul.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.strip() == f"qdimul {__version__}"
