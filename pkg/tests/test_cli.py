import json
import subprocess
import sys

import pytest

from pardyn import cli
from pardyn.breaking import VerifyReport


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--format", "json")
    return code, json.loads(out) if out else None, err


def test_cp_chain_three_rank_two(capsys):
    code, rep, _ = run_json(capsys, "cp", "--spec", "chain:3", "--rank", "2")
    assert code == 0
    assert rep["block_sizes"] == [7]
    assert rep["fibers"] == {"x1": 1, "x2": 2, "x3": 4}
    assert [t["measure"] for t in rep["traces"]] == [{"x1": "1/7", "x2": "2/7", "x3": "4/7"}]


def test_measures_conformal_cycle_is_empty(capsys):
    code, rep, _ = run_json(capsys, "measures", "--conformal", "2", "--spec", "cycle:5")
    assert code == 0 and rep["empty"] and rep["vertices"] == [] and rep["affine_dimension"] == -1


def test_measures_invariant_default(capsys):
    code, rep, _ = run_json(capsys, "measures", "--spec", "chain:2+chain:1")
    assert rep["kind"] == "invariant" and len(rep["vertices"]) == 2


def test_verify_blurbs_table(capsys):
    code, out, _ = run(capsys, "verify", "blurbs", "--max-size", "5")
    assert code == 0 and "0 counterexamples" in out


def test_verify_json_schema(capsys):
    code, rep, _ = run_json(capsys, "verify", "minimal-breaks", "--max-size", "4")
    assert code == 0
    assert set(rep) >= {"instances", "counterexamples", "skipped_statements"}


def test_counterexample_exits_two(capsys, monkeypatch):
    bad = VerifyReport(instances=1, counterexamples=[{"index": 0}])
    monkeypatch.setattr(cli, "verify_simplicity", lambda n: bad)
    code, out, _ = run(capsys, "verify", "simplicity")
    assert code == 2 and "1 counterexamples" in out


def test_json_is_byte_stable(capsys):
    outs = [run(capsys, "decompose", "--spec", "chain:2+cycle:3", "--format", "json")[1] for _ in range(2)]
    assert outs[0] == outs[1]


def test_input_file_round_trip(tmp_path, capsys):
    path = tmp_path / "sys.json"
    path.write_text(json.dumps({"points": ["a", "b", "c"], "theta": {"a": "b", "b": "c"}}))
    code, rep, _ = run_json(capsys, "decompose", "--input", str(path))
    assert code == 0
    assert rep["system"] == {"points": ["a", "b", "c"], "theta": {"a": "b", "b": "c"}}
    path.write_text(json.dumps(rep["system"]))
    code2, rep2, _ = run_json(capsys, "decompose", "--input", str(path))
    assert rep2 == rep


def test_rank_file(tmp_path, capsys):
    path = tmp_path / "rank.json"
    path.write_text(json.dumps({"x1": 3, "x2": 2}))
    code, rep, _ = run_json(capsys, "traces", "--spec", "chain:3", "--rank", str(path))
    assert code == 0 and rep["bijection"] and rep["block_sizes"] == [10]


@pytest.mark.parametrize(
    "argv,needle",
    [
        (["cp", "--spec", "cycle:3"], "cycle"),
        (["cp", "--spec", "chain:3", "--rank", "0"], ">= 1"),
        (["decompose"], "exactly one of --spec or --input"),
        (["decompose", "--spec", "blob:1"], "unknown system spec"),
        (["break", "--spec", "chain:3", "--break", "x3"], "domain"),
        (["domains", "--spec", "chain:3", "--horizon", "0"], "horizon"),
        (["measures", "--spec", "chain:3", "--invariant", "--conformal", "2"], "choose one"),
        (["decompose", "--spec", "chain:3", "--format", "xml"], "invalid choice"),
    ],
)
def test_validation_errors_exit_one(capsys, argv, needle):
    code = None
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    _, err = capsys.readouterr()
    assert code == 1
    assert needle in err


def test_bad_input_file_names_field(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"points": ["a", "b"], "theta": {"a": "b", "b": "b"}}))
    code, out, err = run(capsys, "decompose", "--input", str(path))
    assert code == 1 and ("theta" in err or "injective" in err)
    path.write_text("{not json")
    code, out, err = run(capsys, "decompose", "--input", str(path))
    assert code == 1 and "malformed JSON" in err


def test_domains_and_break(capsys):
    code, rep, _ = run_json(capsys, "domains", "--spec", "chain:3", "--horizon", "3")
    assert rep["domains"]["1"] == ["x2", "x3"] and rep["domains"]["-3"] == []
    code, rep, _ = run_json(capsys, "break", "--spec", "cycle:6", "--break", "x0,x3")
    assert rep["traces"]["trace_bijection"] is False
    assert rep["meets_once_and_in_Dgl"] is False


def test_demo_runs(capsys):
    code, rep, _ = run_json(capsys, "demo")
    assert code == 0 and rep["rotation:1009,1,0"]["block_sizes"] == [1009]


def test_help_lists_operation_chains(capsys):
    for verb in cli.COMMANDS:
        with pytest.raises(SystemExit):
            cli.main([verb, "--help"])
        out, _ = capsys.readouterr()
        assert "Runs:" in out


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "pardyn.cli", "cp", "--spec", "chain:3", "--rank", "1", "--format", "json"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["block_sizes"] == [3]
