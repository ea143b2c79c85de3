import json
import subprocess
import sys

import pytest

from borelforge.cli import main, parse_range, parse_stems
from borelforge.config import ConfigError, RunConfig, load_config, parse_config_text
from borelforge.persist import TreeDocument, export_tree


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, [json.loads(line) for line in out.splitlines() if line]


def test_xi_output_is_compact_json(capsys):
    assert main(["xi", "--m", "2"]) == 0
    out = capsys.readouterr().out
    assert json.loads(out) == {"m": 2, "xi": 3, "Xi": {"terms": [{"a": 3, "q": "1"}], "r": "3"}}
    assert out == '{"m":2,"xi":3,"Xi":{"terms":[{"a":3,"q":"1"}],"r":"3"}}\n'


def test_thick_probe(capsys):
    code, rows = run(["thick", "--j", "1", "--probe", "14"], capsys)
    assert code == 0 and rows[0]["member"] is True and rows[0]["interval"] == 2


def test_point_eval(capsys):
    code, rows = run(["point", "eval", "--path", "", "--coords", "0..3"], capsys)
    assert rows[0]["coords"] == {"0": "7/2", "1": "3", "2": "7/2", "3": "507/2"}


def test_verify_commands_report_config_and_pass(capsys):
    code, rows = run(["--seed", "3", "verify", "lemma1", "--trials", "20"], capsys)
    assert code == 0
    assert rows[0]["config"]["seed"] == 3
    assert rows[-1]["ok"] is True
    code, rows = run(["verify", "claim2", "--stems", "0|1", "--lambda", "2,-2",
                      "--k-from", "260", "--k-count", "5"], capsys)
    assert code == 0 and rows[-1] == {"checked": 5, "ok": True}
    code, rows = run(["verify", "tree", "--depth", "1", "--fanout", "3"], capsys)
    assert code == 0 and rows[-1]["ok"] is True


def test_combination_below_threshold_is_a_failed_check(capsys):
    code, rows = run(["verify", "claim2", "--stems", "0|1", "--lambda", "2,-2",
                      "--k-from", "10", "--k-count", "2"], capsys)
    assert code == 1 and rows[0]["error"] == "RangeTooLow"


def test_hull_commands(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    a.write_text('{"lambda":["1"],"stems":[[]]}')
    b.write_text('{"lambda":["1"],"stems":[[1]]}')
    code, rows = run(["hull", "distinguish", "--a", str(a), "--b", str(b)], capsys)
    assert code == 0 and rows[0]["k"] == 260 and rows[0]["threshold"] == 259
    code, rows = run(["hull", "encode", "--code", str(a), "--coords", "1"], capsys)
    assert rows[0]["coords"] == {"1": "3"}
    c = tmp_path / "c.json"
    c.write_text('{"lambda":["1/10"],"stems":[[]]}')
    code, rows = run(["hull", "distinguish", "--a", str(c), "--b", str(b)], capsys)
    assert code == 1 and rows[0]["error"] == "WindowUnfit"


def test_exit_codes_for_usage_and_io(tmp_path, capsys):
    assert main(["tree", "build", "--depth", "9"]) == 2
    assert main(["tree", "build", "--fanout", "0"]) == 2
    assert main(["--bit-budget", "8", "xi", "--m", "1"]) == 2
    assert main(["hull", "encode", "--code", str(tmp_path / "missing.json"), "--coords", "0"]) == 3
    assert main(["export", "--from", str(tmp_path / "missing.json")]) == 3
    capsys.readouterr()
    with pytest.raises(SystemExit) as err:
        main(["nonsense"])
    assert err.value.code == 2


def test_export_round_trip_is_byte_identical(tmp_path, capsys):
    first = tmp_path / "t.json"
    second = tmp_path / "t2.json"
    assert main(["export", "--depth", "2", "--fanout", "3", "--out", str(first)]) == 0
    assert main(["export", "--from", str(first), "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    doc = TreeDocument.loads(first.read_text())
    assert len(doc.nodes) == 1 + 3 + 9
    assert doc.nodes[1].to_json() == {"path": [0], "l": 4, "M": 1, "window": {"0": "7/2"}}


def test_export_is_deterministic_across_processes(tmp_path):
    cmd = [sys.executable, "-m", "borelforge", "tree", "build", "--depth", "2", "--fanout", "2"]
    outs = {subprocess.run(cmd, capture_output=True, check=True).stdout for _ in range(2)}
    assert len(outs) == 1
    assert outs.pop() == TreeDocument.dumps(export_tree(RunConfig(depth=2, fanout=2))).encode()


def test_config_file_and_overrides(tmp_path, monkeypatch):
    path = tmp_path / "run.cfg"
    path.write_text("# defaults for a bigger run\ndepth = 3\nfanout=5\nout-path = x.json\n")
    cfg = load_config(path, fanout=2, seed=None)
    assert (cfg.depth, cfg.fanout, cfg.out_path, cfg.seed) == (3, 2, "x.json", 0)
    monkeypatch.setenv("BORELFORGE_CONFIG", str(path))
    assert load_config().depth == 3
    with pytest.raises(ConfigError):
        parse_config_text("colour = blue")
    with pytest.raises(ConfigError):
        parse_config_text("depth 3")
    with pytest.raises(ConfigError):
        RunConfig(format="yaml")


def test_argument_parsers():
    assert parse_range("3") == range(3, 4)
    assert list(parse_range("2..4")) == [2, 3, 4]
    assert parse_stems("0|1,2|") == [(0,), (1, 2), ()]
