import json
import shutil
import subprocess
import sys

import pytest

from clusterfreeze.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_expand_worked_example(capsys):
    code, out, _ = run(capsys, "expand", "--word", "1", "--var", "1", "ex4")
    assert code == 0 and out == "x^(-1,0) + x^(-1,1)\n"


def test_expand_json_and_classical(capsys):
    code, out, _ = run(capsys, "expand", "--word", "1,2", "--var", "2", "--format", "json", "A2")
    body = json.loads(out)
    assert body["word"] == [1, 2] and body["var"] == 2
    code, out, _ = run(capsys, "expand", "--word", "1", "--var", "1", "--classical", "B2")
    assert out == "x^(-1,0) + x^(-1,2)\n"


def test_mutate_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "mutate", "--word", "2 1", "A3")
    path = tmp_path / "seed.json"
    path.write_text(out)
    code, out2, _ = run(capsys, "mutate", "--word", "1 2", str(path))
    assert code == 0
    from clusterfreeze.seed import get_seed
    assert json.loads(out2) == get_seed("A3").to_dict()


def test_gvec_fpoly_cvec(capsys):
    _, out, _ = run(capsys, "gvec", "--word", "1", "ex4")
    assert json.loads(out)["g_vectors"]["1"] == [-1, 0]
    _, out, _ = run(capsys, "fpoly", "--word", "1,2", "--var", "2", "A2")
    assert json.loads(out)["fpoly"] == {"0,0": "1", "1,0": "1", "1,1": "1"}
    _, out, _ = run(capsys, "cvec", "--word", "1", "A2")
    assert json.loads(out)["c_vectors"]["1"] == [-1, 0]


def test_graph_formats(capsys, tmp_path):
    _, out, _ = run(capsys, "graph", "A2")
    body = json.loads(out)
    assert len(body["nodes"]) == 5 and len(body["edges"]) == 5 and body["complete"]
    _, dot, _ = run(capsys, "graph", "--format", "dot", "A2")
    assert dot.startswith("graph exchange {") and dot.count("--") == 5
    svg = tmp_path / "g.svg"
    _, out, _ = run(capsys, "graph", "--format", "svg", "-o", str(svg), "A3")
    assert json.loads(out)["seeds"] == 14 and svg.read_text().lstrip().startswith("<?xml")


def test_freeze_commands(capsys):
    _, out, _ = run(capsys, "freeze", "--freeze", "1", "ex4")
    assert json.loads(out)["unfrozen"] == []
    _, out, _ = run(capsys, "freeze", "--freeze", "1", "--element", "x^(-1,0) + x^(-1,1)",
                    "--degree", "-1,0", "ex4")
    assert out == "x^(-1,0)\n"


def test_scatter_and_theta(capsys):
    _, out, _ = run(capsys, "scatter", "--order", "8", "--check", "5", "A2")
    body = json.loads(out)
    assert body["consistent"] is True
    assert [w for w in body["walls"] if not w["incoming"]] == [
        {"normal": [1, 1], "generators": [["-1", "1"]], "fn": {"1": "1"}, "incoming": False}]
    _, out, _ = run(capsys, "theta", "--m", "-1,0", "--format", "text", "ex4")
    assert out == "x^(-1,0) + x^(-1,1)\n"
    _, out, _ = run(capsys, "theta", "--m", "-1,-1", "--lines", "A2")
    body = json.loads(out)
    # [DERIVED] (-1,-1) spans a reachable chamber, so theta is a cluster monomial there
    from clusterfreeze.bases import cluster_monomial_set
    from clusterfreeze.seed import get_seed
    expected = cluster_monomial_set(get_seed("A2"), 6, quantum=False)[(-1, -1)]
    assert body["theta"] == str(expected)
    assert sum(int(ln["segments"][-1]["coefficient"]) for ln in body["broken_lines"]) == 6


def test_theta_rank_three_uses_chambers(capsys):
    _, out, _ = run(capsys, "theta", "--m", "-1 0 0 0 0 0", "A3")
    assert json.loads(out)["mode"] == "cluster-chamber"


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "worked-example", "ex4")
    assert code == 0 and json.loads(out)["status"] == "verified"
    code, out, _ = run(capsys, "verify", "exchange-graph", "kronecker", "--depth", "3")
    assert code == 2 and json.loads(out)["status"] == "inconclusive"
    code, _, err = run(capsys, "verify", "no-such-theorem", "A2")
    assert code == 1 and "unknown theorem" in err


@pytest.mark.parametrize("argv, message", [
    (["expand", "--var", "3", "A2"], "variable list, item 1: 3 is out of range"),
    (["expand", "--word", "1,x", "--var", "1", "A2"], "word list, item 2"),
    (["expand", "--word", "2", "--var", "1", "ex4"], "vertex 2 is frozen"),
    (["freeze", "--freeze", "2", "ex4"], "not unfrozen"),
    (["gvec", "nosuchseed"], "catalog"),
])
def test_usage_errors(capsys, argv, message):
    code, _, err = run(capsys, *argv)
    assert code == 1 and message in err


def test_malformed_json_reports_location(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 2,\n "B": [[0, 1], [-1, 0]\n}')
    code, _, err = run(capsys, "gvec", str(bad))
    assert code == 1 and f"{bad}:3:1" in err
    bad.write_text('{"n": 2, "B": [[0, 1], [1, 0]], "unfrozen": [1, 2]}')
    code, _, err = run(capsys, "gvec", str(bad))
    assert code == 1 and "skew-symmetrizable" in err


def test_argument_errors_exit_with_one(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["graph", "--depth", "0", "A2"])
    assert exc.value.code == 1


def test_report_writes_figures(capsys, tmp_path):
    out = tmp_path / "rep"
    code, text, _ = run(capsys, "report", "-o", str(out), "A2")
    records = [json.loads(line) for line in text.splitlines()]
    assert code == 0 and [r["artifact"] for r in records] == [
        "exchange-graph", "scattering-diagram", "broken-lines"]
    for r in records:
        with open(r["figure"], "rb") as fh:
            assert fh.read(8) == b"\x89PNG\r\n\x1a\n"


def test_cache(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("CLUSTERFREEZE_CACHE", str(tmp_path))
    _, first, _ = run(capsys, "expand", "--word", "1,2,1", "--var", "1", "A2")
    _, second, _ = run(capsys, "expand", "--word", "1,2,1", "--var", "1", "A2")
    assert first == second and len(list(tmp_path.glob("*.txt"))) == 1


@pytest.mark.skipif(shutil.which("clusterfreeze") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["clusterfreeze", "verify", "worked-example", "ex4"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    proc = subprocess.run([sys.executable, "-m", "clusterfreeze.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.stdout.strip() == "0.1.0"
