from __future__ import annotations

import json
import subprocess
import sys

import pytest

from svagen.cli import main
from svagen.corpus import StratumKey, generate_synthetic_corpus
from svagen.index import load
from svagen.kb import read_kb

MODULE_FILE = """\
module top (input clk, input en, input d, output reg q, output reg r);
  always @(posedge clk)
    if (en)
      q <= d;
    else
      q <= q;
  always @(posedge clk)
    r <= d;
endmodule
"""


@pytest.fixture()
def raw_corpus(tmp_path):
    """Raw pairs file with 12 good records, 1 bad-SVA record, 1 malformed line."""
    spec = {
        StratumKey(2, "sync", "if_else"): 6,
        StratumKey(3, "sync", "case"): 6,
    }
    pairs = generate_synthetic_corpus(spec, seed=1)
    path = tmp_path / "raw.jsonl"
    with open(path, "w", encoding="utf-8") as fh:
        for i, (rtl, sva) in enumerate(pairs):
            fh.write(json.dumps({"id": f"r{i}", "rtl": rtl, "sva": sva}) + "\n")
        fh.write(json.dumps({"id": "bad", "rtl": pairs[0][0], "sva": "a && b"}) + "\n")
        fh.write("this is not json\n")
    return str(path)


def test_usage_errors_exit_1(capsys):
    assert main([]) == 1
    assert main(["curate"]) == 1  # missing required arguments
    assert main(["eval"]) == 1
    capsys.readouterr()


def test_missing_file_exits_2(tmp_path, capsys):
    code = main(["curate", str(tmp_path / "absent.jsonl"), "-o", str(tmp_path / "kb.jsonl")])
    assert code == 2
    assert "error:" in capsys.readouterr().err


def test_curate_index_generate_pipeline(tmp_path, raw_corpus, capsys):
    kb_path = str(tmp_path / "kb.jsonl")
    reject_path = str(tmp_path / "rejects.jsonl")
    assert main(["curate", raw_corpus, "-o", kb_path, "--reject-log", reject_path]) == 0
    out = capsys.readouterr().out
    assert "12 accepted, 2 rejected" in out

    entries = read_kb(kb_path)
    assert len(entries) == 12
    assert entries[0].id == "r0"

    with open(reject_path, encoding="utf-8") as fh:
        rejects = [json.loads(line) for line in fh]
    reasons = {r["reason"].split(":")[0] for r in rejects}
    assert reasons == {"sva-syntax", "malformed-record"}

    index_path = str(tmp_path / "kb.idx")
    assert main(["index", kb_path, "-o", index_path, "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload == {"entries": 12, "kind": "exact", "output": index_path}
    assert load(index_path).kind == "exact"

    ivf_path = str(tmp_path / "kb-ivf.idx")
    assert main(["index", kb_path, "-o", ivf_path, "--nlist", "2"]) == 0
    capsys.readouterr()
    assert load(ivf_path).kind == "approx"

    target = tmp_path / "top.v"
    target.write_text(MODULE_FILE, encoding="utf-8")
    gen_path = str(tmp_path / "gen.jsonl")
    assert (
        main(
            [
                "generate", str(target),
                "--kb", kb_path,
                "--index", index_path,
                "-k", "2",
                "--provider", "mock:perfect",
                "--jobs", "1",
                "-o", gen_path,
            ]
        )
        == 0
    )
    capsys.readouterr()
    with open(gen_path, encoding="utf-8") as fh:
        rows = [json.loads(line) for line in fh]
    assert [r["block"] for r in rows] == ["top:0", "top:1"]
    assert rows[0]["path_count"] == 2
    assert len(rows[0]["assertions"]) == 2
    assert len(rows[0]["exemplars"]) == 2
    assert rows[1]["path_count"] == 1
    assert len(rows[1]["assertions"]) == 1


def test_index_is_byte_deterministic(tmp_path, raw_corpus, capsys):
    kb_path = str(tmp_path / "kb.jsonl")
    main(["curate", raw_corpus, "-o", kb_path])
    p1, p2 = str(tmp_path / "a.idx"), str(tmp_path / "b.idx")
    assert main(["index", kb_path, "-o", p1, "--nlist", "2", "--seed", "7"]) == 0
    assert main(["index", kb_path, "-o", p2, "--nlist", "2", "--seed", "7"]) == 0
    capsys.readouterr()
    with open(p1, "rb") as f1, open(p2, "rb") as f2:
        assert f1.read() == f2.read()


def test_eval_retrieval_json(tmp_path, raw_corpus, capsys):
    kb_path = str(tmp_path / "kb.jsonl")
    main(["curate", raw_corpus, "-o", kb_path])
    capsys.readouterr()
    assert main(["eval", "retrieval", "--kb", kb_path, "--json", "--seed", "1"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["schema_version"] == 1
    assert payload["recall_at_n"]["10"] == 1.0
    assert payload["renamed"]["recall_at_n"]["10"] == 1.0


def test_eval_generation_text_output(tmp_path, raw_corpus, capsys):
    kb_path = str(tmp_path / "kb.jsonl")
    main(["curate", raw_corpus, "-o", kb_path])
    capsys.readouterr()
    assert main(["eval", "generation", "--kb", kb_path, "--provider", "mock:perfect"]) == 0
    out = capsys.readouterr().out
    assert "syntax pass rate" in out
    assert "1.0000" in out


def test_eval_collision_and_runtime(tmp_path, capsys):
    assert main(["eval", "collision", "-n", "40", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["n"] == 40
    assert payload["rate"] <= 0.05

    assert main(
        ["eval", "runtime", "--max-size", "120", "--step", "60", "--queries", "2", "--json"]
    ) == 0
    payload = json.loads(capsys.readouterr().out)
    assert [row["size"] for row in payload] == [60, 120]


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "svagen.toml"
    cfg.write_text('[eval.collision]\nn = 30\nseed = 0\n', encoding="utf-8")
    assert main(["--config", str(cfg), "eval", "collision"]) == 0
    assert "over 30 blocks" in capsys.readouterr().out
    # a flag beats the config value; --config also parses after the subcommand
    assert main(["eval", "collision", "--config", str(cfg), "-n", "12"]) == 0
    assert "over 12 blocks" in capsys.readouterr().out


def test_config_can_enable_json(tmp_path, capsys):
    cfg = tmp_path / "svagen.toml"
    cfg.write_text("json = true\n[eval.collision]\nn = 20\n", encoding="utf-8")
    assert main(["--config", str(cfg), "eval", "collision"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["n"] == 20


def test_provider_spec_errors(tmp_path, raw_corpus, capsys, monkeypatch):
    kb_path = str(tmp_path / "kb.jsonl")
    main(["curate", raw_corpus, "-o", kb_path])
    capsys.readouterr()

    monkeypatch.delenv("SVAGEN_API_KEY", raising=False)
    code = main(["eval", "generation", "--kb", kb_path, "--provider", "remote"])
    assert code == 3
    assert "SVAGEN_API_KEY" in capsys.readouterr().err

    monkeypatch.setenv("SVAGEN_API_KEY", "k")
    code = main(["eval", "generation", "--kb", kb_path, "--provider", "remote"])
    assert code == 1  # has a key but no --base-url
    assert "base-url" in capsys.readouterr().err

    code = main(["eval", "generation", "--kb", kb_path, "--provider", "telepathy"])
    assert code == 1
    capsys.readouterr()


def test_module_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "svagen", "eval", "collision", "-n", "15", "--json"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n"] == 15
