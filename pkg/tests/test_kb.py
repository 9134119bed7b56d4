from __future__ import annotations

from dataclasses import replace

import pytest

from svagen.corpus import StratumKey, generate_synthetic_corpus
from svagen.errors import EmptyInput, ParseError
from svagen.kb import (
    curate,
    control_kind,
    parse_rtl_block,
    read_kb,
    stratified_split,
    stratum_key,
    validate_entry,
    write_kb,
)
from svagen.rtl import parse_always

GOOD_RTL = "always @(posedge clk)\n  if (en)\n    q <= d;\n  else\n    q <= q;"
GOOD_SVA = "property p0;\n  @(posedge clk) (en) |-> (q == d);\nendproperty"


def test_curate_accepts_clean_pairs():
    entries, rejected = curate([(GOOD_RTL, GOOD_SVA)])
    assert not rejected
    entry = entries[0]
    assert entry.id == "e000000"
    assert entry.path_count == 2
    assert entry.context_tag == "SYNC_POSEDGE"
    assert entry.control_kind == "if_else"
    assert entry.fingerprint.startswith("SYNC_POSEDGE::if(")
    # sva is stored normalized
    from svagen.sva import normalize_sva

    assert entry.sva_text == normalize_sva(GOOD_SVA)


def test_curate_explicit_ids():
    entries, _ = curate([(GOOD_RTL, GOOD_SVA)], ids=["design_7"])
    assert entries[0].id == "design_7"


def test_curate_rejection_reasons():
    cases = [
        ((GOOD_RTL, "property p; a |-> b)); endproperty"), "sva-syntax: unbalanced-parenthesis"),
        ((GOOD_RTL, "property p; a && b; endproperty"), "sva-syntax: missing-implication"),
        (("module m (input clk); endmodule", GOOD_SVA), "no-always-block"),
        (
            (
                "module m (input clk, output reg a, output reg b);\n"
                "always @(posedge clk) a <= 1;\nalways @(posedge clk) b <= 1;\n"
                "endmodule",
                GOOD_SVA,
            ),
            "multiple-always-blocks",
        ),
        (("always @(posedge clk) q <= ;", GOOD_SVA), "rtl-parse-error"),
        (("", GOOD_SVA), "empty-input"),
        ((GOOD_RTL, ""), "empty-input"),
    ]
    for pair, expected in cases:
        entries, rejected = curate([pair])
        assert not entries
        assert len(rejected) == 1
        (bad_pair, reason) = rejected[0]
        assert bad_pair == pair
        assert reason.startswith(expected), (expected, reason)


def test_curate_rejects_path_explosion():
    lines = ["always @(posedge clk)", "begin"]
    for i in range(34):
        lines.append(f"  if (c{i}) x <= a{i}; else x <= b{i};")
    lines.append("end")
    _, rejected = curate([("\n".join(lines), GOOD_SVA)])
    assert rejected[0][1] == "path-explosion"


def test_parse_rtl_block_accepts_bare_and_module_forms():
    bare = parse_rtl_block(GOOD_RTL)
    wrapped = parse_rtl_block(
        "module m (input clk, input en, input d, output reg q);\n"
        + GOOD_RTL
        + "\nendmodule"
    )
    assert bare.block == wrapped.block
    with pytest.raises(EmptyInput):
        parse_rtl_block("  ")
    with pytest.raises(ParseError):
        parse_rtl_block("module m; endmodule")


def test_control_kind_buckets():
    bodies = {
        "always @* x = a + 1;": "none",
        "always @* if (a) x = 1;": "if_else",
        "always @* case (s) 1: x = 1; endcase": "case",
        "always @* if (a) case (s) 1: x = 1; endcase": "mixed",
    }
    for text, expected in bodies.items():
        assert control_kind(parse_always(text).body) == expected, text


def test_stratum_key_buckets_and_timing(tiny_kb):
    for entry in tiny_kb:
        key = stratum_key(entry)
        assert key.path_bucket == min(entry.path_count, 8)
        assert key.timing == ("async" if entry.context_tag == "ASYNC" else "sync")
        assert key.control_kind == entry.control_kind


def test_synthetic_corpus_lands_in_requested_strata(tiny_kb):
    from collections import Counter

    histogram = Counter(stratum_key(e) for e in tiny_kb)
    assert histogram == {
        StratumKey(1, "sync", "none"): 4,
        StratumKey(2, "sync", "if_else"): 6,
        StratumKey(3, "sync", "mixed"): 5,
        StratumKey(4, "async", "case"): 5,
    }


def test_validate_entry_detects_tampering(tiny_kb):
    entry = tiny_kb[0]
    assert validate_entry(entry) == []
    assert validate_entry(replace(entry, fingerprint="X::nope"))
    assert validate_entry(replace(entry, path_count=entry.path_count + 1))
    assert validate_entry(replace(entry, context_tag="COMB"))
    assert validate_entry(replace(entry, sva_text="property p; a |-> ; endproperty"))
    assert validate_entry(replace(entry, sva_text="PROPERTY p; a |-> b; ENDPROPERTY"))
    assert validate_entry(replace(entry, rtl_text="always @broken"))


def test_write_read_roundtrip(tiny_kb, tmp_path):
    path = str(tmp_path / "kb.jsonl")
    write_kb(tiny_kb, path)
    back = read_kb(path)
    assert [replace(e, embedding=None) for e in tiny_kb] == back


def test_read_kb_reports_line_numbers(tmp_path):
    path = tmp_path / "kb.jsonl"
    path.write_text('{"id": "a"}\nnot json\n', encoding="utf-8")
    with pytest.raises(ValueError) as err:
        read_kb(str(path))
    assert ":1:" in str(err.value)  # first record is missing fields

    path.write_text('not json\n', encoding="utf-8")
    with pytest.raises(ValueError) as err:
        read_kb(str(path))
    assert "not valid JSON" in str(err.value)


def test_stratified_split_properties(tiny_kb):
    knowledge, query = stratified_split(tiny_kb, ratio=(2, 1), seed=3)
    assert len(knowledge) + len(query) == len(tiny_kb)
    assert {e.id for e in knowledge}.isdisjoint(e.id for e in query)
    assert sorted(e.id for e in knowledge + query) == sorted(e.id for e in tiny_kb)
    # per stratum the knowledge share is round(n * 2/3)
    from collections import Counter

    know_hist = Counter(stratum_key(e) for e in knowledge)
    total_hist = Counter(stratum_key(e) for e in tiny_kb)
    for key, n in total_hist.items():
        assert know_hist[key] == round(n * 2 / 3)
    # deterministic
    again = stratified_split(tiny_kb, ratio=(2, 1), seed=3)
    assert ([e.id for e in again[0]], [e.id for e in again[1]]) == (
        [e.id for e in knowledge],
        [e.id for e in query],
    )
    # a different seed moves entries around
    other = stratified_split(tiny_kb, ratio=(2, 1), seed=4)
    assert [e.id for e in other[0]] != [e.id for e in knowledge]


def test_stratified_split_singleton_goes_to_knowledge():
    entries, _ = curate([(GOOD_RTL, GOOD_SVA)])
    knowledge, query = stratified_split(entries)
    assert len(knowledge) == 1 and not query
    with pytest.raises(EmptyInput):
        stratified_split([])
