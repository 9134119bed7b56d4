from __future__ import annotations

import pytest

from svagen.errors import UnresolvedHit
from svagen.index import SearchHit
from svagen.kb import parse_rtl_block
from svagen.prompting import (
    build_prompt,
    default_template,
    extract_path_count,
    extract_target_rtl,
    parse_llm_output,
)

TARGET = parse_rtl_block(
    "always @(posedge clk)\n  if (en)\n    q <= d;\n  else\n    q <= q;"
)


def _hits(*ids):
    return [SearchHit(id=i, score=1.0 - n * 0.1, rank=n + 1) for n, i in enumerate(ids)]


def test_prompt_carries_exemplars_and_path_count(tiny_kb):
    ids = [e.id for e in tiny_kb[:3]]
    bundle = build_prompt(_hits(*ids), tiny_kb, TARGET, k=3)
    assert bundle.exec_path_count == 2
    assert bundle.rendered.count("— RTL:") == 3
    assert bundle.rendered.count("— SVA:") == 3
    for entry in tiny_kb[:3]:
        assert entry.rtl_text in bundle.rendered
        assert entry.sva_text in bundle.rendered
    # the instruction names the path count in both slots
    assert "Target code has 2 execution paths" in bundle.rendered
    assert "generate exactly 2 assertions" in bundle.rendered
    assert bundle.target_rtl in bundle.rendered


def test_zero_shot_prompt_has_no_examples(tiny_kb):
    bundle = build_prompt(_hits(tiny_kb[0].id), tiny_kb, TARGET, k=0)
    assert "Example" not in bundle.rendered
    assert bundle.exemplars == ()


def test_fewer_hits_than_k(tiny_kb):
    bundle = build_prompt(_hits(tiny_kb[0].id), tiny_kb, TARGET, k=5)
    assert len(bundle.exemplars) == 1
    assert bundle.rendered.count("— RTL:") == 1


def test_unresolved_hit_raises(tiny_kb):
    with pytest.raises(UnresolvedHit) as err:
        build_prompt(_hits("ghost"), tiny_kb, TARGET, k=1)
    assert err.value.entry_id == "ghost"
    with pytest.raises(ValueError):
        build_prompt([], tiny_kb, TARGET, k=-1)


def test_mapping_kb_accepted(tiny_kb):
    by_id = {e.id: e for e in tiny_kb}
    a = build_prompt(_hits(tiny_kb[0].id), by_id, TARGET, k=1)
    b = build_prompt(_hits(tiny_kb[0].id), tiny_kb, TARGET, k=1)
    assert a.rendered == b.rendered  # byte identical regardless of kb shape


def test_custom_template():
    bundle = build_prompt([], [], TARGET, k=0, template="N={{EXEC_PATHS}}|{{EXAMPLES}}|")
    assert bundle.rendered == "N=2||"


def test_template_roundtrip_extractors(tiny_kb):
    bundle = build_prompt(_hits(tiny_kb[0].id), tiny_kb, TARGET, k=1)
    assert extract_target_rtl(bundle.rendered) == TARGET.rtl_text
    assert extract_path_count(bundle.rendered) == 2
    with pytest.raises(ValueError):
        extract_target_rtl("no sections here")
    with pytest.raises(ValueError):
        extract_path_count("no sections here")


def test_default_template_has_required_slots():
    text = default_template()
    for slot in ("{{EXAMPLES}}", "{{TARGET_RTL}}", "{{EXEC_PATHS}}"):
        assert slot in text
    assert "CRITICAL INSTRUCTION" in text


def test_parse_llm_output_property_spans():
    raw = (
        "Here are the assertions:\n"
        "property p1;\n  a |-> b;\nendproperty\n"
        "some chatter\n"
        "property p2;\n  c |-> d;\nendproperty\n"
    )
    out = parse_llm_output(raw)
    assert len(out) == 2
    assert out[0].startswith("property p1;")
    assert out[0].endswith("endproperty")
    assert out[1].startswith("property p2;")


def test_parse_llm_output_assert_statements():
    raw = "assert property (a |-> (b && c));\nnoise\nassert property (d |=> e)"
    out = parse_llm_output(raw)
    assert out == ["assert property (a |-> (b && c));", "assert property (d |=> e)"]


def test_parse_llm_output_skips_nested_and_unterminated():
    raw = (
        "property p1;\n  x |-> y;\nendproperty\n"
        "assert property (p1);\n"  # standalone, outside the span above
        "property broken_without_end;\n  a |-> b;\n"
    )
    out = parse_llm_output(raw)
    assert len(out) == 2
    assert out[1] == "assert property (p1);"

    # an assert inside a property span is not double-counted
    combined = "property p;\n a |-> b;\nendproperty\nassert property (p);"
    assert len(parse_llm_output(combined)) == 2
    assert parse_llm_output("") == []


def test_parse_llm_output_preserves_position_order():
    raw = "assert property (x);\nproperty p;\n a |-> b;\nendproperty"
    out = parse_llm_output(raw)
    assert out[0].startswith("assert")
    assert out[1].startswith("property")
