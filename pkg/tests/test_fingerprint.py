from __future__ import annotations

import random

from svagen.corpus import generate_distinct_blocks, generate_random_block
from svagen.evaluation import rename_identifiers
from svagen.fingerprint import collision_rate, context_tag, fingerprint
from svagen.kb import parse_rtl_block
from svagen.rtl import SensEntry, SensitivityList, block_from_always, parse_always

REFERENCE_TEXT = """always @(posedge clk)
  if (en && rst)
    q <= a + b;
  else
    y = c;"""

REFERENCE_FP = (
    "SYNC_POSEDGE::if(dpth:1,brnch:2)"
    "[then:block(nb_asgn:1,b_asgn:0,ops:{&&:1,+:1})]"
    "[else:block(nb_asgn:0,b_asgn:1,ops:{})]"
)


def test_reference_fingerprint_byte_exact():
    fp = fingerprint(parse_always(REFERENCE_TEXT))
    assert fp.full == REFERENCE_FP
    assert fp.tag == "SYNC_POSEDGE"
    assert str(fp) == fp.full


def test_context_tag_classification():
    cases = {
        "@(posedge clk)": "SYNC_POSEDGE",
        "@(negedge clk)": "SYNC_NEGEDGE",
        "@(posedge clk or negedge clk)": "SYNC_BOTH",
        "@(posedge clk or negedge rst_n)": "ASYNC",
        "@(posedge clk or en)": "ASYNC",
        "@(a or b)": "COMB",
        "@(a, b)": "COMB",
        "@*": "COMB",
    }
    for sens_text, expected in cases.items():
        block = parse_always(f"always {sens_text} x = y + 1;")
        assert context_tag(block.sensitivity) == expected, sens_text


def test_empty_sensitivity_is_comb():
    assert context_tag(SensitivityList(())) == "COMB"
    assert context_tag(SensitivityList((SensEntry("star", None),))) == "COMB"


def test_rename_invariance():
    renamed = """always @(posedge clock_root)
  if (gate7 && primary_reset)
    zz <= lhs_in + rhs_in;
  else
    w0 = w1;"""
    assert fingerprint(parse_always(renamed)).full == REFERENCE_FP


def test_rename_invariance_random_blocks():
    rng = random.Random(3)
    for i in range(100):
        block = generate_random_block(rng)
        wrapped = block_from_always(block)
        shuffled = rename_identifiers(wrapped, fraction=1.0, seed=i)
        assert fingerprint(shuffled).full == fingerprint(wrapped).full


def test_literal_values_do_not_matter():
    a = parse_always("always @(posedge clk) q <= d + 8'h01;")
    b = parse_always("always @(posedge clk) q <= d + 8'hfe;")
    c = parse_always("always @(posedge clk) q <= d + 16'd9;")
    assert fingerprint(a).full == fingerprint(b).full == fingerprint(c).full


def test_operator_histogram_sorted_ascii():
    # != sorts before &&, which sorts before + (ASCII order)
    block = parse_always("always @* x = (a != b) + (a && c) + (a != d);")
    fp = fingerprint(block)
    assert "ops:{!=:2,&&:1,+:2}" in fp.body


def test_case_and_nesting_shape():
    text = """always @(posedge clk)
  case (sel)
    2'b00: q <= a;
    2'b01: q <= b;
    default:
      if (en)
        q <= c;
  endcase"""
    fp = fingerprint(parse_always(text))
    assert fp.body.startswith("case(items:2,dflt:1)")
    # the nested if survives in the default arm; its implicit else counts as
    # a branch but produces no [else:] section
    assert "[default:if(dpth:1,brnch:2)[then:" in fp.body
    assert "[else:" not in fp.body


def test_no_else_section_when_absent():
    fp = fingerprint(parse_always("always @(posedge clk) if (en) q <= d;"))
    assert "[then:" in fp.body
    assert "[else:" not in fp.body


def test_accepts_rtl_block_wrapper():
    block = parse_rtl_block(REFERENCE_TEXT)
    assert fingerprint(block).full == REFERENCE_FP


def test_collision_rate_counts_only_structural_impostors():
    blocks = generate_distinct_blocks(40, seed=5)
    assert 0.0 <= collision_rate(blocks) <= 1.0
    # exact copies are duplicates, not collisions
    assert collision_rate([blocks[0]] * 40) == 0.0
    assert collision_rate(blocks[:1]) == 0.0
    # same fingerprint, different normalized structure: a full collision
    twin_a = parse_always("always @(posedge clk) q <= a + b;")
    twin_b = parse_always("always @(posedge clk) q <= a + a;")
    assert collision_rate([twin_a, twin_b]) == 1.0
    assert collision_rate([twin_a, twin_b, parse_always("always @* x = y - 1;")]) == 2 / 3
