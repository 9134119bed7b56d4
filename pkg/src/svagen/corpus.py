"""Deterministic corpus generators for tests and benchmarks.

Three generators live here:

* generate_synthetic_corpus — stratum-driven (RTL, SVA) pairs with known
  path counts, timing, and control structure, for pipeline tests.
* generate_retrieval_corpus — a knowledge base with engineered textual
  neighborhoods: entries cluster into name cohorts so that raw-text
  retrieval degrades under identifier renaming while structural retrieval
  does not.  This mirrors how real RTL corpora behave: many blocks reuse
  the same handful of signal names with small structural edits.
* generate_random_block / generate_distinct_blocks — unconstrained random
  always-blocks for property tests and collision measurement.
"""

from __future__ import annotations

import itertools
import random
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import UnsatisfiableStratum
from .kb import StratumKey
from .paths import enumerate_path_conditions
from .rtl import (
    AlwaysBlock,
    Binary,
    Block,
    BlockingAssign,
    Case,
    CaseItem,
    Expr,
    Ident,
    If,
    Literal,
    NonBlockingAssign,
    SensEntry,
    SensitivityList,
    Stmt,
    Ternary,
    Unary,
    normalized_key,
    render_always,
)

_CMP_OPS = ("==", "!=", "<", ">=")
_ARITH_OPS = ("+", "-", "&", "|", "^")


def _sens(timing: str) -> SensitivityList:
    entries = [SensEntry("posedge", "clk")]
    if timing == "async":
        entries.append(SensEntry("negedge", "rst_n"))
    return SensitivityList(tuple(entries))


def _assign(lhs: str, a: str, op: str, b: str) -> Stmt:
    return NonBlockingAssign(Ident(lhs), Binary(op, Ident(a), Ident(b)))


def _literal(value: int, width: int = 3) -> Literal:
    return Literal(width=width, base="dec", digits=str(value))


def _stratum_body(key: StratumKey, idx: int, rng: random.Random) -> Stmt:
    """Build a body with exactly key.path_bucket execution paths (the bucket
    cap means 8 stands for itself here) and the requested control kind."""
    p = key.path_bucket
    names = [f"s{idx}_{c}" for c in ("x", "y", "z", "t", "u", "sel")]
    x, y, z, t, u, sel = names

    if key.control_kind == "none":
        if p != 1:
            raise UnsatisfiableStratum(f"straight-line code has 1 path, not {p}")
        return Block(
            (
                _assign(t, x, rng.choice(_ARITH_OPS), y),
                _assign(u, y, rng.choice(_ARITH_OPS), z),
            )
        )

    if key.control_kind == "if_else":
        if p < 2:
            raise UnsatisfiableStratum("an if/else needs at least 2 paths")
        # chain of p-1 conditions ending in a bare else: p leaves
        stmt: Stmt = _assign(t, x, rng.choice(_ARITH_OPS), y)
        for j in range(p - 1):
            cond = Binary(rng.choice(_CMP_OPS), Ident(x), Ident(y))
            stmt = If(cond, _assign(t, y, rng.choice(_ARITH_OPS), z), stmt)
        return stmt

    if key.control_kind == "case":
        if p < 2:
            raise UnsatisfiableStratum("a case needs at least 2 paths")
        items = tuple(
            CaseItem((_literal(j),), _assign(t, x, rng.choice(_ARITH_OPS), y))
            for j in range(p - 1)
        )
        default = _assign(t, y, rng.choice(_ARITH_OPS), z)
        return Case("case", Ident(sel), items, default)

    if key.control_kind == "mixed":
        if p < 3:
            raise UnsatisfiableStratum("if around case needs at least 3 paths")
        items = tuple(
            CaseItem((_literal(j),), _assign(t, x, rng.choice(_ARITH_OPS), y))
            for j in range(p - 2)
        )
        inner = Case("case", Ident(sel), items, _assign(t, y, rng.choice(_ARITH_OPS), z))
        cond = Binary(rng.choice(_CMP_OPS), Ident(u), Ident(x))
        return If(cond, inner, _assign(u, x, rng.choice(_ARITH_OPS), z))

    raise UnsatisfiableStratum(f"unknown control kind {key.control_kind!r}")


def _reference_sva(name: str, body: Stmt, timing: str, target: str) -> str:
    antecedent = enumerate_path_conditions(body)[0].description
    disable = "disable iff (!rst_n) " if timing == "async" else ""
    return (
        f"property {name};\n"
        f"  @(posedge clk) {disable}({antecedent}) |-> ({target} == $past({target}));\n"
        f"endproperty"
    )


def generate_synthetic_corpus(
    spec: Mapping[StratumKey, int],
    seed: int = 0,
) -> List[Tuple[str, str]]:
    """Emit raw (rtl_text, sva_text) pairs, ``spec[key]`` of them per stratum.

    Every pair survives curation and lands in its requested stratum; an
    impossible request (e.g. 1 path with case control) raises
    UnsatisfiableStratum before anything is generated.
    """
    for key in spec:
        probe = random.Random(0)
        _stratum_body(key, 0, probe)  # validates feasibility
    rng = random.Random(seed)
    pairs: List[Tuple[str, str]] = []
    idx = 0
    for key in sorted(spec):
        for _ in range(spec[key]):
            body = _stratum_body(key, idx, rng)
            block = AlwaysBlock(_sens(key.timing), body)
            rtl = render_always(block)
            sva = _reference_sva(f"p_{idx}", body, key.timing, f"s{idx}_t")
            pairs.append((rtl, sva))
            idx += 1
    return pairs


# --- retrieval corpus -------------------------------------------------------

# Word bank for long signal names.  Within a cohort the five names share no
# words, so renaming one away removes its text mass instead of leaving
# residue in the others.
_WORDS = (
    "calib", "vector", "packet", "filter", "window", "buffer", "shadow",
    "branch", "murmur", "copper", "lattice", "graphite", "onyx", "velvet",
    "quartz", "summit", "harbor", "timber", "cobalt", "prairie",
    "ember", "falcon", "garnet", "hollow", "indigo", "juniper", "kestrel",
    "lumen", "marble", "nimbus", "opal", "pylon", "quiver", "russet",
    "saffron", "tundra", "umber", "violet", "walnut", "xenon",
    "yonder", "zephyr", "basalt", "cinder", "drift", "easel", "fjord",
    "gusset", "helix", "ingot", "jasper", "krill", "loam", "mica",
    "nectar", "orchid", "plinth", "quill", "reef", "sable",
)

_SMALL_OPS = ("+", "-", "&", "|", "^", "<<", ">>", "==", "!=", "&&")


def _cohort_names(cohort: int) -> List[str]:
    words = _WORDS[cohort * 20 : cohort * 20 + 20]
    if len(words) < 20:
        raise ValueError("word bank supports at most 3 cohorts")
    return ["_".join(words[j * 4 : j * 4 + 4]) for j in range(5)]


def _small_block(names: Sequence[str], ops: Sequence[str]) -> AlwaysBlock:
    a, b, c = sorted(names)
    body = Block(
        (
            NonBlockingAssign(
                Ident(b),
                Binary(ops[1], Binary(ops[0], Ident(b), Ident(c)), Binary(ops[2], Ident(c), Ident(b))),
            ),
            BlockingAssign(Ident(c), Ident(c)),
        )
    )
    return AlwaysBlock(SensitivityList((SensEntry("posedge", a),)), body)


def _big_block(names: Sequence[str], ops: Sequence[str]) -> AlwaysBlock:
    a, b, c, d, e = sorted(names)
    body = Block(
        (
            NonBlockingAssign(
                Ident(b),
                Binary(ops[1], Binary(ops[0], Ident(c), Ident(d)), Binary(ops[2], Ident(e), Ident(b))),
            ),
            NonBlockingAssign(
                Ident(d),
                Binary(ops[4], Binary(ops[3], Ident(e), Ident(c)), Binary(ops[5], Ident(b), Ident(d))),
            ),
        )
    )
    return AlwaysBlock(SensitivityList((SensEntry("posedge", a),)), body)


def generate_retrieval_corpus(
    cohorts: int = 3,
    smalls_per_subset: int = 13,
    bigs_per_cohort: int = 370,
    seed: int = 0,
) -> List[Tuple[str, str]]:
    """Knowledge base whose textual neighborhoods stress raw-text retrieval.

    Each cohort owns five long signal names.  Small entries use a 3-name
    subset; big entries use all five.  Distinct operator multisets keep
    every fingerprint unique within a cohort, while the same operator
    schedule repeats across cohorts, so each fingerprint occurs exactly
    ``cohorts`` times — a duplicate-rich KB in the structural sense but
    with globally unique texts.
    """
    small_combos = list(itertools.combinations_with_replacement(_SMALL_OPS, 3))
    big_combos = list(itertools.combinations_with_replacement(_SMALL_OPS, 6))
    rng = random.Random(seed)
    rng.shuffle(small_combos)
    rng.shuffle(big_combos)
    n_small = smalls_per_subset * 10
    if n_small > len(small_combos) or bigs_per_cohort > len(big_combos):
        raise ValueError("not enough operator combinations for the requested corpus size")

    pairs: List[Tuple[str, str]] = []
    idx = 0
    for cohort in range(cohorts):
        names = _cohort_names(cohort)
        subsets = list(itertools.combinations(sorted(names), 3))
        for i in range(n_small):
            a, b, c = sorted(subsets[i % 10])
            block = _small_block((a, b, c), small_combos[i])
            rtl = render_always(block)
            sva = (
                f"property p_{idx};\n"
                f"  @(posedge {a}) ({b} != {c}) |-> ({b} == $past({b}));\n"
                f"endproperty"
            )
            pairs.append((rtl, sva))
            idx += 1
        for i in range(bigs_per_cohort):
            block = _big_block(names, big_combos[i])
            rtl = render_always(block)
            a, b, c, d, e = sorted(names)
            sva = (
                f"property p_{idx};\n"
                f"  @(posedge {a}) ({c} != {d}) |-> ({b} == $past({b}));\n"
                f"endproperty"
            )
            pairs.append((rtl, sva))
            idx += 1
    return pairs


# --- random block generator -------------------------------------------------

_IDENT_POOL = ("a", "b", "c", "d", "e", "f", "g", "h")
_UNARY_POOL = ("!", "~", "-", "&", "|", "^")
_BINARY_POOL = (
    "&&", "||", "==", "!=", "<", "<=", ">", ">=",
    "+", "-", "*", "/", "%", "&", "|", "^", "<<", ">>",
)


def _random_expr(rng: random.Random, depth: int) -> Expr:
    if depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.08:
            value = rng.randrange(8)
            if rng.random() < 0.5:
                return Literal(width=None, base="dec", digits=str(value))
            return Literal(width=rng.choice((1, 3, 8)), base=rng.choice(("dec", "hex")), digits=str(value))
        return Ident(rng.choice(_IDENT_POOL))
    roll = rng.random()
    if roll < 0.12:
        return Ternary(_random_expr(rng, depth - 1), _random_expr(rng, depth - 1), _random_expr(rng, depth - 1))
    if roll < 0.30:
        return Unary(rng.choice(_UNARY_POOL), _random_expr(rng, depth - 1))
    return Binary(rng.choice(_BINARY_POOL), _random_expr(rng, depth - 1), _random_expr(rng, depth - 1))


def _random_assign(rng: random.Random) -> Stmt:
    lhs = Ident(rng.choice(_IDENT_POOL))
    rhs = _random_expr(rng, 3)
    # bare copies (q <= d) carry no operator signal and collide in droves;
    # real blocks are dominated by computing assigns, so re-roll most of them
    while isinstance(rhs, (Ident, Literal)) and rng.random() < 0.9:
        rhs = _random_expr(rng, 3)
    if rng.random() < 0.7:
        return NonBlockingAssign(lhs, rhs)
    return BlockingAssign(lhs, rhs)


def _random_stmt(rng: random.Random, depth: int, fanout: int) -> Stmt:
    if depth <= 0:
        return _random_assign(rng)
    roll = rng.random()
    if roll < 0.40:
        return _random_assign(rng)
    if roll < 0.65:
        then_stmt = _random_stmt(rng, depth - 1, fanout)
        else_stmt = _random_stmt(rng, depth - 1, fanout) if rng.random() < 0.6 else None
        return If(_random_expr(rng, 2), then_stmt, else_stmt)
    if roll < 0.82:
        n_items = rng.randrange(1, fanout + 1)
        items = []
        for j in range(n_items):
            labels = tuple(_literal(j * 2 + off, width=4) for off in range(rng.randrange(1, 3)))
            items.append(CaseItem(labels, _random_stmt(rng, depth - 1, fanout)))
        default = _random_stmt(rng, depth - 1, fanout) if rng.random() < 0.6 else None
        kind_roll = rng.random()
        kind = "case" if kind_roll < 0.9 else ("casez" if kind_roll < 0.95 else "casex")
        return Case(kind, Ident(rng.choice(_IDENT_POOL)), tuple(items), default)
    n = rng.randrange(1, fanout + 1)
    return Block(tuple(_random_stmt(rng, depth - 1, fanout) for _ in range(n)))


def _random_sens(rng: random.Random) -> SensitivityList:
    roll = rng.random()
    if roll < 0.15:
        return SensitivityList((SensEntry("star", None),))  # @* combinational
    if roll < 0.55:
        return SensitivityList((SensEntry("posedge", "clk"),))
    if roll < 0.70:
        return SensitivityList((SensEntry("negedge", "clk"),))
    if roll < 0.85:
        return SensitivityList(
            (SensEntry("posedge", "clk"), SensEntry("negedge", "rst_n"))
        )
    return SensitivityList(
        (SensEntry("posedge", "clk"), SensEntry("posedge", "clk2"))
    )


def _op_count(node) -> int:
    if isinstance(node, (Ident, Literal)):
        return 0
    if isinstance(node, Unary):
        return 1 + _op_count(node.operand)
    if isinstance(node, Binary):
        return 1 + _op_count(node.left) + _op_count(node.right)
    if isinstance(node, Ternary):
        return 1 + _op_count(node.cond) + _op_count(node.then_val) + _op_count(node.else_val)
    if isinstance(node, (NonBlockingAssign, BlockingAssign)):
        return _op_count(node.rhs)
    if isinstance(node, Block):
        return sum(_op_count(s) for s in node.statements)
    if isinstance(node, If):
        total = _op_count(node.cond) + _op_count(node.then_stmt)
        return total + (_op_count(node.else_stmt) if node.else_stmt is not None else 0)
    if isinstance(node, Case):
        total = _op_count(node.subject)
        for item in node.items:
            total += _op_count(item.body)
        return total + (_op_count(node.default) if node.default is not None else 0)
    return 0


def generate_random_block(
    rng: random.Random,
    max_depth: int = 4,
    max_fanout: int = 3,
) -> AlwaysBlock:
    while True:
        body = _random_stmt(rng, max_depth, max_fanout)
        if not isinstance(body, Block):
            body = Block((body,))
        # operator-free bodies are all but indistinguishable structurally;
        # real blocks compute, so require a little arithmetic
        if _op_count(body) >= 2:
            return AlwaysBlock(_random_sens(rng), body)


def generate_distinct_blocks(
    n: int,
    seed: int = 0,
    max_depth: int = 4,
    max_fanout: int = 3,
) -> List[AlwaysBlock]:
    """n random blocks, pairwise distinct under rename normalization."""
    rng = random.Random(seed)
    seen = set()
    out: List[AlwaysBlock] = []
    while len(out) < n:
        block = generate_random_block(rng, max_depth, max_fanout)
        key = normalized_key(block)
        if key in seen:
            continue
        seen.add(key)
        out.append(block)
    return out
