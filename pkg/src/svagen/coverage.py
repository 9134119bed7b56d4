"""Execution-path coverage of generated assertions.

An assertion covers a path when its antecedent (the expression left of the
first top-level |-> or |=>) is logically equivalent to the path condition.
Equivalence is decided by truth-table enumeration over the union of boolean
atoms; guards with more than ATOM_LIMIT atoms fall back to canonical-text
equality and mark the result approximate.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from .errors import ParseError, TooManyAtoms
from .paths import DEFAULT_PATH_CAP, enumerate_path_conditions
from .rtl import Binary, Expr, Literal, RtlBlock, Unary, parse_expr, render_expr
from .sva import check_sva_syntax, tokenize_sva

ATOM_LIMIT = 16

_BASE_RADIX = {"bin": 2, "oct": 8, "dec": 10, "hex": 16}

# ("const", bool) | ("atom", str) | ("not", s) | ("and", a, b) | ("or", a, b)
Skel = Tuple


@dataclass(frozen=True)
class CoverageResult:
    covered: bool
    per_path: Tuple[bool, ...]
    approximate: bool


def extract_antecedent(sva_text: str) -> Optional[str]:
    """Text of the expression left of the first top-level implication.

    Property headers, clocking events, and disable iff clauses are skipped;
    None when the input is invalid or carries no implication.
    """
    if check_sva_syntax(sva_text) is not None:
        return None
    tokens = [t for t in tokenize_sva(sva_text) if t.type.name != "EOF"]
    i = 0

    def skip_group(j: int) -> int:
        # j at '('; returns index past the matching ')'
        depth = 0
        while j < len(tokens):
            if tokens[j].text == "(":
                depth += 1
            elif tokens[j].text == ")":
                depth -= 1
                if depth == 0:
                    return j + 1
            j += 1
        return j

    if i < len(tokens) and tokens[i].text == "property":
        i += 3  # property NAME ;
    elif i < len(tokens) and tokens[i].text in ("assert", "assume", "cover"):
        i += 2  # kw property
        if i < len(tokens) and tokens[i].text == "(":
            i += 1
    if i < len(tokens) and tokens[i].text == "@":
        i = skip_group(i + 1)
    if i < len(tokens) and tokens[i].text == "disable":
        i += 2  # disable iff
        i = skip_group(i)

    start = i
    depth = 0
    for j in range(start, len(tokens)):
        text = tokens[j].text
        if text == "(":
            depth += 1
        elif text == ")":
            depth -= 1
            if depth < 0:
                return None
        elif depth == 0 and text in ("|->", "|=>"):
            if j == start:
                return None
            return sva_text[tokens[start].position : tokens[j].position].strip()
    return None


def boolean_skeleton(expr: Expr) -> Skel:
    """Decompose over &&, ||, ! with everything else as an opaque atom."""
    if isinstance(expr, Binary) and expr.op in ("&&", "||"):
        kind = "and" if expr.op == "&&" else "or"
        return (kind, boolean_skeleton(expr.left), boolean_skeleton(expr.right))
    if isinstance(expr, Unary) and expr.op == "!":
        return ("not", boolean_skeleton(expr.operand))
    if isinstance(expr, Literal):
        digits = expr.digits.replace("_", "")
        if "x" not in digits.lower() and "z" not in digits.lower():
            return ("const", int(digits, _BASE_RADIX[expr.base]) != 0)
    return ("atom", render_expr(expr))


def skeleton_atoms(skel: Skel) -> FrozenSet[str]:
    kind = skel[0]
    if kind == "atom":
        return frozenset((skel[1],))
    if kind == "const":
        return frozenset()
    if kind == "not":
        return skeleton_atoms(skel[1])
    return skeleton_atoms(skel[1]) | skeleton_atoms(skel[2])


def evaluate_skeleton(skel: Skel, assignment: Dict[str, bool]) -> bool:
    kind = skel[0]
    if kind == "const":
        return skel[1]
    if kind == "atom":
        return assignment[skel[1]]
    if kind == "not":
        return not evaluate_skeleton(skel[1], assignment)
    if kind == "and":
        return evaluate_skeleton(skel[1], assignment) and evaluate_skeleton(skel[2], assignment)
    return evaluate_skeleton(skel[1], assignment) or evaluate_skeleton(skel[2], assignment)


def skeletons_equivalent(a: Skel, b: Skel) -> bool:
    """Truth-table equivalence over the union of atoms."""
    atoms = sorted(skeleton_atoms(a) | skeleton_atoms(b))
    if len(atoms) > ATOM_LIMIT:
        raise TooManyAtoms(f"{len(atoms)} atoms exceed the {ATOM_LIMIT}-atom limit")
    for values in product((False, True), repeat=len(atoms)):
        assignment = dict(zip(atoms, values))
        if evaluate_skeleton(a, assignment) != evaluate_skeleton(b, assignment):
            return False
    return True


def _parse_guard(text: str) -> Optional[Expr]:
    try:
        return parse_expr(text)
    except ParseError:
        return None


def path_coverage(
    generated_svas: Sequence[str],
    target: RtlBlock,
) -> CoverageResult:
    """Per-path coverage verdicts for a set of generated assertions."""
    conds = enumerate_path_conditions(target.block.body)
    if len(conds) > DEFAULT_PATH_CAP:
        raise ValueError(
            f"{len(conds)} paths exceed the {DEFAULT_PATH_CAP}-path coverage limit"
        )

    antecedents: List[Tuple[Skel, str]] = []
    for sva in generated_svas:
        text = extract_antecedent(sva)
        if text is None:
            continue
        expr = _parse_guard(text)
        if expr is None:
            continue
        antecedents.append((boolean_skeleton(expr), render_expr(expr)))

    per_path: List[bool] = []
    approximate = False
    for cond in conds:
        expr = _parse_guard(cond.description)
        if expr is None:  # descriptions re-parse by construction
            per_path.append(False)
            continue
        cond_skel = boolean_skeleton(expr)
        cond_text = render_expr(expr)
        hit = False
        for ant_skel, ant_text in antecedents:
            try:
                if skeletons_equivalent(ant_skel, cond_skel):
                    hit = True
                    break
            except TooManyAtoms:
                approximate = True
                if ant_text == cond_text:
                    hit = True
                    break
        per_path.append(hit)
    return CoverageResult(
        covered=bool(per_path) and all(per_path),
        per_path=tuple(per_path),
        approximate=approximate,
    )
