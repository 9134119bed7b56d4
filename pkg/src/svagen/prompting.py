"""Prompt assembly from retrieved exemplars plus a target block.

The rendered prompt is deterministic: same hits, target, and k give
byte-identical text.  The path-count constraint sentence is the load-bearing
part; its wording is fixed and the target's execution-path count is
substituted into both slots.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from typing import List, Mapping, Optional, Sequence, Tuple, Union

from .errors import UnresolvedHit
from .index import SearchHit
from .kb import KbEntry
from .paths import count_paths
from .rtl import RtlBlock

_EXAMPLE_SECTION = (
    "Example {i} — RTL:\n"
    "```verilog\n"
    "{rtl}\n"
    "```\n"
    "Example {i} — SVA:\n"
    "```systemverilog\n"
    "{sva}\n"
    "```\n"
    "\n"
)

_CRITICAL_RE = re.compile(r"Target code has (\d+) execution paths")
_TARGET_RE = re.compile(r"Target RTL:\n```verilog\n(.*?)\n```", re.DOTALL)


@dataclass(frozen=True)
class PromptBundle:
    exemplars: Tuple[Tuple[str, str], ...]
    target_rtl: str
    exec_path_count: int
    rendered: str


def default_template() -> str:
    return resources.files("svagen").joinpath("templates/prompt.txt").read_text(encoding="utf-8")


def build_prompt(
    hits: Sequence[SearchHit],
    kb: Union[Sequence[KbEntry], Mapping[str, KbEntry]],
    target: RtlBlock,
    k: int,
    template: Optional[str] = None,
) -> PromptBundle:
    """Render the generation prompt from the top-k hits.

    k = 0 is the zero-shot baseline.  Fewer hits than k is not an error;
    the prompt simply carries what exists.  A hit whose id is missing from
    kb raises UnresolvedHit.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if isinstance(kb, Mapping):
        by_id = kb
    else:
        by_id = {entry.id: entry for entry in kb}
    exemplars: List[Tuple[str, str]] = []
    for hit in hits[:k]:
        entry = by_id.get(hit.id)
        if entry is None:
            raise UnresolvedHit(hit.id)
        exemplars.append((entry.rtl_text, entry.sva_text))

    examples_text = "".join(
        _EXAMPLE_SECTION.format(i=i + 1, rtl=rtl, sva=sva)
        for i, (rtl, sva) in enumerate(exemplars)
    )
    n_paths = count_paths(target.block.body, cap=1).count
    text = template if template is not None else default_template()
    rendered = (
        text.replace("{{EXAMPLES}}", examples_text)
        .replace("{{TARGET_RTL}}", target.rtl_text)
        .replace("{{EXEC_PATHS}}", str(n_paths))
    )
    return PromptBundle(
        exemplars=tuple(exemplars),
        target_rtl=target.rtl_text,
        exec_path_count=n_paths,
        rendered=rendered,
    )


_PROPERTY_RE = re.compile(r"\bproperty\b")
_ASSERT_RE = re.compile(r"\bassert\s+property\s*\(")


def parse_llm_output(raw: str) -> List[str]:
    """Extract assertion candidates from raw model output, in order.

    Candidates are exact substrings of raw: every ``property ...
    endproperty`` span and every ``assert property (...)`` statement found
    outside such spans.  Syntax validity is judged downstream.
    """
    spans: List[Tuple[int, str]] = []
    taken: List[Tuple[int, int]] = []
    for match in _PROPERTY_RE.finditer(raw):
        start = match.start()
        if any(a <= start < b for a, b in taken):
            continue
        end = raw.find("endproperty", match.end())
        if end < 0:
            continue
        end += len("endproperty")
        spans.append((start, raw[start:end]))
        taken.append((start, end))
    for match in _ASSERT_RE.finditer(raw):
        start = match.start()
        if any(a <= start < b for a, b in taken):
            continue
        depth = 1
        pos = match.end()
        while pos < len(raw) and depth > 0:
            if raw[pos] == "(":
                depth += 1
            elif raw[pos] == ")":
                depth -= 1
            pos += 1
        if depth != 0:
            continue
        if pos < len(raw) and raw[pos] == ";":
            pos += 1
        spans.append((start, raw[start:pos]))
        taken.append((start, pos))
    spans.sort(key=lambda item: item[0])
    return [text for _, text in spans]


def extract_target_rtl(prompt: str) -> str:
    """Pull the target RTL section back out of a rendered prompt.

    The mock providers act on the target exactly the way a live model
    reads it: from the prompt text, not from side channels.
    """
    match = _TARGET_RE.search(prompt)
    if match is None:
        raise ValueError("prompt has no target RTL section")
    return match.group(1)


def extract_path_count(prompt: str) -> int:
    match = _CRITICAL_RE.search(prompt)
    if match is None:
        raise ValueError("prompt has no execution-path instruction")
    return int(match.group(1))
