"""Command-line surface: curate, index, generate, and the eval commands.

Exit codes: 0 success, 1 usage error, 2 data error, 3 provider error.
Options resolve as flag > config file > built-in default; every option
therefore declares no argparse default and the resolution happens in
_resolve.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple

try:
    import tomllib
except ImportError:  # py3.10
    import tomli as tomllib

from . import kb as kbmod
from .embedding import HashEmbeddingProvider, RemoteEmbeddingProvider, hash_embed
from .errors import AuthError, ProviderError, SvagenError, Timeout
from .evaluation import (
    Pipeline,
    RetrievalEvalConfig,
    run_collision_eval,
    run_generation_eval,
    run_retrieval_eval,
    run_runtime_sweep,
)
from .fingerprint import fingerprint
from .index import IndexEntry, build_approx, build_exact, load, persist
from .llm import GenerationConfig, MockProvider, RemoteProvider
from .llm import complete as llm_complete
from .prompting import build_prompt, parse_llm_output
from .rtl import block_from_always, extract_blocks, parse_always, parse_source
from .sva import check_sva_syntax

API_KEY_ENV = "SVAGEN_API_KEY"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad usage; the contract here is 1
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="TOML config file; flags override it")
    common.add_argument("--json", action="store_true", default=None,
                        help="machine-readable output")
    parser = _Parser(prog="svagen", description=__doc__.splitlines()[0], parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(owner, name, **kwargs):
        return owner.add_parser(name, parents=[common], **kwargs)

    p = add_parser(sub, "curate", help="validate raw (rtl, sva) pairs into a knowledge base")
    p.add_argument("input", help="raw JSONL with rtl/sva fields")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--reject-log")

    p = add_parser(sub, "index", help="embed a knowledge base and persist the search index")
    p.add_argument("kb")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--nlist", type=int, help="IVF cell count; omit for exact index")
    p.add_argument("--provider", choices=["hash", "remote"])
    p.add_argument("--embed-url", help="embedding service base URL (remote provider)")
    p.add_argument("--seed", type=int)

    p = add_parser(sub, "generate", help="generate assertions for every block in a Verilog file")
    p.add_argument("target")
    p.add_argument("--kb", required=True)
    p.add_argument("--index", dest="index_path")
    p.add_argument("-k", type=int)
    p.add_argument("--provider")
    p.add_argument("--model")
    p.add_argument("--base-url")
    p.add_argument("--temperature", type=float)
    p.add_argument("--max-tokens", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("-o", "--output", required=True)

    ev = add_parser(sub, "eval", help="run an evaluation experiment")
    evsub = ev.add_subparsers(dest="experiment", required=True)

    p = add_parser(evsub, "retrieval")
    p.add_argument("--kb", required=True)
    p.add_argument("--retriever", choices=["structural", "semantic_baseline"])
    p.add_argument("--sample-size", type=int)
    p.add_argument("--rename-fraction", type=float)
    p.add_argument("--seed", type=int)

    p = add_parser(evsub, "generation")
    p.add_argument("--kb", required=True)
    p.add_argument("--queries", help="query entries JSONL; defaults to the kb itself")
    p.add_argument("-k", type=int)
    p.add_argument("--provider")
    p.add_argument("--model")
    p.add_argument("--base-url")
    p.add_argument("--seed", type=int)

    p = add_parser(evsub, "collision")
    p.add_argument("-n", type=int)
    p.add_argument("--seed", type=int)

    p = add_parser(evsub, "runtime")
    p.add_argument("--max-size", type=int)
    p.add_argument("--step", type=int)
    p.add_argument("--queries", type=int)
    p.add_argument("--seed", type=int)

    return parser


def _load_config(path: Optional[str]) -> Dict:
    if not path:
        return {}
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _resolve(args: argparse.Namespace, config: Dict, key: str, default):
    value = getattr(args, key, None)
    if value is not None:
        return value
    section = config.get(args.command, {})
    if args.command == "eval":
        section = section.get(args.experiment, {}) if isinstance(section, dict) else {}
    if key in section:
        return section[key]
    if key in config:
        return config[key]
    return default


def _make_llm_provider(spec: Optional[str], model: str, base_url: str):
    spec = spec or "mock:perfect"
    if spec == "remote":
        api_key = os.environ.get(API_KEY_ENV)
        if not api_key:
            raise AuthError(401, f"{API_KEY_ENV} is not set")
        if not base_url:
            raise UsageError("remote provider needs --base-url")
        return RemoteProvider(base_url, model, api_key=api_key)
    if spec.startswith("mock:"):
        parts = spec.split(":")
        mode = parts[1]
        p = float(parts[2]) if len(parts) > 2 else 0.0
        seed = int(parts[3]) if len(parts) > 3 else 0
        return MockProvider(mode, p=p, seed=seed)
    raise UsageError(f"unknown provider {spec!r}; use remote or mock:MODE[:p[:seed]]")


def _read_raw_pairs(path: str) -> Tuple[List[Tuple[str, str]], List[Optional[str]], List[Dict]]:
    pairs: List[Tuple[str, str]] = []
    ids: List[Optional[str]] = []
    rejected: List[Dict] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                rtl, sva = record["rtl"], record["sva"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                rejected.append(
                    {"line": lineno, "reason": f"malformed-record: {exc}"}
                )
                continue
            pairs.append((rtl, sva))
            ids.append(record.get("id"))
    return pairs, ids, rejected


def _cmd_curate(args, config) -> int:
    pairs, ids, malformed = _read_raw_pairs(args.input)
    use_ids = None if all(i is None for i in ids) else [
        i if i is not None else f"entry-{n:05d}" for n, i in enumerate(ids)
    ]
    entries, rejected = kbmod.curate(pairs, ids=use_ids)
    kbmod.write_kb(entries, args.output)

    reject_rows = malformed + [
        {"rtl": rtl, "sva": sva, "reason": reason} for (rtl, sva), reason in rejected
    ]
    reject_log = _resolve(args, config, "reject_log", None)
    if reject_log:
        with open(reject_log, "w", encoding="utf-8") as fh:
            for row in reject_rows:
                fh.write(json.dumps(row, sort_keys=True) + "\n")
    summary = {
        "accepted": len(entries),
        "rejected": len(reject_rows),
        "output": args.output,
    }
    _emit(args, config, summary, f"curate: {len(entries)} accepted, {len(reject_rows)} rejected")
    return 0


def _embedding_provider(args, config):
    name = _resolve(args, config, "provider", "hash")
    if name == "hash":
        return HashEmbeddingProvider()
    url = _resolve(args, config, "embed_url", None)
    if not url:
        raise UsageError("remote embedding provider needs --embed-url")
    return RemoteEmbeddingProvider(url, api_key=os.environ.get(API_KEY_ENV))


def _cmd_index(args, config) -> int:
    entries = kbmod.read_kb(args.kb)
    if not entries:
        print("index: knowledge base is empty", file=sys.stderr)
        return 2
    provider = _embedding_provider(args, config)
    vectors = provider.embed_batch([e.fingerprint for e in entries])
    index_entries = [
        IndexEntry(id=e.id, vector=v, context_tag=e.context_tag)
        for e, v in zip(entries, vectors)
    ]
    nlist = _resolve(args, config, "nlist", None)
    seed = _resolve(args, config, "seed", 0)
    if nlist is None:
        index = build_exact(index_entries)
    else:
        index = build_approx(index_entries, nlist=nlist, seed=seed)
    persist(index, args.output)
    _emit(args, config, {"entries": len(entries), "kind": index.kind, "output": args.output},
          f"index: {len(entries)} entries ({index.kind}) -> {args.output}")
    return 0


def _target_blocks(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    if re.search(r"\bmodule\b", text):
        unit = parse_source(text, source_name=path)
        return extract_blocks(unit)
    block = parse_always(text)
    return [block_from_always(block, rtl_text=text.strip())]


def _cmd_generate(args, config) -> int:
    entries = kbmod.read_kb(args.kb)
    by_id = {e.id: e for e in entries}
    k = _resolve(args, config, "k", 3)
    jobs = _resolve(args, config, "jobs", os.cpu_count() or 1)
    model = _resolve(args, config, "model", "")
    base_url = _resolve(args, config, "base_url", "")
    provider = _make_llm_provider(_resolve(args, config, "provider", None), model, base_url)
    gen_config = GenerationConfig(
        temperature=_resolve(args, config, "temperature", 0.0),
        max_tokens=_resolve(args, config, "max_tokens", 1024),
        model_id=model,
    )

    index = None
    index_path = _resolve(args, config, "index_path", None)
    if index_path and k > 0:
        index = load(index_path)

    blocks = _target_blocks(args.target)

    def run_one(item):
        block_no, block = item
        fp = fingerprint(block)
        hits = []
        if index is not None:
            hits = index.search(hash_embed(fp.full), k=k, query_tag=fp.tag)
        bundle = build_prompt(hits, by_id, block, k=k)
        raw = llm_complete(provider, bundle.rendered, gen_config)
        accepted = [s for s in parse_llm_output(raw) if check_sva_syntax(s) is None]
        block_id = f"{block.module_name or 'block'}:{block_no}"
        return {
            "block": block_id,
            "path_count": bundle.exec_path_count,
            "exemplars": [h.id for h in hits],
            "assertions": accepted,
        }

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        rows = list(pool.map(run_one, enumerate(blocks)))

    with open(args.output, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True) + "\n")
    total = sum(len(r["assertions"]) for r in rows)
    _emit(args, config, {"blocks": len(rows), "assertions": total, "output": args.output},
          f"generate: {total} assertions across {len(rows)} blocks -> {args.output}")
    return 0


def _cmd_eval(args, config) -> int:
    if args.experiment == "retrieval":
        entries = kbmod.read_kb(args.kb)
        cfg = RetrievalEvalConfig(
            rename_fraction=_resolve(args, config, "rename_fraction", 0.30),
            sample_size=_resolve(args, config, "sample_size", 100),
            seed=_resolve(args, config, "seed", 0),
        )
        retriever = _resolve(args, config, "retriever", "structural")
        report = run_retrieval_eval(entries, cfg, retriever=retriever)
        _emit_report(args, config, report)
        return 0
    if args.experiment == "generation":
        entries = kbmod.read_kb(args.kb)
        queries_path = _resolve(args, config, "queries", None)
        queries = kbmod.read_kb(queries_path) if queries_path else entries
        model = _resolve(args, config, "model", "")
        base_url = _resolve(args, config, "base_url", "")
        provider = _make_llm_provider(_resolve(args, config, "provider", None), model, base_url)
        pipeline = Pipeline(kb=entries, provider=provider, k=_resolve(args, config, "k", 3))
        report = run_generation_eval(queries, pipeline)
        _emit_report(args, config, report)
        return 0
    if args.experiment == "collision":
        report = run_collision_eval(
            n=_resolve(args, config, "n", 1000),
            seed=_resolve(args, config, "seed", 0),
        )
        _emit(args, config,
              {"n": report.n, "distinct": report.distinct_fingerprints,
               "rate": report.rate, "seconds": round(report.elapsed_seconds, 2)},
              f"collision: {report.rate:.4f} over {report.n} blocks "
              f"({report.distinct_fingerprints} distinct fingerprints)")
        return 0
    rows = run_runtime_sweep(
        max_size=_resolve(args, config, "max_size", 3000),
        step=_resolve(args, config, "step", 100),
        n_queries=_resolve(args, config, "queries", 25),
        seed=_resolve(args, config, "seed", 0),
    )
    payload = [
        {"size": r.size, "raw_ms": r.raw_ms, "exact_ms": r.exact_ms, "approx_ms": r.approx_ms}
        for r in rows
    ]
    table = "\n".join(
        f"{r.size:6d}  raw {r.raw_ms:9.4f} ms   exact {r.exact_ms:9.4f} ms   approx {r.approx_ms:9.4f} ms"
        for r in rows
    )
    _emit(args, config, payload, table)
    return 0


def _emit(args, config, payload, text: str) -> None:
    if _resolve(args, config, "json", False):
        print(json.dumps(payload, sort_keys=True, indent=2))
    else:
        print(text)


def _emit_report(args, config, report) -> None:
    if _resolve(args, config, "json", False):
        print(report.to_json())
    else:
        print(report.render_table())


_COMMANDS = {
    "curate": _cmd_curate,
    "index": _cmd_index,
    "generate": _cmd_generate,
    "eval": _cmd_eval,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        config = _load_config(args.config)
        return _COMMANDS[args.command](args, config)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (ProviderError, Timeout) as exc:
        print(f"provider error: {exc}", file=sys.stderr)
        return 3
    except (OSError, json.JSONDecodeError, SvagenError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
