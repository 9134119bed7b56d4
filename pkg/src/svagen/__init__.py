"""Structure-aware retrieval and prompt construction for SVA generation.

The pipeline: parse Verilog always blocks (`rtl`), fingerprint their
control structure rename-invariantly (`fingerprint`), embed and index the
fingerprints (`embedding`, `index`), curate (RTL, SVA) knowledge bases
(`kb`, `sva`), build execution-path-aware prompts (`paths`, `prompting`),
call a provider (`llm`), and score everything (`metrics`, `coverage`,
`evaluation`).
"""

from svagen.embedding import Embedding, HashEmbeddingProvider, cosine, hash_embed
from svagen.fingerprint import Fingerprint, context_tag, fingerprint
from svagen.index import (
    ExactIndex,
    IndexEntry,
    IvfIndex,
    SearchHit,
    build_approx,
    build_exact,
    load,
    persist,
)
from svagen.kb import KbEntry, StratumKey, curate, parse_rtl_block, read_kb, stratified_split, write_kb
from svagen.llm import GenerationConfig, LlmProvider, MockProvider, RemoteProvider, complete
from svagen.paths import PathCond, PathSet, count_paths, enumerate_path_conditions
from svagen.prompting import PromptBundle, build_prompt, parse_llm_output
from svagen.sva import SyntaxViolation, check_sva_syntax, normalize_sva
from svagen.coverage import CoverageResult, path_coverage
from svagen.evaluation import (
    EvalReport,
    Pipeline,
    RetrievalEvalConfig,
    rename_identifiers,
    run_collision_eval,
    run_generation_eval,
    run_retrieval_eval,
    run_runtime_sweep,
)
from svagen.metrics import bleu, mrr_at_n, ndcg_at_n, recall_at_n, semantic_similarity

__version__ = "0.1.0"

__all__ = [
    "Embedding", "HashEmbeddingProvider", "cosine", "hash_embed",
    "Fingerprint", "context_tag", "fingerprint",
    "ExactIndex", "IndexEntry", "IvfIndex", "SearchHit",
    "build_approx", "build_exact", "load", "persist",
    "KbEntry", "StratumKey", "curate", "parse_rtl_block", "read_kb",
    "stratified_split", "write_kb",
    "GenerationConfig", "LlmProvider", "MockProvider", "RemoteProvider", "complete",
    "PathCond", "PathSet", "count_paths", "enumerate_path_conditions",
    "PromptBundle", "build_prompt", "parse_llm_output",
    "SyntaxViolation", "check_sva_syntax", "normalize_sva",
    "CoverageResult", "path_coverage",
    "EvalReport", "Pipeline", "RetrievalEvalConfig", "rename_identifiers",
    "run_collision_eval", "run_generation_eval", "run_retrieval_eval",
    "run_runtime_sweep",
    "bleu", "mrr_at_n", "ndcg_at_n", "recall_at_n", "semantic_similarity",
    "__version__",
]
