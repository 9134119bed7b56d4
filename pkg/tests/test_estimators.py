from __future__ import annotations

import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import Pipeline as SkPipeline

from svagen.estimators import (
    FingerprintTransformer,
    StructuralRetriever,
    TrigramHashEmbedder,
)
from svagen.evaluation import rename_identifiers
from svagen.kb import parse_rtl_block

RTL = [
    "always @(posedge clk) q <= d + 1;",
    "always @(posedge clk) if (en) q <= d; else q <= q;",
    "always @* case (s) 0: y = a; 1: y = b; endcase",
    "always @(posedge clk or negedge rst_n) if (!rst_n) q <= 0; else q <= d;",
]


def test_validate_texts_errors():
    t = FingerprintTransformer()
    with pytest.raises(TypeError):
        t.transform("a single string")
    with pytest.raises(ValueError):
        t.transform([])
    with pytest.raises(TypeError):
        t.transform([42])
    with pytest.raises(ValueError):
        t.transform(["  "])


def test_fingerprint_transformer():
    out = FingerprintTransformer().fit(RTL).transform(RTL)
    assert len(out) == 4
    assert out[0].startswith("SYNC_POSEDGE::")
    assert out[2].startswith("COMB::case(")
    assert out[3].startswith("ASYNC::")


def test_trigram_embedder_matrix():
    emb = TrigramHashEmbedder(dim=64)
    matrix = emb.fit(RTL).transform(RTL)
    assert matrix.shape == (4, 64)
    norms = np.linalg.norm(matrix, axis=1)
    assert np.allclose(norms, 1.0, atol=1e-6)


def test_estimators_compose_in_sklearn_pipeline():
    pipe = SkPipeline(
        [("fp", FingerprintTransformer()), ("emb", TrigramHashEmbedder(dim=32))]
    )
    matrix = pipe.fit_transform(RTL)
    assert matrix.shape == (4, 32)


def test_retriever_exact_mode():
    retriever = StructuralRetriever(k=2).fit(RTL, y=["a", "b", "c", "d"])
    assert retriever.predict([RTL[1]]) == ["b"]
    scores, indices = retriever.kneighbors([RTL[1], RTL[3]])
    assert scores.shape == (2, 2)
    assert indices.shape == (2, 2)
    assert scores.dtype == np.float32
    assert indices.dtype == np.int64
    assert indices[0, 0] == 1  # position of "b" in fit order
    assert indices[1, 0] == 3
    assert scores[0, 0] == pytest.approx(1.0, abs=1e-6)


def test_retriever_finds_renamed_variant():
    retriever = StructuralRetriever(k=1).fit(RTL)
    renamed = rename_identifiers(parse_rtl_block(RTL[3]), 1.0, seed=5)
    assert retriever.predict([renamed.rtl_text]) == ["3"]


def test_retriever_approx_mode_matches_exact_at_full_probe():
    texts = RTL * 3
    ids = [f"i{n}" for n in range(len(texts))]
    # duplicate texts are fine: ids differ, vectors tie, order is by id
    exact = StructuralRetriever(k=4).fit(texts, y=ids)
    approx = StructuralRetriever(k=4, nlist=3, nprobe=3).fit(texts, y=ids)
    queries = [RTL[0], RTL[2]]
    es, ei = exact.kneighbors(queries)
    as_, ai = approx.kneighbors(queries)
    assert np.array_equal(ei, ai)
    assert np.allclose(es, as_, atol=1e-6)


def test_retriever_validation():
    retriever = StructuralRetriever()
    with pytest.raises(NotFittedError):
        retriever.predict([RTL[0]])
    with pytest.raises(ValueError):
        StructuralRetriever().fit(RTL, y=["a", "b"])  # length mismatch
    with pytest.raises(ValueError):
        StructuralRetriever().fit(RTL, y=["a", "a", "b", "c"])  # dup ids
    fitted = StructuralRetriever(k=2).fit(RTL)
    with pytest.raises(ValueError):
        fitted.kneighbors([RTL[0]], n_neighbors=99)


def test_retriever_sklearn_params_contract():
    retriever = StructuralRetriever(k=7, nlist=2, nprobe=1, dim=128)
    params = retriever.get_params()
    assert params["k"] == 7
    assert params["nlist"] == 2
    cloned = clone(retriever)
    assert cloned.get_params() == params
    cloned.set_params(k=3)
    assert cloned.k == 3
