"""scikit-learn style facade over the fingerprint/embed/retrieve core.

These wrappers exist so the retrieval pipeline composes with sklearn
tooling (Pipeline, GridSearchCV, cross-validation); the underlying logic
lives in the rtl, fingerprint, embedding, and index modules.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .embedding import DEFAULT_DIM, hash_embed
from .fingerprint import fingerprint
from .index import DEFAULT_TAG_PENALTY, IndexEntry, build_approx, build_exact
from .kb import parse_rtl_block


def _validate_texts(X) -> List[str]:
    if isinstance(X, str):
        raise TypeError("X must be a sequence of RTL strings, not a single string")
    texts = list(X)
    if not texts:
        raise ValueError("X is empty")
    for i, t in enumerate(texts):
        if not isinstance(t, str):
            raise TypeError(f"X[{i}] is {type(t).__name__}, expected str")
        if not t.strip():
            raise ValueError(f"X[{i}] is blank")
    return texts


class FingerprintTransformer(BaseEstimator, TransformerMixin):
    """Map RTL always-block texts to their structural fingerprint strings."""

    def fit(self, X, y=None):
        _validate_texts(X)
        return self

    def transform(self, X) -> List[str]:
        return [fingerprint(parse_rtl_block(t)).full for t in _validate_texts(X)]


class TrigramHashEmbedder(BaseEstimator, TransformerMixin):
    """Map texts to unit-norm hashed-trigram vectors, stacked as a matrix."""

    def __init__(self, dim: int = DEFAULT_DIM):
        self.dim = dim

    def fit(self, X, y=None):
        _validate_texts(X)
        return self

    def transform(self, X) -> np.ndarray:
        texts = _validate_texts(X)
        return np.stack([hash_embed(t, dim=self.dim).values for t in texts])


class StructuralRetriever(BaseEstimator):
    """Nearest-exemplar retrieval by structural fingerprint similarity.

    fit takes RTL texts (y gives their ids; defaults to stringified
    positions), kneighbors returns (scores, indices) sklearn-style, and
    predict returns the best-match id per query. nlist=None searches
    exhaustively; an integer builds an inverted-file index over that many
    cells.
    """

    def __init__(
        self,
        k: int = 5,
        nlist: Optional[int] = None,
        nprobe: int = 4,
        tag_penalty: float = DEFAULT_TAG_PENALTY,
        dim: int = DEFAULT_DIM,
        seed: int = 0,
    ):
        self.k = k
        self.nlist = nlist
        self.nprobe = nprobe
        self.tag_penalty = tag_penalty
        self.dim = dim
        self.seed = seed

    def fit(self, X, y: Optional[Sequence[str]] = None):
        texts = _validate_texts(X)
        if y is None:
            ids = [str(i) for i in range(len(texts))]
        else:
            ids = [str(v) for v in y]
            if len(ids) != len(texts):
                raise ValueError(f"{len(ids)} ids for {len(texts)} texts")
            if len(set(ids)) != len(ids):
                raise ValueError("ids must be unique")
        blocks = [parse_rtl_block(t) for t in texts]
        prints = [fingerprint(b) for b in blocks]
        entries = [
            IndexEntry(
                id=ids[i],
                vector=hash_embed(prints[i].full, dim=self.dim),
                context_tag=prints[i].tag,
            )
            for i in range(len(texts))
        ]
        if self.nlist is None:
            self.index_ = build_exact(entries)
        else:
            self.index_ = build_approx(entries, nlist=self.nlist, seed=self.seed)
        self.ids_ = ids
        self.n_samples_ = len(texts)
        return self

    def _search(self, text: str, k: int):
        block = parse_rtl_block(text)
        fp = fingerprint(block)
        vector = hash_embed(fp.full, dim=self.dim)
        kwargs = dict(query_tag=fp.tag, tag_penalty=self.tag_penalty)
        if self.nlist is not None:
            kwargs["nprobe"] = min(self.nprobe, self.index_.nlist)
        return self.index_.search(vector, k, **kwargs)

    def kneighbors(
        self, X, n_neighbors: Optional[int] = None
    ) -> Tuple[np.ndarray, np.ndarray]:
        check_is_fitted(self, "index_")
        k = self.k if n_neighbors is None else n_neighbors
        if not 1 <= k <= self.n_samples_:
            raise ValueError(f"n_neighbors must be in [1, {self.n_samples_}]")
        texts = _validate_texts(X)
        position = {entry_id: i for i, entry_id in enumerate(self.ids_)}
        scores = np.zeros((len(texts), k), dtype=np.float32)
        indices = np.zeros((len(texts), k), dtype=np.int64)
        for row, text in enumerate(texts):
            for col, hit in enumerate(self._search(text, k)):
                scores[row, col] = hit.score
                indices[row, col] = position[hit.id]
        return scores, indices

    def predict(self, X) -> List[str]:
        check_is_fitted(self, "index_")
        return [self._search(t, 1)[0].id for t in _validate_texts(X)]
