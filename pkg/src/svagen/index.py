"""Vector index: exact cosine search, an inverted-file approximate mode, a
raw-string baseline, and binary persistence.

Entries are stored sorted by id; searches sort stably on negated score, so
ties always break toward the ascending id without a second sort key. The
approximate mode clusters vectors with spherical k-means (seeded, k-means++
initialization, at most 25 iterations) and probes the nprobe nearest cells.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from svagen.embedding import Embedding
from svagen.errors import CorruptIndex, EmptyIndex, VersionMismatch

MAGIC = b"STLRIDX1"
DEFAULT_TAG_PENALTY = 2.0
_KMEANS_ITERS = 25


@dataclass(frozen=True)
class IndexEntry:
    id: str
    vector: Embedding
    context_tag: str = ""


@dataclass(frozen=True)
class SearchHit:
    id: str
    score: float
    rank: int


def _as_matrix(entries: Sequence[IndexEntry]) -> tuple[list[str], list[str], np.ndarray]:
    ids = [e.id for e in entries]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate entry ids in index")
    order = sorted(range(len(entries)), key=lambda i: ids[i])
    ids_sorted = [ids[i] for i in order]
    tags = [entries[i].context_tag for i in order]
    matrix = np.stack([entries[i].vector.values for i in order]).astype(np.float32)
    return ids_sorted, tags, matrix


def _row_scores(rows: np.ndarray, q: np.ndarray) -> np.ndarray:
    # per-row multiply-then-reduce instead of a matvec: the reduction order
    # then depends only on the row length, so exhaustive-probe IVF scores
    # are bitwise identical to exact scores (a BLAS matvec's accumulation
    # order varies with matrix height)
    return np.multiply(rows, q).sum(axis=1)


def _query_vector(query: Embedding | np.ndarray) -> np.ndarray:
    v = query.values if isinstance(query, Embedding) else query
    return np.asarray(v, dtype=np.float32)


def _penalize(
    scores: np.ndarray, tags: Sequence[str], query_tag: Optional[str], penalty: float
) -> np.ndarray:
    if query_tag is None:
        return scores
    mask = np.fromiter((t != query_tag for t in tags), dtype=bool, count=len(tags))
    if mask.any():
        scores = scores.copy()
        scores[mask] -= penalty
    return scores


class ExactIndex:
    """Brute-force cosine search; the oracle arm of every comparison."""

    kind = "exact"

    def __init__(self, ids: list[str], tags: list[str], matrix: np.ndarray):
        self.ids = ids
        self.tags = tags
        self.matrix = matrix
        self.dim = int(matrix.shape[1])

    def __len__(self) -> int:
        return len(self.ids)

    def search(
        self,
        query: Embedding | np.ndarray,
        k: int,
        query_tag: Optional[str] = None,
        tag_penalty: float = DEFAULT_TAG_PENALTY,
    ) -> list[SearchHit]:
        if not self.ids:
            raise EmptyIndex("search on empty index")
        if k < 1:
            raise ValueError("k must be >= 1")
        scores = _row_scores(self.matrix, _query_vector(query))
        scores = _penalize(scores, self.tags, query_tag, tag_penalty)
        order = np.argsort(-scores, kind="stable")[: min(k, len(self.ids))]
        return [
            SearchHit(id=self.ids[i], score=float(scores[i]), rank=rank + 1)
            for rank, i in enumerate(order)
        ]


class IvfIndex:
    """Inverted-file index over spherical k-means cells."""

    kind = "approx"

    def __init__(
        self,
        ids: list[str],
        tags: list[str],
        matrix: np.ndarray,
        centroids: np.ndarray,
        assignments: np.ndarray,
        seed: int,
    ):
        self.ids = ids
        self.tags = tags
        self.matrix = matrix
        self.centroids = centroids
        self.assignments = assignments
        self.seed = seed
        self.nlist = int(centroids.shape[0])
        self.dim = int(matrix.shape[1])
        # per-cell contiguous copies keep the probe scan cache-friendly, and
        # prebuilt id/tag arrays keep per-query work free of python loops
        self._cell_rows: list[np.ndarray] = []
        self._cell_members: list[np.ndarray] = []
        self._cell_ids: list[np.ndarray] = []
        self._cell_tags: list[np.ndarray] = []
        id_array = np.array(ids) if ids else np.empty(0, dtype="U1")
        tag_array = np.array(tags) if tags else np.empty(0, dtype="U1")
        for cell in range(self.nlist):
            members = np.nonzero(assignments == cell)[0]
            self._cell_members.append(members)
            self._cell_rows.append(np.ascontiguousarray(matrix[members]))
            self._cell_ids.append(id_array[members])
            self._cell_tags.append(tag_array[members])

    def __len__(self) -> int:
        return len(self.ids)

    def search(
        self,
        query: Embedding | np.ndarray,
        k: int,
        nprobe: int = 4,
        query_tag: Optional[str] = None,
        tag_penalty: float = DEFAULT_TAG_PENALTY,
    ) -> list[SearchHit]:
        if not self.ids:
            raise EmptyIndex("search on empty index")
        if k < 1:
            raise ValueError("k must be >= 1")
        if not 1 <= nprobe <= self.nlist:
            raise ValueError(f"nprobe must be in [1, {self.nlist}]")
        q = _query_vector(query)
        cell_scores = self.centroids @ q
        probe = np.argsort(-cell_scores, kind="stable")[:nprobe]
        scores = np.concatenate([_row_scores(self._cell_rows[c], q) for c in probe])
        if query_tag is not None:
            tags = np.concatenate([self._cell_tags[c] for c in probe])
            scores = np.where(tags != query_tag, scores - tag_penalty, scores)
        cand_ids = np.concatenate([self._cell_ids[c] for c in probe])
        order = np.lexsort((cand_ids, -scores))[: min(k, len(cand_ids))]
        return [
            SearchHit(id=str(cand_ids[i]), score=float(scores[i]), rank=rank + 1)
            for rank, i in enumerate(order)
        ]


def build_exact(entries: Sequence[IndexEntry]) -> ExactIndex:
    if not entries:
        raise EmptyIndex("cannot build an empty index")
    ids, tags, matrix = _as_matrix(entries)
    return ExactIndex(ids, tags, matrix)


def build_approx(entries: Sequence[IndexEntry], nlist: int, seed: int = 0) -> IvfIndex:
    if not entries:
        raise EmptyIndex("cannot build an empty index")
    if nlist > len(entries):
        raise ValueError("nlist cannot exceed the entry count")
    ids, tags, matrix = _as_matrix(entries)
    centroids, assignments = _spherical_kmeans(matrix, nlist, seed)
    return IvfIndex(ids, tags, matrix, centroids, assignments, seed)


# ---- k-means ----


def _spherical_kmeans(
    matrix: np.ndarray, nlist: int, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_init(matrix, nlist, rng)
    assignments = np.zeros(len(matrix), dtype=np.uint32)
    for _ in range(_KMEANS_ITERS):
        scores = matrix @ centroids.T  # cosine, everything is unit norm
        new_assignments = np.argmax(scores, axis=1).astype(np.uint32)
        _repair_empty_cells(matrix, centroids, new_assignments, nlist)
        if np.array_equal(new_assignments, assignments):
            assignments = new_assignments
            break
        assignments = new_assignments
        for cell in range(nlist):
            members = matrix[assignments == cell]
            mean = members.mean(axis=0)
            norm = float(np.linalg.norm(mean))
            if norm > 0.0:
                centroids[cell] = mean / norm
    return centroids.astype(np.float32), assignments


def _kmeans_pp_init(matrix: np.ndarray, nlist: int, rng: np.random.Generator) -> np.ndarray:
    n = len(matrix)
    chosen = [int(rng.integers(n))]
    # squared cosine distance to the nearest chosen center
    dist = 1.0 - matrix @ matrix[chosen[0]]
    np.maximum(dist, 0.0, out=dist)
    dist = dist**2
    for _ in range(1, nlist):
        total = float(dist.sum())
        if total <= 0.0:
            # all points coincide with chosen centers; spread arbitrarily
            candidate = int(rng.integers(n))
        else:
            candidate = int(rng.choice(n, p=dist / total))
        chosen.append(candidate)
        new_dist = 1.0 - matrix @ matrix[candidate]
        np.maximum(new_dist, 0.0, out=new_dist)
        dist = np.minimum(dist, new_dist**2)
    return matrix[chosen].astype(np.float32).copy()


def _repair_empty_cells(
    matrix: np.ndarray, centroids: np.ndarray, assignments: np.ndarray, nlist: int
) -> None:
    """Reassign the farthest point of the largest cluster into each empty cell."""
    for cell in range(nlist):
        if (assignments == cell).any():
            continue
        sizes = np.bincount(assignments, minlength=nlist)
        largest = int(np.argmax(sizes))
        members = np.nonzero(assignments == largest)[0]
        member_scores = matrix[members] @ centroids[largest]
        farthest = members[int(np.argmin(member_scores))]
        assignments[farthest] = cell
        centroids[cell] = matrix[farthest]


# ---- raw-string baseline ----


def search_rawstring(
    corpus: Sequence[str], query: str, k: int, ids: Optional[Sequence[str]] = None
) -> list[SearchHit]:
    """Linear scan: exact equality outranks everything, then longest common
    prefix. Exists as the baseline arm of the runtime comparison."""
    if not corpus:
        raise EmptyIndex("search on empty corpus")
    if ids is None:
        ids = [str(i) for i in range(len(corpus))]
    scored = []
    for entry_id, text in zip(ids, corpus):
        if text == query:
            score = 2.0
        else:
            limit = min(len(text), len(query))
            lcp = 0
            while lcp < limit and text[lcp] == query[lcp]:
                lcp += 1
            score = lcp / max(len(text), len(query), 1)
        scored.append((-score, entry_id))
    scored.sort()
    return [
        SearchHit(id=entry_id, score=-neg, rank=rank + 1)
        for rank, (neg, entry_id) in enumerate(scored[: min(k, len(scored))])
    ]


# ---- persistence ----
# Layout: MAGIC | dim u32 | count u32 | nlist u32 | seed u64 |
#         centroids (nlist*dim f32) | assignments (count u32) |
#         vectors (count*dim f32) | id table (u16 len + utf8 + u16 tag len +
#         utf8 per entry) | crc32c u32 over all preceding bytes.
# nlist == 0 marks an exact index (no centroid or assignment sections).


def persist(index: ExactIndex | IvfIndex, path: str) -> None:
    parts = [MAGIC]
    nlist = index.nlist if isinstance(index, IvfIndex) else 0
    seed = index.seed if isinstance(index, IvfIndex) else 0
    parts.append(struct.pack("<IIIQ", index.dim, len(index.ids), nlist, seed))
    if isinstance(index, IvfIndex):
        parts.append(index.centroids.astype("<f4").tobytes())
        parts.append(index.assignments.astype("<u4").tobytes())
    parts.append(index.matrix.astype("<f4").tobytes())
    for entry_id, tag in zip(index.ids, index.tags):
        id_bytes = entry_id.encode("utf-8")
        tag_bytes = tag.encode("utf-8")
        parts.append(struct.pack("<H", len(id_bytes)) + id_bytes)
        parts.append(struct.pack("<H", len(tag_bytes)) + tag_bytes)
    blob = b"".join(parts)
    blob += struct.pack("<I", crc32c(blob))
    with open(path, "wb") as fh:
        fh.write(blob)


def load(path: str) -> ExactIndex | IvfIndex:
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < len(MAGIC) + 4:
        raise CorruptIndex("file too short")
    if blob[: len(MAGIC)] != MAGIC:
        if blob[:7] == MAGIC[:7]:
            raise VersionMismatch(f"unsupported index version {blob[7:8]!r}")
        raise CorruptIndex("bad magic bytes")
    stored_crc = struct.unpack("<I", blob[-4:])[0]
    if crc32c(blob[:-4]) != stored_crc:
        raise CorruptIndex("checksum mismatch")
    view = memoryview(blob)
    offset = len(MAGIC)
    try:
        dim, count, nlist, seed = struct.unpack_from("<IIIQ", view, offset)
        offset += struct.calcsize("<IIIQ")
        centroids = assignments = None
        if nlist > 0:
            centroids = np.frombuffer(view, dtype="<f4", count=nlist * dim, offset=offset)
            centroids = centroids.reshape(nlist, dim).copy()
            offset += nlist * dim * 4
            assignments = np.frombuffer(view, dtype="<u4", count=count, offset=offset).copy()
            offset += count * 4
        matrix = np.frombuffer(view, dtype="<f4", count=count * dim, offset=offset)
        matrix = matrix.reshape(count, dim).copy()
        offset += count * dim * 4
        ids: list[str] = []
        tags: list[str] = []
        for _ in range(count):
            (id_len,) = struct.unpack_from("<H", view, offset)
            offset += 2
            ids.append(bytes(view[offset : offset + id_len]).decode("utf-8"))
            offset += id_len
            (tag_len,) = struct.unpack_from("<H", view, offset)
            offset += 2
            tags.append(bytes(view[offset : offset + tag_len]).decode("utf-8"))
            offset += tag_len
    except (struct.error, ValueError) as exc:
        raise CorruptIndex(f"truncated index file: {exc}") from exc
    if offset != len(blob) - 4:
        raise CorruptIndex("trailing bytes after id table")
    if nlist > 0:
        assert centroids is not None and assignments is not None
        return IvfIndex(ids, tags, matrix, centroids, assignments, int(seed))
    return ExactIndex(ids, tags, matrix)


# ---- CRC32C (Castagnoli) ----
# zlib.crc32 implements the IEEE-802.3 polynomial; the index format pins
# Castagnoli, so the table is built here (reflected 0x1EDC6F41, init and
# xor-out 0xFFFFFFFF).

_CRC32C_POLY = 0x82F63B78


def _build_crc_table() -> list[int]:
    table = []
    for byte in range(256):
        crc = byte
        for _ in range(8):
            crc = (crc >> 1) ^ _CRC32C_POLY if crc & 1 else crc >> 1
        table.append(crc)
    return table


_CRC32C_TABLE = _build_crc_table()


def crc32c(data: bytes) -> int:
    crc = 0xFFFFFFFF
    for byte in data:
        crc = _CRC32C_TABLE[(crc ^ byte) & 0xFF] ^ (crc >> 8)
    return crc ^ 0xFFFFFFFF
