"""Deterministic text embeddings via character-trigram feature hashing.

The built-in provider needs no model files and is byte-reproducible across
platforms: FNV-1a 64-bit hashes pick the bucket and the sign, accumulation
happens in integers, and the vector is L2-normalized once at the end.
A remote HTTP provider can be plugged in where a learned sentence embedding
is wanted; both produce unit-norm vectors of the same dimension.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np

from svagen.errors import DimensionMismatch, EmptyInput, ProviderError

DEFAULT_DIM = 384

_FNV_OFFSET = 14695981039346656037
_FNV_PRIME = 1099511628211
_MASK64 = (1 << 64) - 1


def _fnv1a(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


@dataclass(frozen=True)
class Embedding:
    values: np.ndarray = field(compare=False)
    provider_id: str = "fnv1a-trigram-384"

    @property
    def dim(self) -> int:
        return int(self.values.shape[0])


def hash_embed(text: str, dim: int = DEFAULT_DIM) -> Embedding:
    """Embed text as a unit-norm vector of hashed character trigrams.

    Bucket index comes from FNV-1a over the trigram with a 0x00 prefix byte,
    sign from the parity of a second hash with a 0x01 prefix.
    """
    if not text:
        raise EmptyInput("cannot embed empty text")
    counts = np.zeros(dim, dtype=np.int64)
    data = text.encode("utf-8", errors="replace")
    grams = (
        [data[i : i + 3] for i in range(len(data) - 2)] if len(data) >= 3 else [data]
    )
    for gram in grams:
        index = _fnv1a(b"\x00" + gram) % dim
        sign = 1 if _fnv1a(b"\x01" + gram) & 1 == 0 else -1
        counts[index] += sign
    values = counts.astype(np.float32)
    norm = float(np.linalg.norm(values))
    if norm == 0.0:
        # signs cancelled everywhere; fall back to a single deterministic bucket
        values[_fnv1a(b"\x00" + data) % dim] = 1.0
        norm = 1.0
    return Embedding(values=values / norm)


def cosine(a: Embedding | np.ndarray, b: Embedding | np.ndarray) -> float:
    va = a.values if isinstance(a, Embedding) else a
    vb = b.values if isinstance(b, Embedding) else b
    if va.shape != vb.shape:
        raise DimensionMismatch(f"{va.shape} vs {vb.shape}")
    return float(np.dot(va, vb))


class EmbeddingProvider(Protocol):
    id: str
    dim: int

    def embed_batch(self, texts: Sequence[str]) -> list[Embedding]: ...


class HashEmbeddingProvider:
    """Stateless built-in provider; safe for concurrent use."""

    def __init__(self, dim: int = DEFAULT_DIM):
        self.id = f"fnv1a-trigram-{dim}"
        self.dim = dim

    def embed_batch(self, texts: Sequence[str]) -> list[Embedding]:
        return [hash_embed(t, self.dim) for t in texts]


class RemoteEmbeddingProvider:
    """HTTP provider: POST a JSON array of strings, receive float arrays.

    Vectors are re-normalized defensively so the unit-norm invariant holds
    regardless of what the service returns.
    """

    def __init__(
        self,
        base_url: str,
        dim: int = DEFAULT_DIM,
        api_key: str | None = None,
        timeout: float = 30.0,
        transport=None,
    ):
        self.id = f"remote:{base_url}"
        self.dim = dim
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.timeout = timeout
        self._transport = transport or _requests_transport

    def embed_batch(self, texts: Sequence[str]) -> list[Embedding]:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        status, body = self._transport(self.base_url, list(texts), headers, self.timeout)
        if status != 200:
            raise ProviderError(status, str(body))
        out = []
        for row in body:
            values = np.asarray(row, dtype=np.float32)
            if values.shape != (self.dim,):
                raise ProviderError(200, f"expected dim {self.dim}, got {values.shape}")
            norm = float(np.linalg.norm(values))
            if norm == 0.0:
                raise ProviderError(200, "zero vector from provider")
            out.append(Embedding(values=values / norm, provider_id=self.id))
        if len(out) != len(texts):
            raise ProviderError(200, f"expected {len(texts)} vectors, got {len(out)}")
        return out


def _requests_transport(url: str, payload, headers, timeout):
    import requests

    response = requests.post(url, json=payload, headers=headers, timeout=timeout)
    try:
        body = response.json()
    except ValueError:
        body = response.text
    return response.status_code, body
