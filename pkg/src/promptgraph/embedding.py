"""Dual text/image embeddings for generated images.

Each image gets a (text_vec, image_vec) pair: the text vector encodes the
prompt that produced it, the image vector encodes the pixels. Vectors come
from a provider: either an HTTP encoder service (one POST per batch) or a
deterministic offline stub. Both produce unit-norm vectors of a fixed
dimension (512 by default), and results are cached by content hash.
"""

from __future__ import annotations

import base64
import hashlib
from dataclasses import dataclass, field
from typing import Protocol, Sequence

import numpy as np
import requests

from .prompts import parse_prompt

DIMENSION = 512


class EmbeddingError(RuntimeError):
    """Provider failure; carries the ids of the records affected."""

    def __init__(self, message: str, record_ids: tuple[str, ...] = ()):
        super().__init__(message)
        self.record_ids = record_ids


@dataclass(eq=False)
class PairEmbedding:
    image_id: str
    text_vec: np.ndarray
    image_vec: np.ndarray
    degraded: bool = False

    def __post_init__(self) -> None:
        if self.text_vec.ndim != 1 or self.image_vec.shape != self.text_vec.shape:
            raise ValueError("text_vec and image_vec must be 1-D with equal dimension")
        if not (np.all(np.isfinite(self.text_vec)) and np.all(np.isfinite(self.image_vec))):
            raise ValueError("embedding vectors must be finite")


class EmbeddingProvider(Protocol):
    dimension: int

    def embed(
        self, texts: Sequence[str], images: Sequence[bytes]
    ) -> tuple[list[np.ndarray], list[np.ndarray]]:
        """Return one vector per text and one per image, input order."""
        ...


def _seeded_unit_vector(seed_material: bytes, dimension: int) -> np.ndarray:
    seed = int.from_bytes(hashlib.sha256(seed_material).digest()[:8], "big")
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dimension)
    return v / np.linalg.norm(v)


class StubEmbeddingProvider:
    """Deterministic offline provider.

    text vector: normalized sum of hash-seeded unit vectors, one per parsed
    token, so prompts sharing words land near each other. image vector:
    hash-seeded unit vector of the raw bytes.
    """

    def __init__(self, dimension: int = DIMENSION):
        self.dimension = dimension

    def embed_text(self, text: str) -> np.ndarray:
        tokens = [t.text for t in parse_prompt(text).tokens]
        if not tokens:
            return _seeded_unit_vector(b"text-token:", self.dimension)
        total = np.zeros(self.dimension)
        for tok in tokens:
            total += _seeded_unit_vector(b"text-token:" + tok.encode(), self.dimension)
        norm = np.linalg.norm(total)
        if norm < 1e-12:
            return _seeded_unit_vector(b"text-token:", self.dimension)
        return total / norm

    def embed_image(self, data: bytes) -> np.ndarray:
        return _seeded_unit_vector(b"image-bytes:" + data, self.dimension)

    def embed(
        self, texts: Sequence[str], images: Sequence[bytes]
    ) -> tuple[list[np.ndarray], list[np.ndarray]]:
        return [self.embed_text(t) for t in texts], [self.embed_image(b) for b in images]


class HttpEmbeddingProvider:
    """Client for the embedding service protocol.

    POST {"texts": [...], "images": [base64 PNG, ...]} and expect
    {"text_vecs": [[...]], "image_vecs": [[...]]} with matching order.
    """

    def __init__(self, url: str, timeout: float = 30.0, dimension: int = DIMENSION):
        self.url = url
        self.timeout = timeout
        self.dimension = dimension

    def embed(
        self, texts: Sequence[str], images: Sequence[bytes]
    ) -> tuple[list[np.ndarray], list[np.ndarray]]:
        payload = {
            "texts": list(texts),
            "images": [base64.b64encode(b).decode("ascii") for b in images],
        }
        try:
            resp = requests.post(self.url, json=payload, timeout=self.timeout)
            resp.raise_for_status()
            body = resp.json()
        except requests.RequestException as exc:
            raise EmbeddingError(f"embedding provider at {self.url} failed: {exc}") from exc
        text_vecs = [np.asarray(v, dtype=float) for v in body.get("text_vecs", [])]
        image_vecs = [np.asarray(v, dtype=float) for v in body.get("image_vecs", [])]
        if len(text_vecs) != len(texts) or len(image_vecs) != len(images):
            raise EmbeddingError(
                f"embedding provider returned {len(text_vecs)}/{len(image_vecs)} vectors "
                f"for {len(texts)}/{len(images)} inputs"
            )
        for v in (*text_vecs, *image_vecs):
            if v.shape != (self.dimension,) or not np.all(np.isfinite(v)):
                raise EmbeddingError("embedding provider returned a malformed vector")
        return text_vecs, image_vecs


@dataclass
class EmbeddingCache:
    """Content-hash keyed vector cache shared across builds."""

    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    @staticmethod
    def text_key(text: str) -> str:
        return "text:" + hashlib.sha256(text.encode()).hexdigest()

    @staticmethod
    def image_key(data: bytes) -> str:
        return "image:" + hashlib.sha256(data).hexdigest()

    def get(self, key: str) -> np.ndarray | None:
        return self.vectors.get(key)

    def put(self, key: str, vec: np.ndarray) -> None:
        self.vectors[key] = vec


def embed_records(
    records: Sequence[tuple[str, Sequence[tuple[str, bytes]]]],
    provider: EmbeddingProvider,
    cache: EmbeddingCache | None = None,
    fallback: StubEmbeddingProvider | None = None,
) -> list[PairEmbedding]:
    """Embed (prompt, [(image_id, png_bytes), ...]) records.

    One PairEmbedding per image; the text vector is shared by every image
    of the record's prompt. Uncached texts/images go to the provider in a
    single batch. On provider failure the error surfaces with the affected
    record ids, unless a stub ``fallback`` was explicitly supplied, in
    which case the build proceeds with degraded vectors flagged as such.
    """
    cache = cache if cache is not None else EmbeddingCache()

    want_texts: dict[str, str] = {}
    want_images: dict[str, bytes] = {}
    for prompt, images in records:
        tkey = EmbeddingCache.text_key(prompt)
        if cache.get(tkey) is None:
            want_texts[tkey] = prompt
        for _, data in images:
            ikey = EmbeddingCache.image_key(data)
            if cache.get(ikey) is None:
                want_images[ikey] = data

    degraded = False
    if want_texts or want_images:
        text_keys = list(want_texts)
        image_keys = list(want_images)
        try:
            text_vecs, image_vecs = provider.embed(
                [want_texts[k] for k in text_keys], [want_images[k] for k in image_keys]
            )
        except EmbeddingError:
            if fallback is None:
                affected = tuple(
                    image_id for _, images in records for image_id, _ in images
                )
                raise EmbeddingError(
                    "embedding provider failed and no degraded fallback is allowed",
                    record_ids=affected,
                )
            degraded = True
            text_vecs, image_vecs = fallback.embed(
                [want_texts[k] for k in text_keys], [want_images[k] for k in image_keys]
            )
        for key, vec in zip(text_keys, text_vecs):
            cache.put(key, vec)
        for key, vec in zip(image_keys, image_vecs):
            cache.put(key, vec)

    out = []
    for prompt, images in records:
        text_vec = cache.get(EmbeddingCache.text_key(prompt))
        assert text_vec is not None
        for image_id, data in images:
            image_vec = cache.get(EmbeddingCache.image_key(data))
            assert image_vec is not None
            out.append(
                PairEmbedding(
                    image_id=image_id,
                    text_vec=text_vec,
                    image_vec=image_vec,
                    degraded=degraded,
                )
            )
    return out
