"""Text-to-image backends behind one interface.

The HTTP backend speaks the common txt2img JSON convention (prompt, seed,
batch_size, dimensions in; base64 PNGs out). The stub renders a seeded
two-color gradient per image: a pure function of (prompt, seed, index),
so offline runs and tests are exactly reproducible.
"""

from __future__ import annotations

import base64
import hashlib
import io
from dataclasses import dataclass
from typing import Protocol

import numpy as np
import requests
from PIL import Image

MAX_BATCH = 8


class GenerationError(RuntimeError):
    def __init__(self, message: str, retry_after: float | None = None, status: int | None = None):
        super().__init__(message)
        self.retry_after = retry_after
        self.status = status


@dataclass(frozen=True)
class GenerationRequest:
    prompt: str
    n: int = 1
    seed: int = 0
    width: int = 512
    height: int = 512

    def validate(self, max_batch: int = MAX_BATCH) -> None:
        if self.n < 1:
            raise ValueError("batch size must be >= 1")
        if self.n > max_batch:
            raise ValueError(f"batch size {self.n} exceeds the maximum of {max_batch}")
        if self.width % 8 or self.height % 8 or self.width <= 0 or self.height <= 0:
            raise ValueError("image dimensions must be positive multiples of 8")


class ImageBackend(Protocol):
    def generate(self, request: GenerationRequest) -> list[bytes]: ...


class StubImageBackend:
    """Deterministic offline backend producing gradient color fields."""

    def __init__(self, max_batch: int = MAX_BATCH):
        self.max_batch = max_batch

    def generate(self, request: GenerationRequest) -> list[bytes]:
        request.validate(self.max_batch)
        return [
            self._render(request.prompt, request.seed, i, request.width, request.height)
            for i in range(request.n)
        ]

    @staticmethod
    def _render(prompt: str, seed: int, index: int, width: int, height: int) -> bytes:
        material = f"{prompt}|{seed}|{index}".encode()
        rng = np.random.default_rng(
            int.from_bytes(hashlib.sha256(material).digest()[:8], "big")
        )
        c0 = rng.integers(0, 256, size=3)
        c1 = rng.integers(0, 256, size=3)
        horizontal = bool(rng.integers(0, 2))
        axis = np.linspace(0.0, 1.0, width if horizontal else height)
        t = np.tile(axis, (height, 1)) if horizontal else np.tile(axis[:, None], (1, width))
        pixels = ((1.0 - t[..., None]) * c0 + t[..., None] * c1).astype(np.uint8)
        buf = io.BytesIO()
        Image.fromarray(pixels, mode="RGB").save(buf, format="PNG")
        return buf.getvalue()


class HttpTxt2ImgBackend:
    """Client for txt2img HTTP services.

    POST {"prompt", "seed", "batch_size", "width", "height"} to the
    configured URL; the response carries {"images": [base64 PNG, ...]}.
    """

    def __init__(self, url: str, timeout: float = 120.0, max_batch: int = MAX_BATCH):
        self.url = url
        self.timeout = timeout
        self.max_batch = max_batch

    def generate(self, request: GenerationRequest) -> list[bytes]:
        request.validate(self.max_batch)
        payload = {
            "prompt": request.prompt,
            "seed": request.seed,
            "batch_size": request.n,
            "width": request.width,
            "height": request.height,
        }
        try:
            resp = requests.post(self.url, json=payload, timeout=self.timeout)
        except requests.Timeout as exc:
            raise GenerationError(f"backend timed out after {self.timeout}s", retry_after=5.0) from exc
        except requests.RequestException as exc:
            raise GenerationError(f"backend unreachable: {exc}") from exc
        if resp.status_code >= 500:
            retry_after = _parse_retry_after(resp.headers.get("Retry-After"))
            raise GenerationError(
                f"backend error {resp.status_code}", retry_after=retry_after or 5.0,
                status=resp.status_code,
            )
        if resp.status_code >= 400:
            raise GenerationError(f"backend rejected request: {resp.status_code}", status=resp.status_code)
        try:
            images_b64 = resp.json()["images"]
        except (ValueError, KeyError) as exc:
            raise GenerationError("backend response missing 'images'") from exc
        images = [base64.b64decode(s) for s in images_b64]
        if len(images) != request.n:
            raise GenerationError(
                f"backend returned {len(images)} images for batch of {request.n}"
            )
        return images


def _parse_retry_after(value: str | None) -> float | None:
    if value is None:
        return None
    try:
        return float(value)
    except ValueError:
        return None
