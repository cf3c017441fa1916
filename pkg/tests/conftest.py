"""Shared fixtures: synthetic sessions and random prompt generators."""

from __future__ import annotations

import random

import pytest

from promptgraph.generation import GenerationRequest, StubImageBackend
from promptgraph.graph import StepPrompt
from promptgraph.prompts import parse_prompt

# A 16-step session with three thematic phases and a return to the first
# theme, mirroring how artists iterate: grow a prompt, pivot, come back.
ARTIST_PROMPTS_16 = [
    "a quiet harbor at dawn",
    "a quiet harbor at dawn, fishing boats",
    "a quiet harbor at dawn, fishing boats, fog",
    "a quiet harbor at dawn, fishing boats, fog, oil painting",
    "a quiet harbor at dawn, fishing boats, oil painting",
    "a lighthouse on a cliff, oil painting",
    "a lighthouse on a cliff, oil painting, storm waves",
    "a lighthouse on a cliff, storm waves, dramatic sky",
    "a lighthouse on a cliff, storm waves, dramatic sky, (storm waves:1.3)",
    "city skyline at night, neon lights",
    "city skyline at night, neon lights, rain",
    "city skyline at night, neon lights, rain, cyberpunk",
    "city skyline at night, rain, cyberpunk, reflections",
    "a quiet harbor at dawn, neon lights",
    "a quiet harbor at dawn, neon lights, rain",
    "a quiet harbor at dawn, fishing boats, watercolor",
]

VOCAB = [
    "cat", "dog", "sky", "sea", "red", "blue", "vase", "tree", "neon",
    "fog", "oil", "grain", "wide", "macro", "storm", "dawn",
]


def random_prompt_walk(rng: random.Random, n_steps: int) -> list[str]:
    """A session-like sequence: each prompt mutates the previous one."""
    words = rng.sample(VOCAB, rng.randint(2, 5))
    prompts = [" ".join(words)]
    for _ in range(n_steps - 1):
        words = list(words)
        action = rng.random()
        if action < 0.4 and len(words) < 9:
            words.insert(rng.randrange(len(words) + 1), rng.choice(VOCAB))
        elif action < 0.6 and len(words) > 1:
            words.pop(rng.randrange(len(words)))
        elif action < 0.8 and len(words) > 1:
            i, j = rng.sample(range(len(words)), 2)
            words[i], words[j] = words[j], words[i]
        else:
            words.append(rng.choice(VOCAB))
        prompts.append(" ".join(words))
    return prompts


def make_step_prompts(
    prompts: list[str], images_per_step: list[int] | int = 1
) -> list[StepPrompt]:
    """StepPrompt list with synthetic image ids, no store involved."""
    if isinstance(images_per_step, int):
        images_per_step = [images_per_step] * len(prompts)
    return [
        StepPrompt(
            step_id=f"step-{i + 1}",
            temporal_order=i + 1,
            tokens=parse_prompt(p),
            image_ids=tuple(f"img-{i + 1}-{k}" for k in range(n)),
        )
        for i, (p, n) in enumerate(zip(prompts, images_per_step))
    ]


def stub_images(prompt: str, seed: int, n: int, size: int = 64) -> list[bytes]:
    backend = StubImageBackend()
    return backend.generate(
        GenerationRequest(prompt=prompt, n=n, seed=seed, width=size, height=size)
    )


@pytest.fixture
def store_root(tmp_path):
    return tmp_path / "data"
