"""Build and deployment configuration.

BuildParams are the per-request pipeline knobs (the control-panel
sliders plus layout constants). ServiceConfig is deployment wiring:
defaults < config file < environment < CLI flags.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

GROUPING_MODES = ("cluster", "stage")

ENV_PREFIX = "PROMPTGRAPH_"


@dataclass(frozen=True)
class BuildParams:
    alpha: float = 0.5
    s_min: float = 0.6
    w_min: float | None = None  # None = auto threshold from n_e
    n_e: int = 12
    cluster_distance: float = 0.7
    grouping_mode: str = "cluster"
    seed: int = 7
    viewport: tuple[float, float] = (1200.0, 800.0)
    thumb_size: float = 64.0
    rect_size: float = 16.0
    redistribute_passes: int = 1

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")
        if not 0.0 <= self.s_min <= 1.0:
            raise ValueError("s_min must be in [0, 1]")
        if self.w_min is not None and self.w_min < 0:
            raise ValueError("w_min must be nonnegative")
        if self.cluster_distance <= 0:
            raise ValueError("cluster_distance must be positive")
        if self.grouping_mode not in GROUPING_MODES:
            raise ValueError(f"grouping_mode must be one of {GROUPING_MODES}")

    def cache_key(self) -> tuple:
        return (
            self.alpha,
            self.s_min,
            self.w_min,
            self.n_e,
            self.cluster_distance,
            self.grouping_mode,
            self.seed,
            self.viewport,
            self.thumb_size,
            self.rect_size,
            self.redistribute_passes,
        )


@dataclass(frozen=True)
class ServiceConfig:
    data_dir: Path = Path("./data")
    host: str = "127.0.0.1"
    port: int = 8765
    backend_mode: str = "stub"  # stub | real
    backend_url: str = "http://127.0.0.1:7860/sdapi/v1/txt2img"
    backend_timeout: float = 120.0
    embed_mode: str = "stub"  # stub | real
    embed_url: str = "http://127.0.0.1:8001/embed"
    embed_timeout: float = 30.0
    embed_fallback_stub: bool = False
    seed: int = 7
    max_batch: int = 8
    frontend_dir: Path | None = None
    # interactive mode: seed each rebuild from the previous frame so nodes
    # stay put as the session grows; off = builds are pure functions
    incremental_layout: bool = False

    def __post_init__(self) -> None:
        if self.backend_mode not in ("stub", "real"):
            raise ValueError("backend_mode must be 'stub' or 'real'")
        if self.embed_mode not in ("stub", "real"):
            raise ValueError("embed_mode must be 'stub' or 'real'")


_FILE_KEYS = {
    "data_dir": ("data_dir", Path),
    "host": ("host", str),
    "port": ("port", int),
    "seed": ("seed", int),
    "max_batch": ("max_batch", int),
    "frontend_dir": ("frontend_dir", Path),
}
_FILE_KEYS["incremental_layout"] = ("incremental_layout", bool)
_NESTED_KEYS = {
    "backend": {"mode": "backend_mode", "url": "backend_url", "timeout": "backend_timeout"},
    "embed": {
        "mode": "embed_mode",
        "url": "embed_url",
        "timeout": "embed_timeout",
        "fallback_stub": "embed_fallback_stub",
    },
}
def _to_bool(raw: str) -> bool:
    return raw.strip().lower() in ("1", "true", "yes", "on")


_ENV_KEYS = {
    "DATA_DIR": ("data_dir", Path),
    "HOST": ("host", str),
    "PORT": ("port", int),
    "BACKEND_MODE": ("backend_mode", str),
    "BACKEND_URL": ("backend_url", str),
    "BACKEND_TIMEOUT": ("backend_timeout", float),
    "EMBED_MODE": ("embed_mode", str),
    "EMBED_URL": ("embed_url", str),
    "EMBED_TIMEOUT": ("embed_timeout", float),
    "SEED": ("seed", int),
    "MAX_BATCH": ("max_batch", int),
    "FRONTEND_DIR": ("frontend_dir", Path),
    "INCREMENTAL_LAYOUT": ("incremental_layout", _to_bool),
}


def load_service_config(
    config_file: Path | str | None = None,
    env: dict[str, str] | None = None,
    **overrides,
) -> ServiceConfig:
    """Layered config: defaults, then JSON file, then env, then kwargs."""
    values: dict = {}
    if config_file is not None:
        raw = json.loads(Path(config_file).read_text(encoding="utf-8"))
        for key, (attr, cast) in _FILE_KEYS.items():
            if key in raw:
                values[attr] = cast(raw[key])
        for section, mapping in _NESTED_KEYS.items():
            section_raw = raw.get(section, {})
            for key, attr in mapping.items():
                if key in section_raw:
                    current = section_raw[key]
                    if attr.endswith("timeout"):
                        current = float(current)
                    values[attr] = current

    env = env if env is not None else dict(os.environ)
    for key, (attr, cast) in _ENV_KEYS.items():
        raw_val = env.get(ENV_PREFIX + key)
        if raw_val is not None:
            values[attr] = cast(raw_val)

    for key, val in overrides.items():
        if val is not None:
            values[key] = val
    return ServiceConfig(**values)
