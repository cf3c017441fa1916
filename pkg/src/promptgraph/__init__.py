"""promptgraph: session recording and variant-graph analysis for
text-to-image prompting.

Images become nodes positioned by embedding similarity; word-level prompt
edits become weighted, bundled edges between them. The package bundles
the analysis pipeline, an append-only session store, generation/embedding
gateways with deterministic stubs, an HTTP service, and a CLI.
"""

from .clustering import ClusterAssignment, cluster
from .config import BuildParams, ServiceConfig, load_service_config
from .diffing import Alignment, EditOp, PromptDiff, diff_prompts, myers_align
from .embedding import (
    EmbeddingCache,
    HttpEmbeddingProvider,
    PairEmbedding,
    StubEmbeddingProvider,
    embed_records,
)
from .generation import GenerationRequest, HttpTxt2ImgBackend, StubImageBackend
from .graph import (
    BundledEdge,
    Edge,
    GraphParams,
    MergedEdge,
    StepPrompt,
    bundle,
    derive_edges,
    filter_bundles,
    merge_equal,
    node_weights,
    redistribute,
)
from .layout import (
    BubbleSpec,
    GlyphSpec,
    MiniMapModel,
    NodePlacement,
    StageOverride,
    StageSegmentation,
    compute_bubbles,
    minimap_model,
    place_glyphs,
    place_nodes,
    segment_stages,
)
from .pipeline import build_layout_document
from .projection import combine, procrustes_align, project, project_pair
from .prompts import (
    PhraseTable,
    PromptTokens,
    WeightedToken,
    detect_phrases,
    jaccard_similarity,
    parse_prompt,
    serialize_tokens,
)
from .store import GenerationParams, SessionStore, StepRecord
from .svg import export_svg

__version__ = "0.1.0"

__all__ = [
    "Alignment",
    "BubbleSpec",
    "BuildParams",
    "BundledEdge",
    "ClusterAssignment",
    "EditOp",
    "Edge",
    "EmbeddingCache",
    "GenerationParams",
    "GenerationRequest",
    "GlyphSpec",
    "GraphParams",
    "HttpEmbeddingProvider",
    "HttpTxt2ImgBackend",
    "MergedEdge",
    "MiniMapModel",
    "NodePlacement",
    "PairEmbedding",
    "PhraseTable",
    "PromptDiff",
    "PromptTokens",
    "ServiceConfig",
    "SessionStore",
    "StageOverride",
    "StageSegmentation",
    "StepPrompt",
    "StepRecord",
    "StubEmbeddingProvider",
    "StubImageBackend",
    "WeightedToken",
    "build_layout_document",
    "bundle",
    "cluster",
    "combine",
    "compute_bubbles",
    "derive_edges",
    "detect_phrases",
    "diff_prompts",
    "embed_records",
    "export_svg",
    "filter_bundles",
    "jaccard_similarity",
    "load_service_config",
    "merge_equal",
    "minimap_model",
    "myers_align",
    "node_weights",
    "parse_prompt",
    "place_glyphs",
    "place_nodes",
    "procrustes_align",
    "project",
    "project_pair",
    "redistribute",
    "segment_stages",
    "serialize_tokens",
]
