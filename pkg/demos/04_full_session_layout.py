#!/usr/bin/env python3
"""Record a full synthetic session and build the complete layout document,
then render it to SVG. Everything runs on the deterministic stubs.

Run: python3 demos/04_full_session_layout.py
Outputs: /tmp/promptgraph_demo/layout.json and layout.svg
"""

import json
import tempfile
from pathlib import Path

from promptgraph import (
    BuildParams,
    GenerationParams,
    GenerationRequest,
    SessionStore,
    StubImageBackend,
    build_layout_document,
    export_svg,
)

PROMPTS = [
    "a quiet harbor at dawn",
    "a quiet harbor at dawn, fishing boats",
    "a quiet harbor at dawn, fishing boats, fog",
    "a quiet harbor at dawn, fishing boats, oil painting",
    "a lighthouse on a cliff, oil painting",
    "a lighthouse on a cliff, oil painting, storm waves",
    "city skyline at night, neon lights",
    "city skyline at night, neon lights, rain",
]

out_dir = Path(tempfile.gettempdir()) / "promptgraph_demo"
out_dir.mkdir(exist_ok=True)

store = SessionStore(out_dir / "data")
session = store.create_session("demo session")
backend = StubImageBackend()
for i, prompt in enumerate(PROMPTS):
    images = backend.generate(
        GenerationRequest(prompt=prompt, n=2, seed=i, width=64, height=64)
    )
    store.append_step(session.id, prompt, GenerationParams(seed=i, batch_size=2), images)

doc = build_layout_document(store.snapshot(session.id), BuildParams())

print(f"session {session.id}: {len(doc['nodes'])} nodes")
print(f"clusters: {len({n['cluster'] for n in doc['nodes']})}")
print(f"bundles: {len(doc['bundles'])} ({sum(b['visible'] for b in doc['bundles'])} visible)")
print(f"glyphs: {len(doc['glyphs'])}")
print(f"stages: {doc['stages']['ranges']}")
print(f"mini-map: {len(doc['minimap']['dots'])} dots, {len(doc['minimap']['arcs'])} arcs")

layout_path = out_dir / "layout.json"
layout_path.write_text(json.dumps(doc, indent=2, sort_keys=True))
svg_path = out_dir / "layout.svg"
svg_path.write_text(export_svg(doc))
print(f"\nwrote {layout_path}\nwrote {svg_path}")
