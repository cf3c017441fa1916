#!/usr/bin/env python3
"""Drive the HTTP API end to end: create a session, generate steps through
the stub backend, fetch the graph/history/mini-map payloads, and edit a
stage boundary.

Run: python3 demos/05_service_roundtrip.py
"""

import tempfile
import time
from pathlib import Path

from fastapi.testclient import TestClient

from promptgraph.config import ServiceConfig
from promptgraph.service import create_app

app = create_app(ServiceConfig(data_dir=Path(tempfile.mkdtemp())))
client = TestClient(app)

session = client.post("/api/v1/sessions", json={"title": "api demo"}).json()
sid = session["id"]
print(f"created session {sid}")

for i, prompt in enumerate(
    ["alpha beta", "beta alpha gamma", "alpha beta gamma delta", "omega psi chi"]
):
    job = client.post(
        f"/api/v1/sessions/{sid}/generate",
        json={"prompt": prompt, "n": 2, "seed": i, "width": 64, "height": 64},
    ).json()
    while True:
        status = client.get(f"/api/v1/sessions/{sid}/jobs/{job['job_id']}").json()
        if status["status"] != "pending":
            break
        time.sleep(0.02)
    print(f"  step {status['step']['order']}: {prompt!r} -> {status['status']}")

doc = client.get(f"/api/v1/sessions/{sid}/graph", params={"s_min": 0.5}).json()
print(f"\ngraph: {len(doc['nodes'])} nodes, "
      f"{sum(b['visible'] for b in doc['bundles'])} visible bundles, "
      f"stages {doc['stages']['ranges']}")

history = client.get(f"/api/v1/sessions/{sid}/history", params={"s_min": 0.5}).json()
for t in history["transitions"]:
    mark = "similar" if t["similar"] else "break"
    ops = [f"{o['action']}:{o['word']}" for o in (t["ops"] or [])]
    print(f"  {t['src_step']} -> {t['tgt_step']}  {mark}  sim={t['similarity']:.2f}  {ops}")

patched = client.patch(
    f"/api/v1/sessions/{sid}/stages", json={"op": "split", "step": 2},
    params={"s_min": 0.5},
).json()
print(f"\nafter split at step 2: stages {patched['stages']}")
