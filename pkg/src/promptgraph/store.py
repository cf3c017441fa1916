"""Append-only, human-inspectable session storage.

Layout on disk:

    <root>/sessions/<id>/session.json    session metadata
    <root>/sessions/<id>/steps.log       one JSON record per line
    <root>/sessions/<id>/assets/<sha256>.png
    <root>/sessions/<id>/overrides.log   stage split/merge commands

Records are never rewritten. Assets are content-addressed and written
before the step line that references them, so a crash mid-append can
leave an orphan image but never a step with missing assets. A torn final
line in a log is dropped on read.
"""

from __future__ import annotations

import hashlib
import json
import os
import shutil
import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path

from .layout import StageOverride


class UnknownSession(KeyError):
    pass


class StoreError(RuntimeError):
    pass


@dataclass(frozen=True)
class Session:
    id: str
    title: str
    created_at: float
    step_count: int = 0


@dataclass(frozen=True)
class GenerationParams:
    seed: int = 0
    batch_size: int = 1
    width: int = 512
    height: int = 512
    model: str = "stub"

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "batch_size": self.batch_size,
            "width": self.width,
            "height": self.height,
            "model": self.model,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GenerationParams":
        return cls(
            seed=int(d.get("seed", 0)),
            batch_size=int(d.get("batch_size", 1)),
            width=int(d.get("width", 512)),
            height=int(d.get("height", 512)),
            model=str(d.get("model", "stub")),
        )


@dataclass(frozen=True)
class StepRecord:
    id: str
    session_id: str
    order: int
    prompt: str
    params: GenerationParams
    image_ids: tuple[str, ...]
    created_at: float
    status: str = "completed"  # completed | failed

    def to_line(self) -> str:
        return json.dumps(
            {
                "type": "step",
                "id": self.id,
                "session_id": self.session_id,
                "order": self.order,
                "prompt": self.prompt,
                "params": self.params.to_dict(),
                "image_ids": list(self.image_ids),
                "created_at": self.created_at,
                "status": self.status,
            },
            sort_keys=True,
        )

    @classmethod
    def from_line(cls, obj: dict) -> "StepRecord":
        return cls(
            id=obj["id"],
            session_id=obj["session_id"],
            order=obj["order"],
            prompt=obj["prompt"],
            params=GenerationParams.from_dict(obj.get("params", {})),
            image_ids=tuple(obj.get("image_ids", [])),
            created_at=obj.get("created_at", 0.0),
            status=obj.get("status", "completed"),
        )


@dataclass(frozen=True)
class ImageAsset:
    id: str  # = content hash
    content_hash: str
    byte_length: int
    format: str
    path: Path


@dataclass(frozen=True)
class SessionSnapshot:
    """Frozen view of a session; later appends do not show up here."""

    session: Session
    steps: tuple[StepRecord, ...]
    assets: dict[str, ImageAsset]
    overrides: tuple[StageOverride, ...]
    version: int  # event count, used as a cache key

    def asset_bytes(self, asset_id: str) -> bytes:
        return self.assets[asset_id].path.read_bytes()


def _append_line(path: Path, line: str) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(line + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def _read_lines(path: Path) -> list[dict]:
    """Parse a JSONL log, dropping a torn trailing line."""
    if not path.exists():
        return []
    out = []
    raw = path.read_text(encoding="utf-8")
    lines = raw.split("\n")
    complete = lines[:-1]  # a well-formed file ends with a newline
    trailing = lines[-1]
    for ln in complete:
        if not ln.strip():
            continue
        out.append(json.loads(ln))
    if trailing.strip():
        try:
            out.append(json.loads(trailing))
        except json.JSONDecodeError:
            pass  # torn write; the record never happened
    return out


class SessionStore:
    """Filesystem-backed session log with per-session write serialization."""

    def __init__(self, root: Path | str):
        self.root = Path(root)
        (self.root / "sessions").mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def _dir(self, session_id: str) -> Path:
        return self.root / "sessions" / session_id

    def _require(self, session_id: str) -> Path:
        d = self._dir(session_id)
        if not (d / "session.json").exists():
            raise UnknownSession(session_id)
        return d

    # -- sessions ----------------------------------------------------------

    def create_session(self, title: str = "") -> Session:
        session_id = uuid.uuid4().hex[:12]
        d = self._dir(session_id)
        (d / "assets").mkdir(parents=True)
        session = Session(
            id=session_id, title=title.strip() or "untitled", created_at=time.time()
        )
        meta = {"id": session.id, "title": session.title, "created_at": session.created_at}
        (d / "session.json").write_text(json.dumps(meta, sort_keys=True), encoding="utf-8")
        return session

    def delete_session(self, session_id: str) -> None:
        """Remove a whole session (used to roll back failed imports)."""
        d = self._require(session_id)
        shutil.rmtree(d)

    def list_sessions(self) -> list[Session]:
        out = []
        for meta_path in sorted((self.root / "sessions").glob("*/session.json")):
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            steps = self._read_steps(meta["id"])
            out.append(
                Session(
                    id=meta["id"],
                    title=meta["title"],
                    created_at=meta["created_at"],
                    step_count=len(steps),
                )
            )
        out.sort(key=lambda s: (s.created_at, s.id))
        return out

    def get_session(self, session_id: str) -> Session:
        d = self._require(session_id)
        meta = json.loads((d / "session.json").read_text(encoding="utf-8"))
        return Session(
            id=meta["id"],
            title=meta["title"],
            created_at=meta["created_at"],
            step_count=len(self._read_steps(session_id)),
        )

    # -- steps and assets --------------------------------------------------

    def _read_steps(self, session_id: str) -> list[StepRecord]:
        d = self._dir(session_id)
        records = []
        for obj in _read_lines(d / "steps.log"):
            if obj.get("type") == "step":
                records.append(StepRecord.from_line(obj))
        return records

    def _write_asset(self, session_id: str, data: bytes) -> ImageAsset:
        digest = hashlib.sha256(data).hexdigest()
        path = self._dir(session_id) / "assets" / f"{digest}.png"
        if not path.exists():
            tmp = path.with_suffix(".tmp")
            with open(tmp, "wb") as fh:
                fh.write(data)
                fh.flush()
                os.fsync(fh.fileno())
            os.replace(tmp, path)
        return ImageAsset(
            id=digest,
            content_hash=digest,
            byte_length=len(data),
            format="PNG",
            path=path,
        )

    def append_step(
        self,
        session_id: str,
        prompt: str,
        params: GenerationParams,
        images: list[bytes],
        status: str = "completed",
    ) -> StepRecord:
        """Atomically persist a step: assets first, then the record line."""
        self._require(session_id)
        with self._lock(session_id):
            assets = [self._write_asset(session_id, data) for data in images]
            steps = self._read_steps(session_id)
            order = max((s.order for s in steps), default=0) + 1
            record = StepRecord(
                id=f"{session_id}-s{order}",
                session_id=session_id,
                order=order,
                prompt=prompt,
                params=params,
                image_ids=tuple(a.id for a in assets),
                created_at=time.time(),
                status=status,
            )
            _append_line(self._dir(session_id) / "steps.log", record.to_line())
            return record

    def get_asset(self, session_id: str, asset_id: str) -> ImageAsset:
        d = self._require(session_id)
        path = d / "assets" / f"{asset_id}.png"
        if not path.exists():
            raise StoreError(f"missing asset {asset_id} in session {session_id}")
        return ImageAsset(
            id=asset_id,
            content_hash=asset_id,
            byte_length=path.stat().st_size,
            format="PNG",
            path=path,
        )

    # -- stage overrides ----------------------------------------------------

    def append_override(self, session_id: str, override: StageOverride) -> None:
        self._require(session_id)
        with self._lock(session_id):
            line = json.dumps({"op": override.op, "at": override.at}, sort_keys=True)
            _append_line(self._dir(session_id) / "overrides.log", line)

    def _read_overrides(self, session_id: str) -> list[StageOverride]:
        d = self._dir(session_id)
        out = []
        for obj in _read_lines(d / "overrides.log"):
            try:
                out.append(StageOverride(op=obj["op"], at=int(obj["at"])))
            except (KeyError, ValueError):
                continue
        return out

    # -- snapshots -----------------------------------------------------------

    def snapshot(self, session_id: str) -> SessionSnapshot:
        session = self.get_session(session_id)
        steps = tuple(self._read_steps(session_id))
        overrides = tuple(self._read_overrides(session_id))
        assets: dict[str, ImageAsset] = {}
        for step in steps:
            for asset_id in step.image_ids:
                if asset_id not in assets:
                    assets[asset_id] = self.get_asset(session_id, asset_id)
        return SessionSnapshot(
            session=session,
            steps=steps,
            assets=assets,
            overrides=overrides,
            version=len(steps) + len(overrides),
        )
