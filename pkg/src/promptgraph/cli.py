"""Command line entry points: serve, import, build, export-svg."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import BuildParams, ServiceConfig, load_service_config
from .pipeline import build_layout_document
from .store import GenerationParams, SessionStore
from .svg import export_svg


def _add_service_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, default=None, help="JSON config file")
    p.add_argument("--data-dir", type=Path, default=None)
    p.add_argument("--backend-url", default=None)
    p.add_argument("--backend-mode", choices=["stub", "real"], default=None)
    p.add_argument("--embed-url", default=None)
    p.add_argument("--embed-mode", choices=["stub", "real"], default=None)
    p.add_argument("--seed", type=int, default=None)


def _service_config(args: argparse.Namespace, **extra) -> ServiceConfig:
    return load_service_config(
        config_file=args.config,
        data_dir=args.data_dir,
        backend_url=args.backend_url,
        backend_mode=args.backend_mode,
        embed_url=args.embed_url,
        embed_mode=args.embed_mode,
        seed=args.seed,
        **extra,
    )


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    config = _service_config(
        args,
        port=args.port,
        host=args.host,
        frontend_dir=args.frontend_dir,
    )
    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")
    return 0


def cmd_import(args: argparse.Namespace) -> int:
    config = _service_config(args)
    records = []
    try:
        with open(args.file, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValueError(f"line {lineno}: not valid JSON ({exc})")
                if "prompt" not in obj:
                    raise ValueError(f"line {lineno}: missing 'prompt'")
                image_paths = [Path(p) for p in obj.get("images", [])]
                blobs = []
                for p in image_paths:
                    if not p.is_absolute():
                        p = Path(args.file).parent / p
                    if not p.exists():
                        raise ValueError(f"line {lineno}: missing image file {p}")
                    blobs.append(p.read_bytes())
                records.append((obj, blobs))
    except (OSError, ValueError) as exc:
        print(f"import failed: {exc}", file=sys.stderr)
        return 1

    store = SessionStore(config.data_dir)
    title = args.title or Path(args.file).stem
    session = store.create_session(title)
    try:
        for obj, blobs in records:
            params = GenerationParams(
                seed=int(obj.get("seed", 0)),
                batch_size=max(1, len(blobs)),
                model=str(obj.get("model", "import")),
            )
            store.append_step(session.id, obj["prompt"], params, blobs)
    except Exception as exc:  # roll back: no partial sessions
        store.delete_session(session.id)
        print(f"import failed: {exc}", file=sys.stderr)
        return 1
    print(f"imported {len(records)} steps into session {session.id}")
    return 0


def cmd_build(args: argparse.Namespace) -> int:
    from .embedding import HttpEmbeddingProvider, StubEmbeddingProvider

    config = _service_config(args)
    store = SessionStore(config.data_dir)
    try:
        snapshot = store.snapshot(args.session)
    except KeyError:
        print(f"build failed: unknown session {args.session}", file=sys.stderr)
        return 1
    params = BuildParams(
        alpha=args.alpha,
        s_min=args.s_min,
        w_min=args.w_min,
        cluster_distance=args.cluster_distance,
        grouping_mode=args.grouping_mode,
        seed=config.seed,
    )
    if config.embed_mode == "real":
        provider = HttpEmbeddingProvider(config.embed_url, config.embed_timeout)
    else:
        provider = StubEmbeddingProvider()
    try:
        doc = build_layout_document(snapshot, params, provider=provider)
    except Exception as exc:
        print(f"build failed: {exc}", file=sys.stderr)
        return 1
    text = json.dumps(doc, sort_keys=True, indent=2)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"layout written to {args.out}")
    else:
        print(text)
    return 0


def cmd_export_svg(args: argparse.Namespace) -> int:
    try:
        doc = json.loads(Path(args.layout).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        print(f"export failed: {exc}", file=sys.stderr)
        return 1
    svg = export_svg(doc)
    if args.out:
        Path(args.out).write_text(svg, encoding="utf-8")
        print(f"svg written to {args.out}")
    else:
        print(svg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="promptgraph",
        description="Record prompting sessions and build image variant graphs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    _add_service_flags(p_serve)
    p_serve.add_argument("--host", default=None)
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--frontend-dir", type=Path, default=None)
    p_serve.set_defaults(func=cmd_serve)

    p_import = sub.add_parser("import", help="load a session from a records file")
    _add_service_flags(p_import)
    p_import.add_argument("file", help="line-delimited JSON records")
    p_import.add_argument("--title", default=None)
    p_import.set_defaults(func=cmd_import)

    p_build = sub.add_parser("build", help="emit a layout document for a session")
    _add_service_flags(p_build)
    p_build.add_argument("--session", required=True)
    p_build.add_argument("--alpha", type=float, default=0.5)
    p_build.add_argument("--s-min", type=float, default=0.6)
    p_build.add_argument("--w-min", type=float, default=None)
    p_build.add_argument("--cluster-distance", type=float, default=0.7)
    p_build.add_argument("--grouping-mode", choices=["cluster", "stage"], default="cluster")
    p_build.add_argument("--out", default=None)
    p_build.set_defaults(func=cmd_build)

    p_svg = sub.add_parser("export-svg", help="render a layout document as SVG")
    p_svg.add_argument("--layout", required=True)
    p_svg.add_argument("--out", default=None)
    p_svg.set_defaults(func=cmd_export_svg)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
