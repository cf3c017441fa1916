import json
import xml.etree.ElementTree as ET

import pytest

from conftest import stub_images
from promptgraph.cli import main
from promptgraph.store import SessionStore


def write_records_file(tmp_path, entries):
    path = tmp_path / "records.jsonl"
    lines = []
    for prompt, image_names in entries:
        refs = []
        for k, name in enumerate(image_names):
            img = tmp_path / name
            img.write_bytes(stub_images(prompt, k, 1)[0])
            refs.append(name)
        lines.append(json.dumps({"prompt": prompt, "seed": 1, "images": refs}))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestImport:
    def test_import_creates_session(self, tmp_path, capsys):
        records = write_records_file(
            tmp_path, [("a cat", ["a.png"]), ("a white cat", ["b.png"])]
        )
        data_dir = tmp_path / "data"
        code = main(["import", str(records), "--data-dir", str(data_dir)])
        assert code == 0
        store = SessionStore(data_dir)
        (session,) = store.list_sessions()
        assert session.step_count == 2
        snap = store.snapshot(session.id)
        assert snap.steps[0].prompt == "a cat"

    def test_malformed_file_no_partial_session(self, tmp_path, capsys):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"prompt": "ok"}\nnot json at all\n', encoding="utf-8")
        data_dir = tmp_path / "data"
        code = main(["import", str(path), "--data-dir", str(data_dir)])
        assert code == 1
        assert SessionStore(data_dir).list_sessions() == []

    def test_missing_image_file_fails_cleanly(self, tmp_path):
        path = tmp_path / "refs.jsonl"
        path.write_text(
            json.dumps({"prompt": "p", "images": ["ghost.png"]}) + "\n",
            encoding="utf-8",
        )
        data_dir = tmp_path / "data"
        assert main(["import", str(path), "--data-dir", str(data_dir)]) == 1
        assert SessionStore(data_dir).list_sessions() == []


class TestBuild:
    def test_build_writes_layout_document(self, tmp_path):
        records = write_records_file(
            tmp_path,
            [("a cat", ["a.png"]), ("a white cat", ["b.png"]), ("a white cat, hd", ["c.png"])],
        )
        data_dir = tmp_path / "data"
        assert main(["import", str(records), "--data-dir", str(data_dir)]) == 0
        (session,) = SessionStore(data_dir).list_sessions()
        out = tmp_path / "layout.json"
        code = main(
            [
                "build",
                "--data-dir",
                str(data_dir),
                "--session",
                session.id,
                "--s-min",
                "0.3",
                "--out",
                str(out),
            ]
        )
        assert code == 0
        doc = json.loads(out.read_text())
        assert len(doc["nodes"]) == 3
        assert doc["params"]["s_min"] == 0.3

    def test_unknown_session_exit_1(self, tmp_path):
        assert (
            main(["build", "--data-dir", str(tmp_path / "d"), "--session", "nope"]) == 1
        )


class TestExportSvg:
    def test_well_formed_svg(self, tmp_path):
        records = write_records_file(
            tmp_path, [("a cat", ["a.png"]), ("a white cat", ["b.png"])]
        )
        data_dir = tmp_path / "data"
        main(["import", str(records), "--data-dir", str(data_dir)])
        (session,) = SessionStore(data_dir).list_sessions()
        layout = tmp_path / "layout.json"
        main(
            [
                "build", "--data-dir", str(data_dir), "--session", session.id,
                "--s-min", "0.3", "--out", str(layout),
            ]
        )
        svg_path = tmp_path / "out.svg"
        assert main(["export-svg", "--layout", str(layout), "--out", str(svg_path)]) == 0
        root = ET.parse(svg_path).getroot()
        assert root.tag.endswith("svg")
        doc = json.loads(layout.read_text())
        rects = [el for el in root.iter() if el.tag.endswith("rect")]
        assert len(rects) >= len(doc["nodes"])

    def test_missing_layout_exit_1(self, tmp_path):
        assert main(["export-svg", "--layout", str(tmp_path / "none.json")]) == 1


def test_cli_requires_subcommand():
    with pytest.raises(SystemExit):
        main([])
