#!/usr/bin/env python3
"""Capture real service responses for the web client's test suite.

Runs the HTTP app in-process against the bundled scenario and records the
upload, tree, previews at relax 0/1, commit and export payloads, plus the
CLI's sanitized CSV for the byte-identity check.  Output lands in
frontend/tests/fixtures/.
"""

from __future__ import annotations

import json
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from rulehide.cli import main as cli_main
from rulehide.dataset import write_csv
from rulehide.fixtures import SINGLE_HIDING_RULE, single_hiding_dataset
from rulehide.service import create_app

FIXTURE_DIR = Path(__file__).resolve().parent.parent / "frontend" / "tests" / "fixtures"


def main():
    FIXTURE_DIR.mkdir(parents=True, exist_ok=True)
    csv_text = write_csv(single_hiding_dataset())

    with tempfile.TemporaryDirectory() as tmp:
        app = create_app(Path(tmp) / "sessions")
        with TestClient(app) as client:
            created = client.post("/sessions", content=csv_text.encode()).json()
            sid = created["session"]
            tree = client.get(f"/sessions/{sid}/tree").json()
            preview_relax0 = client.post(
                f"/sessions/{sid}/preview", json={"requests": [SINGLE_HIDING_RULE]}
            ).json()
            preview_relax1 = client.post(
                f"/sessions/{sid}/preview",
                json={"requests": [SINGLE_HIDING_RULE], "relax": {"root": 1}},
            ).json()
            commit = client.post(
                f"/sessions/{sid}/commit",
                json={
                    "requests": [SINGLE_HIDING_RULE],
                    "relax": {"root": 1},
                    "dataset_hash": preview_relax1["dataset_hash"],
                },
            ).json()
            export_text = client.get(f"/sessions/{sid}/export").text

        src = Path(tmp) / "in.csv"
        src.write_text(csv_text)
        out = Path(tmp) / "out.csv"
        code = cli_main([
            "hide", str(src), "--request", SINGLE_HIDING_RULE,
            "--relax", "root:1", "--output", str(out),
        ])
        assert code == 0
        cli_text = out.read_text()

    # scrub the random session id so fixtures are stable
    def scrub(doc):
        doc = dict(doc)
        doc.pop("session", None)
        return doc

    (FIXTURE_DIR / "upload.json").write_text(json.dumps(scrub(created), indent=2, sort_keys=True))
    (FIXTURE_DIR / "tree.json").write_text(json.dumps(tree, indent=2, sort_keys=True))
    (FIXTURE_DIR / "preview_relax0.json").write_text(
        json.dumps(preview_relax0, indent=2, sort_keys=True)
    )
    (FIXTURE_DIR / "preview_relax1.json").write_text(
        json.dumps(preview_relax1, indent=2, sort_keys=True)
    )
    (FIXTURE_DIR / "commit_relax1.json").write_text(json.dumps(commit, indent=2, sort_keys=True))
    (FIXTURE_DIR / "export_relax1.csv").write_text(export_text)
    (FIXTURE_DIR / "cli_hide_relax1.csv").write_text(cli_text)
    (FIXTURE_DIR / "dataset.csv").write_text(csv_text)
    print(f"wrote fixtures to {FIXTURE_DIR}")
    print(f"export == cli bytes: {export_text == cli_text}")


if __name__ == "__main__":
    main()
