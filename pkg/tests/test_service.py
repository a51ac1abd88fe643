import socket
import subprocess
import sys
import time

import httpx
import pytest
from fastapi.testclient import TestClient

from rulehide.cli import main
from rulehide.dataset import write_csv
from rulehide.fixtures import SINGLE_HIDING_RULE, single_hiding_dataset
from rulehide.service import create_app


@pytest.fixture()
def client(tmp_path):
    app = create_app(tmp_path / "sessions")
    with TestClient(app) as client:
        yield client


@pytest.fixture()
def fixture_csv_text():
    return write_csv(single_hiding_dataset())


@pytest.fixture()
def session(client, fixture_csv_text):
    response = client.post("/sessions", content=fixture_csv_text.encode())
    assert response.status_code == 201
    return response.json()


class TestSessionLifecycle:
    def test_upload_returns_tree_and_rules(self, session):
        assert session["tree"]["root"]["attribute"] == "a1"
        assert SINGLE_HIDING_RULE in session["rules"]

    def test_bad_csv_rejected(self, client):
        response = client.post("/sessions", content=b"x,y\n1")
        assert response.status_code == 422
        assert response.json()["code"] == "bad_dataset"

    def test_get_tree(self, client, session):
        response = client.get(f"/sessions/{session['session']}/tree")
        assert response.status_code == 200
        assert response.json()["tree"]["root"]["p"] == 541

    def test_unknown_session_404(self, client):
        assert client.get("/sessions/nope/tree").status_code == 404
        assert client.delete("/sessions/nope").status_code == 404

    def test_delete(self, client, session):
        sid = session["session"]
        assert client.delete(f"/sessions/{sid}").json() == {"ok": True}
        assert client.get(f"/sessions/{sid}/tree").status_code == 404

    def test_sessions_survive_restart(self, tmp_path, fixture_csv_text):
        data_dir = tmp_path / "persist"
        with TestClient(create_app(data_dir)) as first:
            sid = first.post("/sessions", content=fixture_csv_text.encode()).json()["session"]
        with TestClient(create_app(data_dir)) as second:
            assert second.get(f"/sessions/{sid}/tree").status_code == 200


class TestPreview:
    def test_single_hiding_totals(self, client, session):
        sid = session["session"]
        response = client.post(
            f"/sessions/{sid}/preview", json={"requests": [SINGLE_HIDING_RULE]}
        )
        assert response.status_code == 200
        doc = response.json()
        assert doc["plan"]["total_added"] == 1000
        assert doc["report"]["all_hidden"] is True

    def test_relaxed_totals(self, client, session):
        sid = session["session"]
        response = client.post(
            f"/sessions/{sid}/preview",
            json={"requests": [SINGLE_HIDING_RULE], "relax": {"root": 1}},
        )
        assert response.json()["plan"]["total_added"] == 700

    def test_empty_preview_is_identity_report(self, client, session):
        sid = session["session"]
        doc = client.post(f"/sessions/{sid}/preview", json={"requests": []}).json()
        assert doc["plan"]["total_added"] == 0
        assert doc["plan"]["nodes"] == []
        assert doc["report"]["syntactic_similarity"] == 1.0
        assert doc["report"]["semantic_agreement"] == 1.0

    def test_preview_is_side_effect_free(self, client, session, fixture_csv_text):
        sid = session["session"]
        body = {"requests": [SINGLE_HIDING_RULE]}
        first = client.post(f"/sessions/{sid}/preview", json=body).json()
        second = client.post(f"/sessions/{sid}/preview", json=body).json()
        assert first == second
        assert client.get(f"/sessions/{sid}/export").text == fixture_csv_text

    def test_rule_not_found_422(self, client, session):
        sid = session["session"]
        response = client.post(
            f"/sessions/{sid}/preview", json={"requests": ["a1=1,a2=1 => p"]}
        )
        assert response.status_code == 422
        assert response.json()["code"] == "rule_not_found"


class TestCommit:
    def test_commit_replaces_dataset(self, client, session):
        sid = session["session"]
        preview = client.post(
            f"/sessions/{sid}/preview", json={"requests": [SINGLE_HIDING_RULE]}
        ).json()
        response = client.post(
            f"/sessions/{sid}/commit",
            json={"requests": [SINGLE_HIDING_RULE], "dataset_hash": preview["dataset_hash"]},
        )
        assert response.status_code == 200
        exported = client.get(f"/sessions/{sid}/export").text
        assert exported.count("\n") == 2001  # header + 2000 rows

    def test_stale_hash_409(self, client, session):
        sid = session["session"]
        response = client.post(
            f"/sessions/{sid}/commit",
            json={"requests": [SINGLE_HIDING_RULE], "dataset_hash": "0" * 64},
        )
        assert response.status_code == 409
        assert response.json()["code"] == "stale_preview"

    def test_serve_command_boots_real_server(self, tmp_path, fixture_csv_text):
        with socket.socket() as probe:
            probe.bind(("127.0.0.1", 0))
            port = probe.getsockname()[1]
        proc = subprocess.Popen(
            [
                sys.executable, "-m", "rulehide.cli", "serve",
                "--port", str(port), "--data-dir", str(tmp_path / "sessions"),
            ],
            stdout=subprocess.DEVNULL,
            stderr=subprocess.DEVNULL,
        )
        try:
            base = f"http://127.0.0.1:{port}"
            deadline = time.monotonic() + 15
            created = None
            while time.monotonic() < deadline:
                try:
                    created = httpx.post(f"{base}/sessions", content=fixture_csv_text)
                    break
                except httpx.TransportError:
                    time.sleep(0.2)
            assert created is not None and created.status_code == 201
            sid = created.json()["session"]
            tree = httpx.get(f"{base}/sessions/{sid}/tree")
            assert tree.status_code == 200
            assert tree.json()["tree"]["root"]["p"] == 541
            assert httpx.get(f"{base}/sessions/missing/tree").status_code == 404
        finally:
            proc.terminate()
            proc.wait(timeout=10)

    def test_commit_export_matches_cli_bytes(self, client, session, tmp_path, fixture_csv_text):
        sid = session["session"]
        preview = client.post(
            f"/sessions/{sid}/preview",
            json={"requests": [SINGLE_HIDING_RULE], "relax": {"root": 1}},
        ).json()
        client.post(
            f"/sessions/{sid}/commit",
            json={
                "requests": [SINGLE_HIDING_RULE],
                "relax": {"root": 1},
                "dataset_hash": preview["dataset_hash"],
            },
        )
        exported = client.get(f"/sessions/{sid}/export").text

        src = tmp_path / "in.csv"
        src.write_text(fixture_csv_text)
        out = tmp_path / "out.csv"
        assert main([
            "hide", str(src), "--request", SINGLE_HIDING_RULE,
            "--relax", "root:1", "--output", str(out),
        ]) == 0
        assert exported == out.read_text()
