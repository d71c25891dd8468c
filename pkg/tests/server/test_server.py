"""Tests for the HTTP API."""

import pytest
from fastapi.testclient import TestClient

from tracehound import __version__
from tracehound.chainstate import AccountState, ChainState
from tracehound.chainstate.snapshot import snapshot_document
from tracehound.fixtures import FIXTURE_BLOCK, FIXTURES, get_fixture
from tracehound.server import app

STOP_HEX = "0x" + get_fixture("stop_only").bytecode.hex()


@pytest.fixture
def client(isolated_home):
    return TestClient(app)


class TestHealth:
    def test_health(self, client):
        response = client.get("/health")
        assert response.status_code == 200
        assert response.json() == {"status": "ok", "version": __version__}


class TestAnalyze:
    """POST /api/analyze"""

    def test_precondition_skip(self, client):
        response = client.post("/api/analyze", json={"bytecode": STOP_HEX, "categories": ["suicidal"]})
        assert response.status_code == 200
        body = response.json()
        assert body["source"] == "api"
        (result,) = body["results"]
        assert result["category"] == "suicidal"
        assert result["flagged"] is False
        assert result["exploration"]["skipped"] == "precondition"

    def test_contract_at_named_address(self, client):
        f = get_fixture("mortal_thing")
        doc = snapshot_document(f.snapshot())
        address = "0x" + f"{f.address:040x}"
        response = client.post(
            "/api/analyze",
            json={"bytecode": STOP_HEX, "snapshot": doc, "address": address, "categories": ["suicidal"]},
        )
        assert response.status_code == 200
        assert response.json()["address"] == address

    @pytest.mark.parametrize(
        "body",
        [
            {"bytecode": "0xzz"},
            {"bytecode": "0x123"},
            {"bytecode": STOP_HEX, "categories": []},
            {"bytecode": STOP_HEX, "categories": ["lazy"]},
            {"bytecode": STOP_HEX, "depth": 0},
            {"bytecode": STOP_HEX, "unexpected": 1},
            {"bytecode": STOP_HEX, "snapshot": {"accounts": "nope"}},
            {"bytecode": STOP_HEX, "alternate_snapshots": {"nothex": {"accounts": {}}}},
            {"bytecode": STOP_HEX, "alternate_snapshots": {"0x" + "11" * 20: {"accounts": "nope"}}},
            {"categories": ["greedy"]},
        ],
    )
    def test_bad_requests(self, client, body):
        assert client.post("/api/analyze", json=body).status_code == 400

    def test_empty_bytecode(self, client):
        response = client.post("/api/analyze", json={"bytecode": "0x"})
        assert response.status_code == 400
        assert response.json()["detail"] == "bytecode is empty"

    def test_body_must_be_an_object(self, client):
        assert client.post("/api/analyze", json=[STOP_HEX]).status_code == 400

    @pytest.mark.solver
    def test_greedy_with_validation(self, client):
        response = client.post(
            "/api/analyze",
            json={"bytecode": STOP_HEX, "categories": ["greedy"], "validate": True, "depth": 1},
        )
        assert response.status_code == 200
        (result,) = response.json()["results"]
        assert result["flagged"]
        assert result["verdicts"][0]["status"] == "TruePositive"

    @pytest.mark.solver
    def test_dead_subject_with_alternate_snapshot(self, client):
        f = get_fixture("mortal_thing")
        address = "0x" + f"{f.address:040x}"
        dead = snapshot_document(ChainState({f.address: AccountState(0)}, FIXTURE_BLOCK))
        body = {
            "bytecode": "0x" + f.bytecode.hex(),
            "snapshot": dead,
            "address": address,
            "categories": ["suicidal"],
            "validate": True,
            "depth": 2,
        }
        (result,) = client.post("/api/analyze", json=body).json()["results"]
        assert {v["status"] for v in result["verdicts"]} == {"NotValidatable"}

        body["alternate_snapshots"] = {address: snapshot_document(f.snapshot())}
        (result,) = client.post("/api/analyze", json=body).json()["results"]
        assert "TruePositive" in {v["status"] for v in result["verdicts"]}


class TestPosthumous:
    def test_codeless_accounts(self, client):
        state = ChainState({0xAA: AccountState(5), 0xBB: AccountState(5, b"\x00")}, FIXTURE_BLOCK)
        response = client.post("/api/posthumous", json={"snapshot": snapshot_document(state)})
        assert response.status_code == 200
        assert response.json() == {"addresses": ["0x" + "00" * 19 + "aa"]}

    def test_missing_snapshot(self, client):
        assert client.post("/api/posthumous", json={}).status_code == 400


class TestFixtures:
    def test_listing(self, client):
        fixtures = client.get("/api/fixtures").json()["fixtures"]
        assert [f["name"] for f in fixtures] == list(FIXTURES)
        mortal = next(f for f in fixtures if f["name"] == "mortal_thing")
        assert {e["category"] for e in mortal["expectations"]} >= {"prodigal", "suicidal"}
