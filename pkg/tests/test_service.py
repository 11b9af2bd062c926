import json
import time

import pytest
from fastapi.testclient import TestClient

from fluidrank.catalog import Catalog
from fluidrank.service.app import create_app
from fluidrank.store import RunStore


@pytest.fixture()
def client(tmp_path):
    app = create_app(catalog=Catalog(), store=RunStore(str(tmp_path / "runs")))
    with TestClient(app) as c:
        yield c


def uniform_rank_body(**over):
    body = {
        "preferences": {"pressure": 1.0, "frequency": 1.0, "area": 1.0},
        "task_id": "search",
    }
    body.update(over)
    return body


class TestCatalog:
    def test_catalog_payload(self, client):
        r = client.get("/api/catalog")
        assert r.status_code == 200
        data = r.json()
        pressure = next(m for m in data["modalities"] if m["kind"] == "pressure")
        assert pressure["levels"] == [6.89, 13.79, 20.68, 27.58]
        assert {c["id"] for c in data["configurations"]} == {"PA", "AP", "PF", "FP", "AF", "FA"}
        assert {t["id"] for t in data["tasks"]} == {"assembly", "search"}


class TestRankEndpoint:
    def test_rank1_is_pressure_area_variant(self, client):
        r = client.post("/api/rank", json=uniform_rank_body())
        assert r.status_code == 200
        top = r.json()["rows"][0]
        assert set(top["channel_kinds"]) == {"pressure", "area"}

    def test_negative_beta_rejected_with_field_name(self, client):
        r = client.post("/api/rank", json=uniform_rank_body(beta=-1))
        assert r.status_code == 422
        locs = [e["loc"] for e in r.json()["detail"]]
        assert any("beta" in loc for loc in locs)

    def test_out_of_range_preference_rejected_with_field_name(self, client):
        body = uniform_rank_body()
        body["preferences"]["pressure"] = 1.7
        r = client.post("/api/rank", json=body)
        assert r.status_code == 422
        locs = [e["loc"] for e in r.json()["detail"]]
        assert any("pressure" in loc for loc in locs)

    def test_missing_preference_field_rejected(self, client):
        r = client.post(
            "/api/rank",
            json={"preferences": {"pressure": 1.0, "frequency": 1.0}, "task_id": "search"},
        )
        assert r.status_code == 422
        locs = [e["loc"] for e in r.json()["detail"]]
        assert any("area" in loc for loc in locs)

    def test_malformed_json_is_400(self, client):
        r = client.post(
            "/api/rank", content=b"{broken", headers={"content-type": "application/json"}
        )
        assert r.status_code == 400

    def test_unknown_task_is_404(self, client):
        r = client.post("/api/rank", json=uniform_rank_body(task_id="sorting"))
        assert r.status_code == 404

    def test_statelessness_order_independence(self, client):
        bodies = [
            uniform_rank_body(),
            uniform_rank_body(preferences={"pressure": 0.1, "frequency": 0.9, "area": 0.5}),
            uniform_rank_body(task_id="assembly"),
        ]
        first = [client.post("/api/rank", json=b).json() for b in bodies]
        second = [client.post("/api/rank", json=b).json() for b in reversed(bodies)]
        assert first == list(reversed(second))


class TestCliParity:
    def test_cli_and_http_rank_identical(self, client, tmp_path, capsys):
        from fluidrank.cli import main

        prefs = {"pressure": 0.8, "frequency": 0.4, "area": 0.6, "alpha": 0.25, "beta": 24.0}
        ppath = tmp_path / "prefs.json"
        ppath.write_text(json.dumps(prefs))
        assert main(["rank", "--prefs", str(ppath), "--task", "search"]) == 0
        cli_payload = json.loads(capsys.readouterr().out)
        http_payload = client.post(
            "/api/rank",
            json={
                "preferences": {"pressure": 0.8, "frequency": 0.4, "area": 0.6},
                "alpha": 0.25,
                "beta": 24.0,
                "task_id": "search",
            },
        ).json()
        assert cli_payload == http_payload


class TestPreviewEndpoint:
    def test_pf_max_pressure_window_flat(self, client):
        r = client.post(
            "/api/preview",
            json={"configuration_id": "PF", "theta": [3, 1], "task_id": "search"},
        )
        assert r.status_code == 200
        series = {s["display_id"]: s for s in r.json()["series"]}
        pressure = series["ch0_pressure"]
        window1 = [
            k for t, k in zip(pressure["times_s"], pressure["kpa"]) if 0 <= t < 3.0
        ]
        assert all(v == 27.58 for v in window1)

    def test_af_area3_has_three_onsets(self, client):
        r = client.post(
            "/api/preview",
            json={"configuration_id": "AF", "theta": [3, 0], "task_id": "search"},
        )
        assert r.status_code == 200
        onsets = []
        for s in r.json()["series"]:
            if "area_pouch" in s["display_id"]:
                nz = [t for t, k in zip(s["times_s"], s["kpa"]) if k > 0]
                if nz:
                    onsets.append(nz[0])
        assert len(onsets) == 3
        assert sorted(onsets) == pytest.approx([0.0, 0.25, 0.50], abs=0.02)

    def test_unknown_configuration_is_404(self, client):
        r = client.post("/api/preview", json={"configuration_id": "ZZ", "theta": [0, 0]})
        assert r.status_code == 404

    def test_theta_out_of_range_is_422(self, client):
        r = client.post("/api/preview", json={"configuration_id": "PF", "theta": [9, 0]})
        assert r.status_code == 422


class TestStudyEndpoints:
    def poll(self, client, report_id, timeout=20.0):
        deadline = time.time() + timeout
        while time.time() < deadline:
            r = client.get(f"/api/study/{report_id}")
            assert r.status_code == 200
            body = r.json()
            if body["status"] != "running":
                return body
            time.sleep(0.05)
        raise AssertionError("study did not finish in time")

    def test_run_and_poll(self, client):
        r = client.post(
            "/api/study/run",
            json={"tasks": ["search"], "trials_per_config": 50, "profiles": 2, "master_seed": 3},
        )
        assert r.status_code == 200
        report_id = r.json()["report_id"]
        body = self.poll(client, report_id)
        assert body["status"] == "done"
        assert body["report"]["study"]["trials_per_config"] == 50
        assert "rank1_counts" in body["report"]

    def test_unknown_report_is_404(self, client):
        assert client.get("/api/study/nope").status_code == 404

    def test_zero_trials_rejected_by_validation(self, client):
        r = client.post("/api/study/run", json={"tasks": ["search"], "trials_per_config": 0})
        assert r.status_code == 422

    def test_seeded_rerun_identical(self, client):
        body = {"tasks": ["search"], "trials_per_config": 40, "profiles": 2, "master_seed": 12}
        r1 = self.poll(client, client.post("/api/study/run", json=body).json()["report_id"])
        r2 = self.poll(client, client.post("/api/study/run", json=body).json()["report_id"])
        assert r1["report"] == r2["report"]
