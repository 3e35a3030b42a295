"""
Integration tests for API endpoints
"""
import io
import os

import pandas as pd
import pytest

import app as app_module
import config

pytestmark = pytest.mark.integration

SMALL_EXPERIMENT = {
    "preset": "M1",
    "n": 200,
    "reps": 2,
    "m_values": "1..3",
    "estimators": ["sliding", "disjoint"],
    "workers": 1,
}


def _run_next_job():
    """Stand-in for one turn of the queue processor"""
    job = app_module.queue_manager.pop_next_job()
    assert job is not None
    app_module.process_queued_job(job)
    return job["job_id"]


class TestHealthEndpoints:
    """Tests for health check endpoints"""

    def test_root_endpoint(self, client):
        """Service banner"""
        data = client.get("/").json()
        assert data["service"] == "BlockMax Lab"
        assert data["status"] == "online"

    def test_health_endpoint(self, client):
        """Health carries queue counts"""
        data = client.get("/health").json()
        assert data["status"] == "healthy"
        assert data["queue"]["queued_jobs"] == 0

    def test_ping(self, client):
        """Ping answers"""
        assert client.get("/ping").json()["pong"] is True


class TestExperimentEndpoints:
    """Tests for presets, admission and queueing"""

    def test_presets(self, client):
        """Fifteen named models"""
        presets = client.get("/api/presets").json()["presets"]
        assert [p["name"] for p in presets][:3] == ["M1", "M2", "M3"]
        assert len(presets) == 15

    def test_check_experiment(self, client):
        """Small experiments are admitted"""
        data = client.post("/api/check-experiment", json=SMALL_EXPERIMENT).json()
        assert data["allowed"] is True
        assert data["estimated_ram"] > 0

    @pytest.mark.parametrize("override", [
        {"preset": "M99"},
        {"m_values": "5..1"},
        {"estimators": ["median"]},
        {"reps": 0},
    ])
    def test_check_experiment_rejects(self, client, override):
        """Invalid experiments give 400"""
        response = client.post("/api/check-experiment", json={**SMALL_EXPERIMENT, **override})
        assert response.status_code == 400

    def test_simulate_queues(self, client):
        """A queued job reports its position"""
        job_id = client.post("/api/simulate", json=SMALL_EXPERIMENT).json()["job_id"]
        status = client.get(f"/api/status/{job_id}").json()
        assert status["status"] == "queued"
        assert status["queue_position"] == 1
        assert status["jobs_ahead"] == 0

    def test_simulate_at_capacity(self, client, monkeypatch):
        """Refused admission gives 503"""
        monkeypatch.setattr(app_module, "check_experiment_admission", lambda spec, workers=None: {
            "allowed": False, "estimated_ram": 1, "available_ram": 0, "message": "full",
        })
        assert client.post("/api/simulate", json=SMALL_EXPERIMENT).status_code == 503

    def test_full_job_lifecycle(self, client):
        """Queue, run, download and clean up"""
        client.post("/api/simulate", json={**SMALL_EXPERIMENT, "per_point": True})
        job_id = _run_next_job()

        status = client.get(f"/api/status/{job_id}").json()
        assert status["status"] == "finished"
        assert status["progress"] == 100

        summary = client.get(f"/api/download/{job_id}")
        assert summary.status_code == 200
        frame = pd.read_csv(io.StringIO(summary.text))
        assert set(frame["estimator"]) == {"sliding", "disjoint"}
        assert len(frame) == 2 * 3 * 3

        assert client.get(f"/api/download/{job_id}", params={"artifact": "points"}).status_code == 200
        assert client.get(f"/api/download/{job_id}", params={"artifact": "manifest"}).json()["reps"] == 2

        assert client.delete(f"/api/cleanup/{job_id}").status_code == 200
        assert client.get(f"/api/status/{job_id}").status_code == 404

    def test_failed_job(self, client, monkeypatch):
        """Errors during the run end in status error"""
        def boom(*args, **kwargs):
            raise MemoryError("no room")

        monkeypatch.setattr(app_module, "run", boom)
        client.post("/api/simulate", json=SMALL_EXPERIMENT)
        job_id = _run_next_job()
        status = client.get(f"/api/status/{job_id}").json()
        assert status["status"] == "error"
        assert "Memory exhausted" in status["error"]

    def test_download_not_ready(self, client):
        """Queued jobs have nothing to download"""
        job_id = client.post("/api/simulate", json=SMALL_EXPERIMENT).json()["job_id"]
        assert client.get(f"/api/download/{job_id}").status_code == 400

    def test_download_unknown_artifact(self, client):
        """Only summary, points and manifest"""
        assert client.get("/api/download/x", params={"artifact": "plot"}).status_code == 400

    def test_unknown_job(self, client):
        """Unknown ids give 404"""
        assert client.get("/api/status/nonexistent").status_code == 404
        assert client.delete("/api/cleanup/nonexistent").status_code == 404


class TestEstimateEndpoint:
    """Tests for estimation on uploaded data"""

    def _post(self, client, path, **form):
        with open(path, "rb") as f:
            return client.post("/api/estimate", files={"file": ("data.csv", f, "text/csv")}, data=form)

    def test_sliding(self, client, data_csv):
        """One value per grid point, all in [0, 1]"""
        data = self._post(client, data_csv, estimator="sliding", m="5", grid="0.25,0.5").json()
        assert (data["n"], data["d"]) == (300, 2)
        assert len(data["values"]) == 4
        assert all(0.0 <= v <= 1.0 for v in data["values"])
        assert data["meta"] == {"m": 5}

    def test_bias_corrected_fixed_rho(self, client, data_csv):
        """Fixed rho skips second-order estimation"""
        data = self._post(client, data_csv, estimator="bc_naive", m="6", m_prime="2", rho="fixed:-1", grid="0.5").json()
        assert data["meta"]["rho"] == -1.0
        assert len(data["values"]) == 1

    def test_block_too_large(self, client, data_csv):
        """m > n gives 400"""
        assert self._post(client, data_csv, estimator="sliding", m="301").status_code == 400

    def test_wrong_file_type(self, client, tmp_path):
        """Only CSV uploads"""
        path = tmp_path / "data.pdf"
        path.write_bytes(b"%PDF")
        with open(path, "rb") as f:
            response = client.post("/api/estimate", files={"file": ("data.pdf", f)}, data={"m": "2"})
        assert response.status_code == 400

    def test_upload_removed(self, client, data_csv):
        """Uploads do not outlive the request"""
        self._post(client, data_csv, estimator="disjoint", m="3", grid="0.5")
        assert os.listdir(config.UPLOAD_DIR) == []


class TestAnalysisEndpoints:
    """Tests for asymptotic variances and rho"""

    def test_variance(self, client):
        """Independence at u = 0.5 gives Var^D = 0.0625"""
        data = client.get("/api/variance", params={"beta": 1.0, "grid": "0.5"}).json()
        assert len(data["rows"]) == 1
        assert data["rows"][0]["var_disjoint"] == pytest.approx(0.0625)
        assert data["rows"][0]["var_sliding"] == pytest.approx(0.03479, abs=1e-4)

    def test_variance_rejects_beta(self, client):
        """beta < 1 is invalid"""
        assert client.get("/api/variance", params={"beta": 0.5}).status_code == 400

    @pytest.mark.slow
    def test_rho(self, client):
        """i.i.d. Clayton reports the true rho alongside the estimate"""
        data = client.get("/api/rho", params={"preset": "M1", "n": 2000, "seed": 1}).json()
        assert data["rho_true"] == -1.0
        assert data["rho_hat"] is None or data["rho_hat"] < 0.0

    def test_rho_unknown_preset(self, client):
        """Unknown presets give 400"""
        assert client.get("/api/rho", params={"preset": "M99"}).status_code == 400
