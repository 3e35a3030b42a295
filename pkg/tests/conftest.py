"""
Pytest configuration and fixtures
"""
import math
import os
import sys

import numpy as np
import pandas as pd
import pytest
from fastapi.testclient import TestClient

# Add parent directory to path for imports
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app import app
from modules.copula_models import GumbelHougaard, OuterPowerClayton, TCopula

BETA_15 = math.log(2.0) / math.log(1.5)
BETA_175 = math.log(2.0) / math.log(1.75)


@pytest.fixture
def client(tmp_path, monkeypatch):
    """
    FastAPI test client on a fresh queue and status store.

    Startup hooks, and so the queue processor, do not run: queued jobs stay queued.
    """
    import app as app_module
    from modules.queue_manager import JobQueueManager
    from modules.status_manager import StatusManager
    monkeypatch.setattr(app_module, "queue_manager", JobQueueManager(str(tmp_path / "queue.json"), start_cleanup=False))
    monkeypatch.setattr(app_module, "status_manager", StatusManager())
    return TestClient(app)


@pytest.fixture
def rng():
    """Fresh deterministic stream per test"""
    return np.random.default_rng(12345)


@pytest.fixture
def independence():
    """Bivariate independence copula (Gumbel-Hougaard with beta = 1)"""
    return GumbelHougaard(beta=1.0)


@pytest.fixture
def gumbel():
    """Bivariate Gumbel-Hougaard with beta = ln2/ln1.5"""
    return GumbelHougaard(beta=BETA_15)


@pytest.fixture
def clayton():
    """Outer-power Clayton of model M1"""
    return OuterPowerClayton(theta=1.0, beta=BETA_175)


@pytest.fixture
def t_copula():
    """Bivariate t-copula with nu = 5, theta = 0.5"""
    return TCopula(nu=5, theta=0.5)


@pytest.fixture
def small_data(rng):
    """300 x 2 i.i.d. Gumbel-Hougaard sample"""
    return GumbelHougaard(beta=BETA_15).sample(300, rng)


@pytest.fixture
def data_csv(tmp_path, small_data):
    """small_data written as a data CSV with a header row"""
    path = tmp_path / "data.csv"
    pd.DataFrame(small_data, columns=["x1", "x2"]).to_csv(path, index=False)
    return str(path)


@pytest.fixture
def grid_2d():
    """{.1, ..., .9}^2"""
    axis = np.round(np.arange(1, 10) / 10.0, 10)
    return np.array([(a, b) for a in axis for b in axis])


@pytest.fixture(autouse=True)
def setup_test_environment(tmp_path, monkeypatch):
    """Point storage at a per-test temp directory"""
    import config
    monkeypatch.setattr(config, "TEMP_DIR", str(tmp_path / "temp_files"))
    monkeypatch.setattr(config, "UPLOAD_DIR", str(tmp_path / "temp_files" / "uploads"))
    monkeypatch.setattr(config, "OUTPUT_DIR", str(tmp_path / "temp_files" / "outputs"))
    from utils.helpers import ensure_directories_exist
    ensure_directories_exist()

    yield
