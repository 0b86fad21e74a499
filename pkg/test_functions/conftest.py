import json
import random

import pytest

from adelic_gates.config import reset_settings


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    """Every test starts from the default settings, whatever the shell exports."""
    for suffix in ("LOG_LEVEL", "BFS_BUDGET", "NORM_TOL", "GATE_TOL", "JOBS"):
        monkeypatch.delenv(f"ADELIC_GATES_{suffix}", raising=False)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def rng():
    return random.Random(20240601)


@pytest.fixture
def write_json(tmp_path):
    """Write a JSON document under tmp_path and return its path as a string."""
    def _write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return str(path)
    return _write
