from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from qftverify.config import reset_settings
from qftverify.models import InstanceSpec, NoiseSpec
from qftverify.services.hhl import build_instance
from qftverify.services.noise import build_channel, seeded_rng

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture(autouse=True)
def fresh_settings(monkeypatch):
    for key in ("LOG_LEVEL", "QFTV_WORKERS", "QFTV_REPORT_DIR", "QFTV_MAX_QUBITS"):
        monkeypatch.delenv(key, raising=False)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def rng() -> np.random.Generator:
    return seeded_rng(20240601)


@pytest.fixture
def config_dir() -> Path:
    return CONFIG_DIR


@pytest.fixture
def make_channel():
    def factory(kind: str, n: int = 2, target: str = "inverse", **params):
        return build_channel(NoiseSpec(kind=kind, n=n, target=target, **params))

    return factory


@pytest.fixture
def two_level_instance():
    """d=2, n=2, eigenvalues on the grid, uniform superposition of the eigenvectors."""
    return build_instance(InstanceSpec(id="two-level", n=2, spectrum=[0.25, 0.5]))


@pytest.fixture
def rotated_instance():
    return build_instance(
        InstanceSpec(
            id="rotated",
            n=2,
            spectrum=[0.0, 0.25, 0.5, 0.75],
            basis="random",
            basis_seed=5,
            b="random",
            b_seed=6,
            function="sqrt",
        )
    )


@pytest.fixture
def off_grid_instance():
    return build_instance(InstanceSpec(id="off-grid", n=3, spectrum=[0.1, 0.33]))


@pytest.fixture
def demo_config() -> dict:
    return {"schema_version": 1, "suite": "adversarial_demo", "seed": 11}
