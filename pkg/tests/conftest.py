"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from repalign import FeatureSet, OutlierPolicy, Settings
from repalign.cli import main as cli_main
from repalign.rng import derive_seed, normal_field

FIXTURES = Path(__file__).parent / "fixtures"

# Four samples whose nearest neighbor at k=1 differs between the two sets in
# every row, so the joint mask is empty and the score is undefined.
DISJOINT_A = np.array(
    [[1.0, 0.0], [0.99, 0.0], [0.0, 1.0], [0.0, 0.99]], dtype=np.float32
)
DISJOINT_B = np.array(
    [[1.0, 0.0], [0.0, 1.0], [0.99, 0.0], [0.0, 0.99]], dtype=np.float32
)

RAW_SETTINGS = Settings(k=1, normalize=False, outlier=OutlierPolicy("none"))


def rand_features(seed: int, n: int, d: int, *labels: int) -> FeatureSet:
    return FeatureSet(normal_field(derive_seed(seed, *labels) if labels else seed, (n, d)))


def correlated_pair(seed: int, n: int, d: int, noise: float = 0.5) -> tuple[FeatureSet, FeatureSet]:
    base = normal_field(derive_seed(seed, 1), (n, d))
    drift = normal_field(derive_seed(seed, 2), (n, d))
    return FeatureSet(base), FeatureSet(base + noise * drift)


@pytest.fixture(scope="session")
def fixtures() -> Path:
    return FIXTURES


@pytest.fixture
def run_cli(capsys):
    """Invoke the CLI in-process; returns (exit code, stdout, stderr)."""

    def run(argv: list[str]) -> tuple[int, str, str]:
        code = cli_main(argv)
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return run
