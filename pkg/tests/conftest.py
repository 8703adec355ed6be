import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # makes `oracles` importable

from coarseset.store import EmbeddingMatrix


@pytest.fixture
def four_points():
    """The worked selection example: one far pair, one near point."""
    return EmbeddingMatrix(
        np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0], [1.0, 1.0]], dtype=np.float32)
    )


def random_matrix(rng: np.random.Generator, n: int, d: int) -> EmbeddingMatrix:
    return EmbeddingMatrix(rng.normal(scale=2.0, size=(n, d)).astype(np.float32))
