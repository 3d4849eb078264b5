import numpy as np
import pytest

import sphc


@pytest.fixture(scope="session")
def uniform_2000x768():
    """Shared uniform-sphere matrix at the scale most bands are stated for."""
    return sphc.gen_uniform(2000, 768, seed=42)


@pytest.fixture(scope="session")
def angles_2000x768(uniform_2000x768):
    return sphc.to_spherical(uniform_2000x768)


def brute_dot(a: np.ndarray, b: np.ndarray) -> float:
    """Independent binary64 dot-product oracle (plain accumulation)."""
    return float(np.dot(a.astype(np.float64), b.astype(np.float64)))
