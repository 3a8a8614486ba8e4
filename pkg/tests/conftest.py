import numpy as np
import pytest

import blaschke_lab as bl


@pytest.fixture
def B3():
    """Degree-3 product with mixed zeros, used across the suite."""
    return bl.BlaschkeProduct(0.0, [0.5, -0.3 + 0.2j, 0.1])


@pytest.fixture
def B2():
    return bl.BlaschkeProduct(0.0, [0.5, -0.3])


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
