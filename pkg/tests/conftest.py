import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def vectors(dim, elements=finite):
    return arrays(np.float64, dim, elements=elements)


def plain_projection(F, domain, x0, gamma, iters):
    """Baseline x <- P(x - gamma F(x)); only used to show where it fails."""
    x = domain.project(np.asarray(x0, dtype=float))
    path = [x]
    for _ in range(iters):
        x = domain.project(x - gamma * F.evaluate(x))
        path.append(x)
    return np.array(path)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
