import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from omo.domain import Ball, Box, Simplex, as_vector, contains, diameter, project

from conftest import vectors

DOMAINS = [Box.unit(3), Box([-1.0, 0.0, 2.0], [1.0, 0.5, 3.0]), Ball.origin(3, 1.0),
           Ball([1.0, -2.0, 0.5], 0.3), Simplex(3)]


def test_box_clamps():
    assert np.array_equal(project(Box.unit(2), [1.5, -0.3]), [1.0, 0.0])


def test_ball_rescales():
    np.testing.assert_allclose(project(Ball.origin(2, 1.0), [3.0, 4.0]), [0.6, 0.8], rtol=0, atol=1e-15)


@pytest.mark.parametrize("dom,p", [(Box.unit(2), [0.2, 0.9]), (Ball.origin(2, 1.0), [0.3, -0.4]),
                                   (Simplex(3), [0.2, 0.3, 0.5])])
def test_feasible_point_is_fixed(dom, p):
    assert np.array_equal(project(dom, p), p)


def test_contains_examples():
    assert contains(Box.unit(2), [0.5, 0.5], 0.0)
    assert not contains(Ball.origin(2, 1.0), [1 + 1e-6, 0.0], 1e-9)
    assert contains(Simplex(3), [1 / 3, 1 / 3, 1 / 3], 1e-12)


def test_contains_rejects_negative_tol():
    with pytest.raises(ValueError):
        contains(Box.unit(2), [0.5, 0.5], -1.0)


def test_diameters():
    assert diameter(Ball.origin(4, 1.0)) == 2.0
    assert diameter(Box.unit(2)) == pytest.approx(math.sqrt(2), abs=1e-15)
    assert diameter(Simplex(2)) == pytest.approx(math.sqrt(2), abs=1e-15)


def test_simplex_projection_known_value():
    # threshold 0.5 removes the small coordinate entirely
    np.testing.assert_allclose(Simplex(3).project([1.0, 1.0, -1.0]), [0.5, 0.5, 0.0], atol=1e-15)


def test_invalid_constructions():
    with pytest.raises(ValueError):
        Box([1.0], [0.0])
    with pytest.raises(ValueError):
        Ball.origin(2, -1.0)
    with pytest.raises(ValueError):
        Simplex(0)
    with pytest.raises(ValueError):
        as_vector([np.nan, 1.0])
    with pytest.raises(ValueError):
        project(Box.unit(2), [1.0, 2.0, 3.0])


@pytest.mark.parametrize("dom", DOMAINS, ids=lambda d: type(d).__name__)
@given(p=vectors(3))
def test_projection_idempotent_and_feasible(dom, p):
    q = dom.project(p)
    assert np.array_equal(dom.project(q), q)
    assert dom.contains(q, 1e-12)


@pytest.mark.parametrize("dom", DOMAINS, ids=lambda d: type(d).__name__)
@given(p=vectors(3), seed=st.integers(0, 2**32 - 1))
def test_projection_nonexpansive(dom, p, seed):
    q = dom.sample(np.random.default_rng(seed), 1)[0]
    assert np.linalg.norm(dom.project(p) - q) <= np.linalg.norm(p - q) + 1e-12


@pytest.mark.parametrize("dom", DOMAINS, ids=lambda d: type(d).__name__)
@given(p=vectors(3), seed=st.integers(0, 2**32 - 1))
def test_projection_is_closest_point(dom, p, seed):
    # variational characterisation: <p - P(p), q - P(p)> <= 0 for feasible q
    q = dom.sample(np.random.default_rng(seed), 1)[0]
    pp = dom.project(p)
    assert (p - pp) @ (q - pp) <= 1e-9 * (1 + np.linalg.norm(p))


@pytest.mark.parametrize("dom", DOMAINS, ids=lambda d: type(d).__name__)
def test_samples_lie_inside(dom, rng):
    X = dom.sample(rng, 200)
    assert X.shape == (200, 3)
    assert all(dom.contains(x, 1e-12) for x in X)
    D = np.linalg.norm(X[:, None] - X[None], axis=-1)
    assert D.max() <= dom.diameter() + 1e-12
