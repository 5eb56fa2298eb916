import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from omo.domain import Ball, Box, Simplex
from omo.learners import (ENTROPY, EUCLIDEAN, OMOD, OMOMD, LearnerConfig, Regularizer, default_eta, link,
                          ogd_theoretical_bound, omod_init, omod_step, omomd_init, omomd_step,
                          regret_bound_thm2)

from conftest import vectors


def test_omod_init():
    np.testing.assert_array_equal(omod_init(Box.unit(2), 0.1).primal, [0.0, 0.0])
    x = omod_init(Ball([2.0, 2.0], 1.0), 0.1).primal
    np.testing.assert_allclose(x, [2 - math.sqrt(2) / 2] * 2, atol=1e-15)
    np.testing.assert_allclose(omod_init(Simplex(2), 0.1).primal, [0.5, 0.5])


def test_omod_step_examples():
    box = Box.unit(2)
    s = omod_init(box, 0.1)
    s = omod_step(s.__class__(OMOD, np.array([0.5, 0.5]), 0.1), [1.0, -1.0], box)
    np.testing.assert_allclose(s.primal, [0.4, 0.6], atol=1e-15)
    assert s.step_count == 1
    np.testing.assert_array_equal(omod_step(s, [0.0, 0.0], box).primal, s.primal)
    corner = omod_init(box, 1.0)
    np.testing.assert_array_equal(omod_step(corner, [1.0, 1.0], box).primal, [0.0, 0.0])


def test_link_examples():
    np.testing.assert_array_equal(link(Regularizer(EUCLIDEAN, 0.1), [10.0, 10.0], Box.unit(2)), [1.0, 1.0])
    np.testing.assert_allclose(link(Regularizer(ENTROPY, 0.5), np.zeros(3), Simplex(3)), [1 / 3] * 3)
    np.testing.assert_allclose(link(Regularizer(EUCLIDEAN, 0.1), [1.0, 2.0], Box.unit(2)), [0.1, 0.2])


def test_entropy_step_closed_form():
    eta = 0.3
    reg = Regularizer("negative-entropy", eta)
    s = omomd_step(omomd_init(Simplex(2), reg), [1.0, 0.0], reg, Simplex(2))
    e = math.exp(-eta)
    np.testing.assert_allclose(s.primal, [e / (e + 1), 1 / (e + 1)], atol=1e-15)
    np.testing.assert_array_equal(omomd_step(s, [0.0, 0.0], reg, Simplex(2)).primal, s.primal)


def test_entropy_requires_simplex():
    with pytest.raises(ValueError):
        link(Regularizer(ENTROPY, 1.0), [0.0, 0.0], Box.unit(2))


@pytest.mark.parametrize("reg,dom", [(Regularizer(EUCLIDEAN, 0.7), Box([-1.0, 0.0, 0.0], [1.0, 2.0, 0.5])),
                                     (Regularizer(EUCLIDEAN, 2.0), Ball.origin(3, 1.0)),
                                     (Regularizer(ENTROPY, 0.4), Simplex(3))], ids=["box", "ball", "entropy"])
@given(theta=vectors(3, st.floats(-20, 20)), seed=st.integers(0, 2**32 - 1))
def test_link_maximises(reg, dom, theta, seed):
    x_star = link(reg, theta, dom)
    best = x_star @ theta - reg.value(x_star)
    for x in dom.sample(np.random.default_rng(seed), 100):
        assert x @ theta - reg.value(x) <= best + 1e-10


@pytest.mark.parametrize("algo", [OMOD, OMOMD])
@given(Z=st.lists(vectors(3), min_size=1, max_size=30), eta=st.floats(1e-3, 5))
def test_iterates_stay_feasible(algo, Z, eta):
    dom = Box([-1.0, 0.0, 0.0], [1.0, 2.0, 0.5])
    cfg = LearnerConfig(algo, eta)
    s = cfg.init(dom)
    for z in Z:
        s = cfg.step(s, z, dom)
        assert dom.contains(s.primal, 1e-9)


def test_omod_omomd_agree_in_the_interior(rng):
    dom = Ball.origin(4, 1e6)
    a, b = LearnerConfig(OMOD, 0.05), LearnerConfig(OMOMD, 0.05)
    sa, sb = a.init(dom), b.init(dom)
    for z in rng.normal(size=(1000, 4)):
        sa, sb = a.step(sa, z, dom), b.step(sb, z, dom)
        assert np.abs(sa.primal - sb.primal).max() <= 1e-12


def test_omod_omomd_differ_once_projection_binds():
    # greedy projection forgets overshoot, the lazy dual remembers it
    dom = Box.unit(1)
    a, b = LearnerConfig(OMOD, 1.0), LearnerConfig(OMOMD, 1.0)
    sa, sb = a.init(dom), b.init(dom)
    for z in ([5.0], [-1.0]):
        sa, sb = a.step(sa, z, dom), b.step(sb, z, dom)
    assert sa.primal[0] == 1.0 and sb.primal[0] == 0.0


def test_x0_start():
    dom = Box.unit(2)
    for algo in (OMOD, OMOMD):
        np.testing.assert_allclose(LearnerConfig(algo, 0.2).init(dom, [0.3, 0.6]).primal, [0.3, 0.6])
    s = LearnerConfig(OMOMD, 0.2, ENTROPY).init(Simplex(3), [0.2, 0.3, 0.5])
    np.testing.assert_allclose(s.primal, [0.2, 0.3, 0.5], atol=1e-15)


def test_config_validation():
    with pytest.raises(ValueError):
        LearnerConfig("sgd", 0.1)
    with pytest.raises(ValueError):
        LearnerConfig(OMOD, 0.0)
    with pytest.raises(ValueError):
        LearnerConfig(OMOD, 0.1, ENTROPY)
    with pytest.raises(ValueError):
        LearnerConfig().step(LearnerConfig().init(Box.unit(1)), [np.inf], Box.unit(1))
    with pytest.raises(ValueError):
        omomd_step(omod_init(Box.unit(1), 0.1), [1.0], Regularizer(EUCLIDEAN, 0.1), Box.unit(1))


def test_regret_bound_thm2_examples():
    dom = Ball.origin(2, 3.0)
    reg = Regularizer(EUCLIDEAN, 1.0)
    B, L, T = 2.0, 0.5, 40
    u = np.array([B, 0.0])
    assert regret_bound_thm2(reg, u, [L] * T, dom) == pytest.approx(B**2 / 2 + T * L**2)
    assert regret_bound_thm2(reg, u, [], dom) == pytest.approx(B**2 / 2)
    assert regret_bound_thm2(reg, [0.0, 0.0], [1.0, 2.0], dom) == pytest.approx(5.0)
    ent = Regularizer(ENTROPY, 0.5)
    assert regret_bound_thm2(ent, [1 / 3] * 3, [], Simplex(3)) == pytest.approx(0.0, abs=1e-14)
    with pytest.raises(ValueError):
        regret_bound_thm2(reg, [4.0, 0.0], [], dom)


def test_ogd_bound_examples():
    assert ogd_theoretical_bound(1, 1, 100) == pytest.approx(math.sqrt(200))
    assert ogd_theoretical_bound(2, 1, 2) == pytest.approx(4.0)
    assert ogd_theoretical_bound(3, 2, 1) == pytest.approx(6 * math.sqrt(2))
    assert default_eta(1, 1, 50) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        ogd_theoretical_bound(1, 1, 0)
