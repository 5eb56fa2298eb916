"""Online monotone descent (OMoD) and its mirror-descent variant (OMoMD).

Step-size convention: the OMoMD dual accumulates raw feedback,
``theta <- theta - z``, and the learning rate lives inside the link
function, ``x = argmax_x <x, theta> - R(x)`` with ``R`` (1/eta)-strongly
convex. For the Euclidean regulariser that gives ``x = project(eta * theta)``,
so ``eta`` enters every iterate exactly once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .domain import ConvexDomain, Simplex, as_vector

OMOD = "omod"
OMOMD = "omomd"
EUCLIDEAN = "euclidean"
ENTROPY = "entropy"
_REG_ALIASES = {"euclidean": EUCLIDEAN, "euclidean-half-sq": EUCLIDEAN, "l2": EUCLIDEAN,
                "entropy": ENTROPY, "negative-entropy": ENTROPY, "negentropy": ENTROPY}


@dataclass(frozen=True)
class Regularizer:
    """``R(x) = ||x||^2 / (2 eta)`` or ``R(x) = sum x log x / eta``."""

    kind: str
    eta: float

    def __post_init__(self):
        kind = _REG_ALIASES.get(str(self.kind).lower())
        if kind is None:
            raise ValueError(f"unknown regularizer {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if not (math.isfinite(self.eta) and self.eta > 0):
            raise ValueError("eta must be positive")
        object.__setattr__(self, "eta", float(self.eta))

    @property
    def strength(self) -> float:
        """Strong-convexity modulus of R."""
        return 1.0 / self.eta

    def check_domain(self, domain: ConvexDomain) -> None:
        if self.kind == ENTROPY and not isinstance(domain, Simplex):
            raise ValueError("the entropy regularizer is only defined on a simplex")

    def value(self, x) -> float:
        x = as_vector(x)
        if self.kind == EUCLIDEAN:
            return float(x @ x) / (2 * self.eta)
        pos = x[x > 0]
        return float(np.sum(pos * np.log(pos))) / self.eta

    def min_value(self, domain: ConvexDomain) -> float:
        self.check_domain(domain)
        if self.kind == EUCLIDEAN:
            return self.value(domain.project(np.zeros(domain.dim)))
        return -math.log(domain.dim) / self.eta

    def dual_norm(self, z) -> float:
        """Norm dual to the one R is strongly convex in (l2 for Euclidean, l-inf for entropy)."""
        z = as_vector(z)
        return float(np.linalg.norm(z) if self.kind == EUCLIDEAN else np.max(np.abs(z)))


@dataclass(frozen=True)
class LearnerState:
    algo: str
    primal: np.ndarray
    eta: float
    dual: np.ndarray | None = None
    step_count: int = 0


def link(regularizer: Regularizer, theta, domain: ConvexDomain) -> np.ndarray:
    """Maximiser of <x, theta> - R(x) over the domain."""
    regularizer.check_domain(domain)
    theta = as_vector(theta, domain.dim, "theta")
    if regularizer.kind == EUCLIDEAN:
        return domain.project(regularizer.eta * theta)
    s = regularizer.eta * theta
    e = np.exp(s - s.max())
    return e / e.sum()


def omod_init(domain: ConvexDomain, eta: float) -> LearnerState:
    if not eta > 0:
        raise ValueError("eta must be positive")
    return LearnerState(OMOD, domain.project(np.zeros(domain.dim)), float(eta))


def omod_step(state: LearnerState, z, domain: ConvexDomain) -> LearnerState:
    """Projected step ``x <- project(x - eta z)``."""
    if state.algo != OMOD:
        raise ValueError(f"omod_step called on a {state.algo} state")
    z = as_vector(z, state.primal.shape[0], "z")
    x = domain.project(state.primal - state.eta * z)
    return replace(state, primal=x, step_count=state.step_count + 1)


def omomd_init(domain: ConvexDomain, regularizer: Regularizer) -> LearnerState:
    theta = np.zeros(domain.dim)
    return LearnerState(OMOMD, link(regularizer, theta, domain), regularizer.eta, dual=theta)


def omomd_step(state: LearnerState, z, regularizer: Regularizer, domain: ConvexDomain) -> LearnerState:
    if state.algo != OMOMD:
        raise ValueError(f"omomd_step called on a {state.algo} state")
    if regularizer.eta != state.eta:
        raise ValueError("regularizer eta differs from the learner's eta")
    z = as_vector(z, state.dual.shape[0], "z")
    theta = state.dual - z
    return replace(state, primal=link(regularizer, theta, domain), dual=theta,
                   step_count=state.step_count + 1)


@dataclass(frozen=True)
class LearnerConfig:
    """What the experiment runner needs to drive either learner."""

    algo: str = OMOMD
    eta: float = 0.1
    regularizer: str = EUCLIDEAN

    def __post_init__(self):
        if self.algo not in (OMOD, OMOMD):
            raise ValueError(f"unknown algorithm {self.algo!r}")
        if not (math.isfinite(self.eta) and self.eta > 0):
            raise ValueError("eta must be positive")
        if self.algo == OMOD and _REG_ALIASES.get(self.regularizer) != EUCLIDEAN:
            raise ValueError("omod is the Euclidean learner; use omomd for other regularizers")

    def make_regularizer(self) -> Regularizer:
        return Regularizer(self.regularizer, self.eta)

    def init(self, domain: ConvexDomain, x0=None) -> LearnerState:
        """Fresh state; ``x0`` overrides the default start ``project(0)``."""
        if self.algo == OMOD:
            state = omod_init(domain, self.eta)
            return state if x0 is None else replace(state, primal=domain.project(x0))
        reg = self.make_regularizer()
        state = omomd_init(domain, reg)
        if x0 is None:
            return state
        x0 = domain.project(x0)
        # a dual point whose link image is x0
        theta = x0 / reg.eta if reg.kind == EUCLIDEAN else np.log(np.maximum(x0, 1e-300)) / reg.eta
        return replace(state, primal=link(reg, theta, domain), dual=theta)

    def step(self, state: LearnerState, z, domain: ConvexDomain) -> LearnerState:
        if not np.all(np.isfinite(z)):
            raise ValueError("feedback z has non-finite entries")
        if self.algo == OMOD:
            return omod_step(state, z, domain)
        return omomd_step(state, z, self.make_regularizer(), domain)


def regret_bound_thm2(regularizer: Regularizer, u_T, z_dual_norms, domain: ConvexDomain) -> float:
    """``R(u) - min R + eta * sum ||z_t||_*^2``; bounds the linearised regret of OMoMD."""
    u_T = as_vector(u_T, domain.dim, "u_T")
    if not domain.contains(u_T, 1e-9):
        raise ValueError("u_T lies outside the domain")
    sq = math.fsum(float(v) ** 2 for v in z_dual_norms)
    return regularizer.value(u_T) - regularizer.min_value(domain) + regularizer.eta * sq


def ogd_theoretical_bound(B: float, L: float, T: int) -> float:
    """``B L sqrt(2T)`` for OGD on a radius-B ball with gradients bounded by L."""
    if not (B > 0 and L > 0 and T >= 1):
        raise ValueError("need B > 0, L > 0 and T >= 1")
    return B * L * math.sqrt(2 * T)


def default_eta(B: float, L: float, T: int) -> float:
    """Horizon-tuned rate ``B / (L sqrt(2T))`` matching ``ogd_theoretical_bound``."""
    if not (B > 0 and L > 0 and T >= 1):
        raise ValueError("need B > 0, L > 0 and T >= 1")
    return B / (L * math.sqrt(2 * T))
