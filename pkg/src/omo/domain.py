"""Convex feasible sets with closed-form Euclidean projections.

Three shapes are supported: axis-aligned boxes, Euclidean balls and the
probability simplex. All are immutable; every method is pure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


def as_vector(x, dim: int | None = None, name: str = "x") -> np.ndarray:
    """Coerce ``x`` to a finite 1-D float array, optionally checking its length."""
    v = np.asarray(x, dtype=float)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"{name} has dimension {v.shape[0]}, expected {dim}")
    return v


class ConvexDomain:
    dim: int
    kind: str

    def project(self, p) -> np.ndarray:
        raise NotImplementedError

    def contains(self, p, tol: float = 0.0) -> bool:
        raise NotImplementedError

    def diameter(self) -> float:
        raise NotImplementedError

    def max_norm(self) -> float:
        """Largest Euclidean norm attained by a point of the domain."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` points uniformly from the domain, shape (size, dim)."""
        raise NotImplementedError

    def describe(self) -> dict[str, str]:
        raise NotImplementedError

    def _check(self, p) -> np.ndarray:
        return as_vector(p, self.dim, "point")


@dataclass(frozen=True, eq=False)
class Box(ConvexDomain):
    lower: np.ndarray
    upper: np.ndarray
    kind: str = field(default="box", init=False)

    def __post_init__(self):
        lo = as_vector(self.lower, name="lower")
        hi = as_vector(self.upper, lo.shape[0], "upper")
        if np.any(lo > hi):
            raise ValueError("box requires lower <= upper componentwise")
        lo.setflags(write=False)
        hi.setflags(write=False)
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def unit(cls, dim: int) -> "Box":
        return cls(np.zeros(dim), np.ones(dim))

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def project(self, p) -> np.ndarray:
        return np.clip(self._check(p), self.lower, self.upper)

    def contains(self, p, tol: float = 0.0) -> bool:
        p = self._check(p)
        excess = np.maximum(self.lower - p, p - self.upper)
        return bool(np.max(excess, initial=-np.inf) <= tol)

    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def max_norm(self) -> float:
        return float(np.linalg.norm(np.maximum(np.abs(self.lower), np.abs(self.upper))))

    def sample(self, rng, size):
        return rng.uniform(self.lower, self.upper, size=(size, self.dim))

    def describe(self):
        return {
            "domain": "box",
            "lower": " ".join(repr(float(v)) for v in self.lower),
            "upper": " ".join(repr(float(v)) for v in self.upper),
        }


@dataclass(frozen=True, eq=False)
class Ball(ConvexDomain):
    center: np.ndarray
    radius: float
    kind: str = field(default="ball", init=False)

    def __post_init__(self):
        c = as_vector(self.center, name="center")
        if not (math.isfinite(self.radius) and self.radius > 0):
            raise ValueError("ball radius must be positive and finite")
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    @classmethod
    def origin(cls, dim: int, radius: float = 1.0) -> "Ball":
        return cls(np.zeros(dim), radius)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def project(self, p) -> np.ndarray:
        p = self._check(p)
        d = p - self.center
        n = np.linalg.norm(d)
        # a few ulps of slack keeps projection idempotent on the boundary
        if n <= self.radius * (1.0 + 4 * np.finfo(float).eps):
            return p
        return self.center + d * (self.radius / n)

    def contains(self, p, tol: float = 0.0) -> bool:
        p = self._check(p)
        return bool(np.linalg.norm(p - self.center) - self.radius <= tol)

    def diameter(self) -> float:
        return 2.0 * self.radius

    def max_norm(self) -> float:
        return float(np.linalg.norm(self.center)) + self.radius

    def sample(self, rng, size):
        g = rng.standard_normal((size, self.dim))
        g /= np.linalg.norm(g, axis=1, keepdims=True)
        r = self.radius * rng.uniform(size=(size, 1)) ** (1.0 / self.dim)
        return self.center + g * r

    def describe(self):
        return {
            "domain": "ball",
            "center": " ".join(repr(float(v)) for v in self.center),
            "radius": repr(self.radius),
        }


@dataclass(frozen=True, eq=False)
class Simplex(ConvexDomain):
    n: int
    kind: str = field(default="simplex", init=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("simplex dimension must be a positive integer")

    @property
    def dim(self) -> int:
        return int(self.n)

    def project(self, p) -> np.ndarray:
        p = self._check(p)
        if np.all(p >= 0) and abs(p.sum() - 1.0) <= 1e-12:
            return p
        u = np.sort(p)[::-1]
        css = np.cumsum(u) - 1.0
        k = np.arange(1, p.shape[0] + 1)
        rho = np.nonzero(u - css / k > 0)[0][-1]
        theta = css[rho] / (rho + 1)
        return np.maximum(p - theta, 0.0)

    def contains(self, p, tol: float = 0.0) -> bool:
        p = self._check(p)
        slack = np.sum(np.maximum(-p, 0.0)) + abs(p.sum() - 1.0)
        return bool(slack <= tol)

    def diameter(self) -> float:
        return math.sqrt(2.0) if self.dim > 1 else 0.0

    def max_norm(self) -> float:
        return 1.0

    def sample(self, rng, size):
        return rng.dirichlet(np.ones(self.dim), size=size)

    def describe(self):
        return {"domain": "simplex", "dim": str(self.dim)}


def project(domain: ConvexDomain, p) -> np.ndarray:
    return domain.project(p)


def contains(domain: ConvexDomain, p, tol: float = 0.0) -> bool:
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    return domain.contains(p, tol)


def diameter(domain: ConvexDomain) -> float:
    return domain.diameter()
