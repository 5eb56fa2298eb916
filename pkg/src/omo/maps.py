"""Monotone maps: evaluation, Jacobians and sampled property checks.

A map here is a single-valued field ``F: R^n -> R^n``. Set-valued maps are
represented by a fixed selection; every learner only ever needs one vector
``z_t`` from ``F_t(x_t)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .domain import Box, ConvexDomain, as_vector

FD_STEP = 1e-5
PSD_TOL = 1e-10


class MonotoneMap:
    """Base class. Subclasses implement ``evaluate_many`` on (k, dim) arrays.

    ``degree`` is the polynomial degree of F in x, or None when F is not a
    polynomial; line integrals use it to decide whether Gauss-Legendre is exact.
    """

    dim: int
    degree: int | None = None
    name: str = "map"

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def evaluate(self, x) -> np.ndarray:
        x = as_vector(x, self.dim)
        return self.evaluate_many(x[None, :])[0]

    __call__ = evaluate

    def jacobian(self, x, h: float = FD_STEP) -> np.ndarray:
        return finite_difference_jacobian(self, x, h)

    def lipschitz(self) -> float | None:
        """Global Lipschitz constant when known in closed form."""
        return None

    def curl_constants(self, domain: ConvexDomain) -> tuple[float, float, float] | None:
        """Analytic (jacobian bound, value bound, second-derivative bound) on ``domain``."""
        return None


def evaluate(F: MonotoneMap, x) -> np.ndarray:
    return F.evaluate(x)


def jacobian(F: MonotoneMap, x, h: float = FD_STEP) -> np.ndarray:
    return F.jacobian(as_vector(x, F.dim), h)


def finite_difference_jacobian(F: MonotoneMap, x, h: float = FD_STEP) -> np.ndarray:
    """Central differences; column j is dF/dx_j."""
    if h <= 0:
        raise ValueError("finite-difference step must be positive")
    x = as_vector(x, F.dim)
    E = np.eye(F.dim) * h
    plus = F.evaluate_many(x + E)
    minus = F.evaluate_many(x - E)
    return ((plus - minus) / (2 * h)).T


class AffineMap(MonotoneMap):
    """F(x) = A x + b with no monotonicity check (used for negative tests)."""

    degree = 1
    name = "affine"

    def __init__(self, A, b=None):
        A = np.array(A, dtype=float, ndmin=2)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise ValueError("A has non-finite entries")
        n = A.shape[0]
        b = np.zeros(n) if b is None else as_vector(b, n, "b").copy()
        A.setflags(write=False)
        b.setflags(write=False)
        self.A = A
        self.b = b
        self.dim = n

    def evaluate_many(self, X):
        return X @ self.A.T + self.b

    def jacobian(self, x=None, h: float = FD_STEP) -> np.ndarray:
        return self.A.copy()

    @property
    def symmetric_part(self) -> np.ndarray:
        return 0.5 * (self.A + self.A.T)

    def min_sym_eig(self) -> float:
        return float(np.linalg.eigvalsh(self.symmetric_part)[0])

    def lipschitz(self) -> float:
        return float(np.linalg.norm(self.A, 2))

    def curl_constants(self, domain):
        beta = self.lipschitz()
        bound = beta * domain.max_norm() + float(np.linalg.norm(self.b))
        return beta, bound, 0.0

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim})"


class AffinePSD(AffineMap):
    """Affine map whose symmetric part is positive semi-definite."""

    name = "affine_psd"

    def __init__(self, A, b=None):
        super().__init__(A, b)
        lam = self.min_sym_eig()
        if lam < -PSD_TOL:
            raise ValueError(f"symmetric part of A has eigenvalue {lam:.3g} < 0; map is not monotone")


class QuadraticGradient(AffinePSD):
    """Gradient of the convex quadratic 0.5 x'Qx + c'x."""

    name = "quadratic"

    def __init__(self, Q, c=None):
        Q = np.array(Q, dtype=float, ndmin=2)
        if not np.allclose(Q, Q.T, rtol=0, atol=1e-12):
            raise ValueError("Q must be symmetric")
        super().__init__(Q, c)

    @property
    def Q(self):
        return self.A

    @property
    def c(self):
        return self.b

    def potential(self, x) -> float:
        x = as_vector(x, self.dim)
        return float(0.5 * x @ self.A @ x + self.b @ x)


class Rotation2D(AffineMap):
    """The planar rotation field F(x, y) = (-y, x): monotone, never conservative."""

    name = "rotation2d"

    def __init__(self):
        super().__init__([[0.0, -1.0], [1.0, 0.0]], [0.0, 0.0])


class SaddleGame(MonotoneMap):
    """Two-player game with field F(r, c) = (g, g), g = r^2 - r c + c^2.

    The Jacobian has eigenvalues {0, r + c}, nonnegative on [0, 1]^2, but it
    is not symmetric and its symmetric part has determinant -2.25 (r - c)^2.
    So the field is not monotone in the pairwise sense: x = (1, 0) and
    y = (0.5, 0.55) give <F(x) - F(y), x - y> < 0.
    """

    dim = 2
    degree = 2
    name = "saddle"

    def evaluate_many(self, X):
        r, c = X[:, 0], X[:, 1]
        g = r * r - r * c + c * c
        return np.stack([g, g], axis=1)

    def jacobian(self, x, h: float = FD_STEP) -> np.ndarray:
        r, c = as_vector(x, 2)
        row = [2 * r - c, 2 * c - r]
        return np.array([row, row])

    @staticmethod
    def canonical_domain() -> Box:
        return Box.unit(2)

    def __repr__(self):
        return "SaddleGame()"


class FunctionMap(MonotoneMap):
    """Wrap a plain callable. ``fn`` receives and returns 1-D arrays."""

    def __init__(self, fn, dim: int, jac=None, degree: int | None = None, name: str = "function"):
        self.fn = fn
        self.dim = dim
        self._jac = jac
        self.degree = degree
        self.name = name

    def evaluate_many(self, X):
        return np.array([np.asarray(self.fn(x), dtype=float) for x in X]).reshape(X.shape)

    def jacobian(self, x, h: float = FD_STEP):
        if self._jac is not None:
            return np.asarray(self._jac(as_vector(x, self.dim)), dtype=float)
        return finite_difference_jacobian(self, x, h)


class MeanMap(MonotoneMap):
    """Pointwise average of maps sharing a dimension."""

    name = "mean"

    def __init__(self, maps):
        maps = list(maps)
        if not maps:
            raise ValueError("need at least one map")
        dims = {F.dim for F in maps}
        if len(dims) != 1:
            raise ValueError(f"maps disagree on dimension: {sorted(dims)}")
        self.maps = maps
        self.dim = dims.pop()
        degrees = [F.degree for F in maps]
        self.degree = None if None in degrees else max(degrees)

    def evaluate_many(self, X):
        return sum(F.evaluate_many(X) for F in self.maps) / len(self.maps)

    def jacobian(self, x, h: float = FD_STEP):
        return sum(F.jacobian(x, h) for F in self.maps) / len(self.maps)


# ---------------------------------------------------------------------------
# sampled property checks


@dataclass(frozen=True)
class MonotonicityReport:
    sampled_pairs: int
    min_pairwise_inner: float
    min_jacobian_sym_eig: float
    tol: float

    @property
    def verdict(self) -> str:
        ok = self.min_pairwise_inner >= -self.tol and self.min_jacobian_sym_eig >= -self.tol
        return "monotone" if ok else "violated"

    @property
    def monotone(self) -> bool:
        return self.verdict == "monotone"


def check_monotone(F: MonotoneMap, domain: ConvexDomain, n_samples: int = 500,
                   tol: float = 1e-9, seed: int = 0) -> MonotonicityReport:
    """Sample point pairs and Jacobians to look for a monotonicity violation."""
    if n_samples < 2:
        raise ValueError("need at least two samples")
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    rng = np.random.default_rng(seed)
    X = domain.sample(rng, n_samples)
    Y = domain.sample(rng, n_samples)
    inner = np.sum((F.evaluate_many(X) - F.evaluate_many(Y)) * (X - Y), axis=1)
    eig = min(
        np.linalg.eigvalsh(0.5 * (J + J.T))[0]
        for J in (F.jacobian(p) for p in np.vstack([X, Y]))
    )
    return MonotonicityReport(n_samples, float(inner.min()), float(eig), tol)


@dataclass(frozen=True)
class ConservativityReport:
    """``witness`` holds the triangle with the largest loop integral, if it exceeds tol."""

    n_loops: int
    max_abs_loop: float
    witness: tuple[np.ndarray, np.ndarray, np.ndarray] | None
    value: float | None

    @property
    def verdict(self) -> str:
        return "conservative_consistent" if self.witness is None else "non_conservative"

    @property
    def conservative(self) -> bool:
        return self.witness is None


def check_conservative(F: MonotoneMap, domain: ConvexDomain | None = None, n_loops: int = 100,
                       quad_nodes: int = 16, tol: float = 1e-9, seed: int = 0,
                       triangles=None) -> ConservativityReport:
    """Integrate F around triangles and report the worst closed-loop value.

    Triangles are random with vertices in ``domain`` unless given explicitly.
    """
    from .integral import QuadratureRule, triangle_loop

    rule = QuadratureRule("gauss-legendre", quad_nodes)
    if triangles is None:
        if domain is None:
            raise ValueError("need a domain to sample loops from")
        rng = np.random.default_rng(seed)
        triangles = [tuple(domain.sample(rng, 3)) for _ in range(n_loops)]
    worst, worst_val, worst_tri = -1.0, 0.0, None
    for a, b, c in triangles:
        val = triangle_loop(F, a, b, c, rule)
        if abs(val) > worst:
            worst, worst_val, worst_tri = abs(val), val, (np.asarray(a, float), np.asarray(b, float), np.asarray(c, float))
    if worst > tol:
        return ConservativityReport(len(triangles), worst, worst_tri, worst_val)
    return ConservativityReport(len(triangles), worst, None, None)


def estimate_lipschitz(F: MonotoneMap, domain: ConvexDomain, n_samples: int = 1000,
                       seed: int = 0) -> float:
    """Largest sampled ratio ||F(x') - F(x)|| / ||x' - x||; a lower bound on L."""
    if n_samples < 2:
        raise ValueError("need at least two samples")
    rng = np.random.default_rng(seed)
    X = domain.sample(rng, n_samples)
    Y = domain.sample(rng, n_samples)
    num = np.linalg.norm(F.evaluate_many(X) - F.evaluate_many(Y), axis=1)
    den = np.linalg.norm(X - Y, axis=1)
    keep = den > 1e-12
    if not np.any(keep):
        return 0.0
    return float(np.max(num[keep] / den[keep]))


def max_map_norm(F: MonotoneMap, domain: ConvexDomain, n_samples: int = 1000, seed: int = 0) -> float:
    """Sampled estimate of sup ||F(x)|| over the domain (the bound on ||z_t||)."""
    rng = np.random.default_rng(seed)
    X = domain.sample(rng, n_samples)
    if isinstance(domain, Box) and domain.dim <= 12:
        # corners carry the maximum for affine maps
        corners = np.array(np.meshgrid(*zip(domain.lower, domain.upper), indexing="ij")).reshape(domain.dim, -1).T
        X = np.vstack([X, corners])
    return float(np.max(np.linalg.norm(F.evaluate_many(X), axis=1)))


def format_row(values) -> str:
    return " ".join(repr(float(v)) for v in values)


class NetworkGame(AffinePSD):
    """Concatenated negative utility gradients of firms in an affine game.

    Firm ``i`` owns the coordinates ``block(i)``. The text form is the
    dimension on one line, A row-major one row per line, then b.
    """

    name = "network"

    def __init__(self, A, b, n_firms: int | None = None, controls_per_firm: int = 1,
                 family: str = "generic", seed: int | None = None):
        super().__init__(A, b)
        if n_firms is None:
            n_firms = self.dim // controls_per_firm
        if n_firms * controls_per_firm != self.dim:
            raise ValueError(f"{n_firms} firms x {controls_per_firm} controls != dim {self.dim}")
        self.n_firms = n_firms
        self.controls_per_firm = controls_per_firm
        self.family = family
        self.seed = seed

    def block(self, i: int) -> slice:
        k = self.controls_per_firm
        return slice(i * k, (i + 1) * k)

    def to_text(self) -> str:
        lines = [str(self.dim)]
        lines += [format_row(row) for row in self.A]
        lines.append(format_row(self.b))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_lines(cls, lines, **meta) -> "NetworkGame":
        lines = list(lines)
        try:
            n = int(lines[0])
            A = [[float(v) for v in lines[1 + i].split()] for i in range(n)]
            b = [float(v) for v in lines[1 + n].split()]
        except (IndexError, ValueError) as exc:
            raise ValueError(f"malformed network block: {exc}") from None
        if any(len(row) != n for row in A) or len(b) != n:
            raise ValueError("network block rows do not match the declared dimension")
        return cls(A, b, **meta)

    @classmethod
    def from_text(cls, text: str, **meta) -> "NetworkGame":
        return cls.from_lines([ln for ln in text.splitlines() if ln.strip()], **meta)

    def __repr__(self):
        return f"NetworkGame(family={self.family!r}, firms={self.n_firms}, dim={self.dim})"
