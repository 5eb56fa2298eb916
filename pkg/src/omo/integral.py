"""Straight-line path integrals of vector fields and related bounds.

The OMO loss of a play ``x`` against a map ``F`` with reference point ``o``
and reference value ``f_o`` is ``f_o + int_0^1 <F(o + t(x - o)), x - o> dt``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .domain import ConvexDomain, as_vector
from .maps import MonotoneMap, finite_difference_jacobian

# reported integration error for integrands the rule integrates exactly
EXACT_TOL = 1e-9

GAUSS_LEGENDRE = "gauss-legendre"
TRAPEZOID = "trapezoid"
_KINDS = {GAUSS_LEGENDRE: GAUSS_LEGENDRE, "gl": GAUSS_LEGENDRE, "gauss": GAUSS_LEGENDRE,
          TRAPEZOID: TRAPEZOID, "trap": TRAPEZOID, "composite-trapezoid": TRAPEZOID}


@lru_cache(maxsize=64)
def _unit_rule(kind: str, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    if kind == GAUSS_LEGENDRE:
        x, w = np.polynomial.legendre.leggauss(nodes)
        tau, wt = 0.5 * (x + 1.0), 0.5 * w
    else:
        tau = np.linspace(0.0, 1.0, nodes)
        wt = np.full(nodes, 1.0 / (nodes - 1)) if nodes > 1 else np.ones(1)
        if nodes > 1:
            wt[0] = wt[-1] = 0.5 / (nodes - 1)
    tau.setflags(write=False)
    wt.setflags(write=False)
    return tau, wt


@dataclass(frozen=True)
class QuadratureRule:
    kind: str = GAUSS_LEGENDRE
    nodes: int = 16

    def __post_init__(self):
        kind = _KINDS.get(str(self.kind).lower())
        if kind is None:
            raise ValueError(f"unknown quadrature kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if int(self.nodes) != self.nodes or self.nodes < 2:
            raise ValueError("quadrature needs at least 2 nodes")
        object.__setattr__(self, "nodes", int(self.nodes))

    @classmethod
    def unchecked(cls, kind: str, nodes: int) -> "QuadratureRule":
        """Build a rule without the node-count check. Only for fault-injection tests."""
        rule = object.__new__(cls)
        object.__setattr__(rule, "kind", _KINDS[kind])
        object.__setattr__(rule, "nodes", int(nodes))
        return rule

    def unit_nodes(self) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights on [0, 1]."""
        return _unit_rule(self.kind, self.nodes)

    def exact_degree(self) -> int:
        return 2 * self.nodes - 1 if self.kind == GAUSS_LEGENDRE else 1

    def refined(self) -> "QuadratureRule":
        n = 2 * self.nodes if self.kind == GAUSS_LEGENDRE else 2 * self.nodes - 1
        return QuadratureRule(self.kind, n)


DEFAULT_RULE = QuadratureRule()


@dataclass(frozen=True)
class LossSpec:
    """A round's loss: the map plus its reference point and reference value."""

    map: MonotoneMap
    o: np.ndarray
    f_o: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "o", as_vector(self.o, self.map.dim, "o"))
        object.__setattr__(self, "f_o", float(self.f_o))


def line_integral(F: MonotoneMap, a, b, rule: QuadratureRule = DEFAULT_RULE) -> float:
    """Quadrature for the integral of <F, dx> along the segment a -> b."""
    a = as_vector(a, F.dim, "a")
    b = as_vector(b, F.dim, "b")
    d = b - a
    if not np.any(d):
        return 0.0
    tau, w = rule.unit_nodes()
    pts = a + tau[:, None] * d
    return float(w @ (F.evaluate_many(pts) @ d))


def quadrature_error(F: MonotoneMap, a, b, rule: QuadratureRule = DEFAULT_RULE) -> float:
    """Error estimate to report next to ``line_integral(F, a, b, rule)``.

    Polynomial maps integrated exactly get ``EXACT_TOL``; otherwise the
    difference against a rule with doubled nodes.
    """
    if F.degree is not None and F.degree <= rule.exact_degree():
        return EXACT_TOL
    coarse = line_integral(F, a, b, rule)
    fine = line_integral(F, a, b, rule.refined())
    return max(abs(fine - coarse), EXACT_TOL)


def omo_loss(spec: LossSpec, x, rule: QuadratureRule = DEFAULT_RULE) -> float:
    return spec.f_o + line_integral(spec.map, spec.o, x, rule)


def sandwich_bounds(F: MonotoneMap, a, b) -> tuple[float, float]:
    """(<F(a), b - a>, <F(b), b - a>); brackets the segment integral when F is monotone."""
    a = as_vector(a, F.dim, "a")
    b = as_vector(b, F.dim, "b")
    d = b - a
    return float(F.evaluate(a) @ d), float(F.evaluate(b) @ d)


def polyline_integral(F: MonotoneMap, waypoints, rule: QuadratureRule = DEFAULT_RULE) -> float:
    pts = list(waypoints)
    if len(pts) < 2:
        raise ValueError("a polyline needs at least two waypoints")
    total = 0.0
    for p, q in zip(pts[:-1], pts[1:]):
        total += line_integral(F, p, q, rule)
    return total


def triangle_loop(F: MonotoneMap, a, b, c, rule: QuadratureRule = DEFAULT_RULE) -> float:
    """Closed integral a -> b -> c -> a. Positive for counter-clockwise loops in a positive curl field."""
    return polyline_integral(F, [a, b, c, a], rule)


def affine_loss_closed_form(A, b, o, x, f_o: float = 0.0) -> float:
    """Closed-form OMO loss of F(x) = Ax + b, independent of any quadrature."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    o = np.asarray(o, dtype=float)
    x = np.asarray(x, dtype=float)
    At = A.T
    quad = x @ At @ x + x @ (A - At) @ o - o @ At @ o
    return float(f_o + 0.5 * quad + b @ (x - o))


def curl_discrepancy_bound(beta: float, L: float, gamma: float, d_uo: float, d_xu: float) -> float:
    """Bound on |regret_s - regret_n| from curl and triangle-area bounds.

    ``beta`` bounds the Jacobian, ``L`` bounds ||F||, ``gamma`` bounds the
    second derivatives; the distances are ||u - o|| and ||x - u||.
    """
    for name, v in (("beta", beta), ("L", L), ("gamma", gamma), ("d_uo", d_uo), ("d_xu", d_xu)):
        if not v >= 0:
            raise ValueError(f"{name} must be nonnegative, got {v}")
    return 3.0 * math.sqrt(0.5 * (beta * beta + L * gamma)) * d_uo * d_xu


def curl_constants(F: MonotoneMap, domain: ConvexDomain, n_samples: int = 200,
                   seed: int = 0, h: float = 1e-4) -> tuple[float, float, float]:
    """(beta, L, gamma) for ``curl_discrepancy_bound``.

    Uses the map's analytic values when it has them; otherwise sampled
    maxima of the Jacobian spectral norm, ||F||, and the (2,1)-norm of the
    matrix of pure second derivatives d2 F_i / dx_j^2. Sampled values are
    estimates, not certified bounds. Spectral norms are rotation invariant,
    so constants taken in the ambient space also cover any 3-D slice.
    """
    known = F.curl_constants(domain)
    if known is not None:
        return known
    rng = np.random.default_rng(seed)
    X = domain.sample(rng, n_samples)
    beta = max(np.linalg.norm(F.jacobian(x), 2) for x in X)
    L = float(np.max(np.linalg.norm(F.evaluate_many(X), axis=1)))
    gamma = 0.0
    eye = np.eye(F.dim)
    for x in X:
        # column j of d2 holds d2 F_i / dx_j^2 for all i
        d2 = np.stack([
            (finite_difference_jacobian(F, x + h * e, h) - finite_difference_jacobian(F, x - h * e, h))[:, j] / (2 * h)
            for j, e in enumerate(eye)
        ], axis=1)
        gamma = max(gamma, float(np.sum(np.linalg.norm(d2, axis=0))))
    return float(beta), L, gamma


def triangle_discrepancy_bound(F: MonotoneMap, o, u, x, domain: ConvexDomain,
                               constants: tuple[float, float, float] | None = None) -> float:
    """Bound on |triangle_loop(F, o, u, x)| for a concrete reference/comparator/play triple."""
    o, u, x = (as_vector(v, F.dim) for v in (o, u, x))
    beta, L, gamma = constants if constants is not None else curl_constants(F, domain)
    return curl_discrepancy_bound(beta, L, gamma, float(np.linalg.norm(u - o)), float(np.linalg.norm(x - u)))
