"""Closed-form facts about the framework, checked numerically.

Each check returns a ``CheckResult``; ``run_checks`` runs the whole table.
Two fault-injection switches exist for exercising the failure path: a
forced quadrature rule and an extra map that is not monotone.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .domain import Ball, Box
from .equilibrium import SolverConfig, extragradient_solve
from .integral import (DEFAULT_RULE, EXACT_TOL, LossSpec, QuadratureRule, affine_loss_closed_form,
                       curl_discrepancy_bound, line_integral, omo_loss, quadrature_error,
                       sandwich_bounds, triangle_loop)
from .learners import OMOD, OMOMD, LearnerConfig
from .maps import (AffineMap, AffinePSD, QuadraticGradient, Rotation2D, SaddleGame,
                   check_conservative, check_monotone)
from .networks import MLN, SUPPLY_CHAIN, NetworkSpec, gen_network

GRID = 101


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def saddle_closed_form(r, c):
    """Loss of the saddle game with reference (1, 1) and reference value 0."""
    return r**3 / 3 - r**2 / 2 + r * c - c**2 / 2 + c**3 / 3 - 2.0 / 3.0


def saddle_hessian_det(r, c):
    return (2 * r - 1) * (2 * c - 1) - 1.0


def unit_grid(n: int = GRID) -> np.ndarray:
    g = np.linspace(0.0, 1.0, n)
    R, C = np.meshgrid(g, g, indexing="ij")
    return np.column_stack([R.ravel(), C.ravel()])


def random_psd_affine(rng: np.random.Generator, n: int, skew: float = 1.0) -> AffinePSD:
    """PSD symmetric part plus a random skew part."""
    M = rng.normal(size=(n, n))
    K = rng.normal(size=(n, n)) * skew
    return AffinePSD(M.T @ M / n + 0.5 * (K - K.T), rng.normal(size=n))


def monotone_families(seed: int = 0) -> list[tuple[str, object, object]]:
    """(name, map, domain) for every shipped monotone family.

    The saddle game is left out: its Jacobian spectrum is nonnegative but the
    field fails pairwise monotonicity (see ``check_saddle_not_monotone``).
    """
    rng = np.random.default_rng(seed)
    Q = rng.normal(size=(4, 4))
    return [
        ("rotation2d", Rotation2D(), Ball.origin(2, 1.0)),
        ("affine-psd", random_psd_affine(rng, 5), Box.unit(5)),
        ("quadratic", QuadraticGradient(Q.T @ Q, rng.normal(size=4)), Ball.origin(4, 2.0)),
        ("network-mln", gen_network(NetworkSpec.for_family(MLN, seed=seed)), Box.unit(10)),
        ("network-supply-chain", gen_network(NetworkSpec.for_family(SUPPLY_CHAIN, seed=seed)), Box.unit(6)),
    ]


# ---------------------------------------------------------------------------


def check_saddle_jacobian(rule: QuadratureRule = DEFAULT_RULE) -> CheckResult:
    F = SaddleGame()
    worst = 0.0
    for r, c in unit_grid():
        eig = np.sort(np.linalg.eigvals(F.jacobian([r, c])).real)
        worst = max(worst, float(np.max(np.abs(eig - np.sort([0.0, r + c])))))
    return CheckResult("saddle jacobian eigenvalues {0, r+c}", worst <= 1e-12, f"max dev {worst:.2e}")


def check_saddle_hessian(rule: QuadratureRule = DEFAULT_RULE, h: float = 1e-3) -> CheckResult:
    pts = unit_grid()
    det = saddle_hessian_det(pts[:, 0], pts[:, 1])
    # finite-difference Hessian of the quadrature loss on an interior subgrid
    spec = LossSpec(SaddleGame(), [1.0, 1.0])
    sub = unit_grid(11)
    sub = sub[(sub > h).all(1) & (sub < 1 - h).all(1)]
    worst_fd = 0.0
    for r, c in sub:
        f = lambda dr, dc: omo_loss(spec, [r + dr, c + dc], rule)  # noqa: E731
        hrr = (f(h, 0) - 2 * f(0, 0) + f(-h, 0)) / h**2
        hcc = (f(0, h) - 2 * f(0, 0) + f(0, -h)) / h**2
        hrc = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h)
        worst_fd = max(worst_fd, abs(hrr * hcc - hrc * hrc - saddle_hessian_det(r, c)))
    ok = bool(np.all(det <= 0.0)) and worst_fd <= 1e-4
    return CheckResult("saddle loss hessian det <= 0", ok,
                       f"max det {det.max():.2e}, fd mismatch {worst_fd:.2e}")


def check_saddle_values(rule: QuadratureRule = DEFAULT_RULE) -> CheckResult:
    spec = LossSpec(SaddleGame(), [1.0, 1.0], 0.0)
    pts = unit_grid()
    got = np.array([omo_loss(spec, p, rule) for p in pts])
    worst = float(np.max(np.abs(got - saddle_closed_form(pts[:, 0], pts[:, 1]))))
    return CheckResult("saddle loss closed form", worst <= 1e-10, f"max err {worst:.2e}")


def check_affine_oracle(rule: QuadratureRule = DEFAULT_RULE, count: int = 50, seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst_err, worst_eig = 0.0, np.inf
    for _ in range(count):
        n = int(rng.integers(1, 11))
        F = random_psd_affine(rng, n)
        o, x = rng.uniform(-1, 1, size=(2, n))
        f_o = float(rng.normal())
        quad = omo_loss(LossSpec(F, o, f_o), x, rule)
        worst_err = max(worst_err, abs(quad - affine_loss_closed_form(F.A, F.b, o, x, f_o)))
        worst_eig = min(worst_eig, F.min_sym_eig())
    ok = worst_err <= 1e-8 and worst_eig >= -1e-10
    return CheckResult("psd-affine loss closed form", ok,
                       f"max err {worst_err:.2e}, min sym eig {worst_eig:.2e}")


def check_monotone_families(rule: QuadratureRule = DEFAULT_RULE,
                            inject_nonmonotone: bool = False) -> CheckResult:
    fams = monotone_families()
    if inject_nonmonotone:
        fams.append(("injected", AffineMap([[-1.0, 0.0], [0.0, 1.0]], [0.0, 0.0]), Box.unit(2)))
    bad = [name for name, F, dom in fams if not check_monotone(F, dom, n_samples=300).monotone]
    return CheckResult("monotonicity of map families", not bad,
                       "violated: " + ", ".join(bad) if bad else f"{len(fams)} families monotone")


def check_saddle_not_monotone(rule: QuadratureRule = DEFAULT_RULE) -> CheckResult:
    F = SaddleGame()
    x, y = np.array([1.0, 0.0]), np.array([0.5, 0.55])
    inner = float((F(x) - F(y)) @ (x - y))
    rep = check_monotone(F, Box.unit(2), n_samples=300)
    ok = inner < 0 and not rep.monotone
    return CheckResult("saddle map fails pairwise monotonicity", ok,
                       f"<F(x)-F(y), x-y> = {inner:.4f} at x=(1,0), y=(0.5,0.55)")


def check_sandwich(rule: QuadratureRule = DEFAULT_RULE, pairs: int = 1000, seed: int = 0) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst_gap, worst_eps = -np.inf, 0.0
    for _, F, dom in monotone_families(seed):
        A, B = dom.sample(rng, pairs), dom.sample(rng, pairs)
        for a, b in zip(A, B):
            val = line_integral(F, a, b, rule)
            eps = quadrature_error(F, a, b, rule)
            lo, hi = sandwich_bounds(F, a, b)
            worst_gap = max(worst_gap, lo - eps - val, val - hi - eps)
            worst_eps = max(worst_eps, eps)
    ok = worst_gap <= 0 and worst_eps <= EXACT_TOL
    return CheckResult("sandwich bound", ok, f"max violation {worst_gap:.2e}, max eps_q {worst_eps:.1e}")


def check_stokes(rule: QuadratureRule = DEFAULT_RULE, triangles: int = 200, seed: int = 0) -> CheckResult:
    F, dom = Rotation2D(), Ball.origin(2, 1.0)
    beta, L, gamma = F.curl_constants(dom)
    rng = np.random.default_rng(seed)
    worst, tightest = -np.inf, np.inf
    for o, u, x in dom.sample(rng, 3 * triangles).reshape(triangles, 3, 2):
        loop = abs(triangle_loop(F, o, x, u, rule))
        bound = curl_discrepancy_bound(beta, L, gamma, np.linalg.norm(u - o), np.linalg.norm(x - u))
        worst = max(worst, loop - bound)
        if loop > 0:
            tightest = min(tightest, bound / loop)
    ok = worst <= 0 and tightest <= 10
    return CheckResult("curl discrepancy bound", ok, f"max excess {worst:.2e}, tightest ratio {tightest:.3f}")


def check_learner_equivalence(rule: QuadratureRule = DEFAULT_RULE, steps: int = 1000, seed: int = 0) -> CheckResult:
    dim, eta = 5, 0.1
    # large enough that the projection never activates
    dom = Ball.origin(dim, 1e6)
    Z = np.random.default_rng(seed).normal(size=(steps, dim))
    a, b = LearnerConfig(OMOD, eta), LearnerConfig(OMOMD, eta)
    sa, sb = a.init(dom), b.init(dom)
    worst = 0.0
    for z in Z:
        sa, sb = a.step(sa, z, dom), b.step(sb, z, dom)
        worst = max(worst, float(np.max(np.abs(sa.primal - sb.primal))))
    return CheckResult("omod = omomd (euclidean, interior)", worst <= 1e-12, f"max diff {worst:.2e}")


def check_saddle_nonconservative(rule: QuadratureRule = DEFAULT_RULE) -> CheckResult:
    rep = check_conservative(SaddleGame(), Box.unit(2), n_loops=50, quad_nodes=max(rule.nodes, 2))
    return CheckResult("saddle map is not conservative", not rep.conservative,
                       f"max |loop| {rep.max_abs_loop:.3e}")


def check_rotation_equilibrium(rule: QuadratureRule = DEFAULT_RULE) -> CheckResult:
    dom = Ball.origin(2, 1.0)
    x = extragradient_solve(Rotation2D(), dom, SolverConfig(tol=1e-8), x0=[0.6, 0.3])
    err = float(np.linalg.norm(x))
    return CheckResult("extragradient on rotation field", err <= 1e-6, f"||x|| = {err:.2e}")


CHECKS = (check_saddle_jacobian, check_saddle_hessian, check_saddle_values, check_affine_oracle,
          check_monotone_families, check_saddle_not_monotone, check_sandwich, check_stokes, check_learner_equivalence,
          check_saddle_nonconservative, check_rotation_equilibrium)


def run_checks(rule: QuadratureRule = DEFAULT_RULE, inject_nonmonotone: bool = False) -> list[CheckResult]:
    results = []
    for fn in CHECKS:
        start = time.perf_counter()
        if fn is check_monotone_families:
            res = fn(rule, inject_nonmonotone)
        else:
            res = fn(rule)
        results.append(CheckResult(res.name, res.passed, res.detail, time.perf_counter() - start))
    return results


def format_table(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  result  detail"]
    for r in results:
        lines.append(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL':<6}  {r.detail} ({r.seconds:.2f}s)")
    return "\n".join(lines)
