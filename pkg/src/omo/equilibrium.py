"""Monotone VI solving and the online monotone equilibration (OME) game."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import ConvexDomain, as_vector
from .integral import DEFAULT_RULE, LossSpec, QuadratureRule
from .learners import LearnerConfig
from .maps import MonotoneMap, NetworkGame, estimate_lipschitz, format_row
from .regret import AVERAGE_EQUILIBRIUM, HINDSIGHT, RegretTrace, approximate_u_T


class NonConvergenceError(RuntimeError):
    """The solver hit ``max_iter``. Carries the best iterate seen and its residual."""

    def __init__(self, message: str, best: np.ndarray, residual: float, iterations: int):
        super().__init__(message)
        self.best = best
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class SolverConfig:
    """Extragradient settings. ``gamma=None`` means ``0.5 / L`` for the map at hand."""

    gamma: float | None = None
    tol: float = 1e-8
    max_iter: int = 1_000_000

    def __post_init__(self):
        if self.gamma is not None and not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")


def vi_residual(F: MonotoneMap, domain: ConvexDomain, x, gamma: float = 1.0) -> float:
    """Natural-map residual ``||x - P(x - gamma F(x))||``; zero exactly at VI solutions."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    x = as_vector(x, F.dim)
    return float(np.linalg.norm(x - domain.project(x - gamma * F.evaluate(x))))


def lipschitz_for(F: MonotoneMap, domain: ConvexDomain) -> float:
    L = F.lipschitz()
    if L is None:
        L = estimate_lipschitz(F, domain, n_samples=2000)
    return L


def step_size(F: MonotoneMap, domain: ConvexDomain, config: SolverConfig) -> float:
    L = lipschitz_for(F, domain)
    if config.gamma is None:
        return 0.5 / L if L > 0 else 1.0
    if config.gamma * L >= 1:
        raise ValueError(f"gamma={config.gamma} violates gamma < 1/L with L={L:.6g}")
    return config.gamma


def extragradient_solve(F: MonotoneMap, domain: ConvexDomain, config: SolverConfig = SolverConfig(),
                        x0=None, history: list | None = None) -> np.ndarray:
    """Korpelevich extragradient; stops once ``vi_residual(x) <= tol``.

    If ``history`` is a list, ``vi_residual(x, gamma)`` at the step size in
    use is appended for every iterate. For affine monotone maps that sequence
    is non-increasing, while the gamma = 1 residual used for stopping need not be.
    """
    gamma = step_size(F, domain, config)
    x = domain.project(np.zeros(domain.dim) if x0 is None else as_vector(x0, domain.dim))
    best, best_res = x, math.inf
    for k in range(config.max_iter + 1):
        Fx = F.evaluate(x)
        res = float(np.linalg.norm(x - domain.project(x - Fx)))
        if history is not None:
            history.append(float(np.linalg.norm(x - domain.project(x - gamma * Fx))))
        if res < best_res:
            best, best_res = x, res
        if res <= config.tol:
            return x
        if k == config.max_iter:
            break
        y = domain.project(x - gamma * Fx)
        x = domain.project(x - gamma * F.evaluate(y))
    raise NonConvergenceError(
        f"extragradient did not reach tol={config.tol:g} in {config.max_iter} iterations "
        f"(best residual {best_res:.3e})", best, best_res, config.max_iter)


# ---------------------------------------------------------------------------
# pools and the adversary


@dataclass(frozen=True)
class PoolEntry:
    map: MonotoneMap
    x_star: np.ndarray
    residual: float


@dataclass
class VIPool:
    entries: list[PoolEntry]
    domain: ConvexDomain
    seed: int = 0
    tol: float = 1e-8
    meta: dict[str, str] = field(default_factory=dict)

    def __len__(self):
        return len(self.entries)

    @property
    def maps(self) -> list[MonotoneMap]:
        return [e.map for e in self.entries]

    @property
    def equilibria(self) -> np.ndarray:
        return np.array([e.x_star for e in self.entries])

    def verify(self, factor: float = 2.0) -> list[float]:
        """Recompute residuals; raise if any exceeds ``factor * tol``."""
        out = []
        for i, e in enumerate(self.entries):
            r = vi_residual(e.map, self.domain, e.x_star)
            if r > factor * self.tol:
                raise ValueError(f"pool entry {i}: residual {r:.3e} > {factor} * tol")
            out.append(r)
        return out


def ome_adversary(pool: VIPool, prediction) -> tuple[int, MonotoneMap, np.ndarray]:
    """Entry whose equilibrium is farthest (Euclidean) from ``prediction``; ties go to the lowest index."""
    if not pool.entries:
        raise ValueError("empty pool")
    p = as_vector(prediction, pool.domain.dim, "prediction")
    dist = np.linalg.norm(pool.equilibria - p, axis=1)
    i = int(np.argmax(dist))
    return i, pool.entries[i].map, pool.entries[i].x_star


def play_ome(pool: VIPool, learner: LearnerConfig, T: int, x0=None) -> tuple[list[int], list[np.ndarray]]:
    """Run the learner against the adversary; returns chosen indices and plays."""
    if T < 1:
        raise ValueError("T must be at least 1")
    state = learner.init(pool.domain, x0)
    indices, plays = [], []
    for _ in range(T):
        x = state.primal
        idx, F, _ = ome_adversary(pool, x)
        indices.append(idx)
        plays.append(x)
        state = learner.step(state, F.evaluate(x), pool.domain)
    return indices, plays


def run_ome(pool: VIPool, learner: LearnerConfig, T: int, rule: QuadratureRule = DEFAULT_RULE,
            u_T=None, comparator: str = HINDSIGHT, solver_config: SolverConfig | None = None,
            x0=None) -> RegretTrace:
    """Play T rounds of online equilibration against the farthest-equilibrium adversary.

    The learner only ever sees ``F_t(x_t)``. Each round's reference point is
    the chosen VI's equilibrium with reference value 0. Unless ``u_T`` is
    given, the comparator is computed by ``approximate_u_T`` in mode
    ``comparator``: ``hindsight`` uses the realised sequence, while
    ``average-equilibrium`` uses the whole pool and ignores the sequence.
    The learner does not depend on u_T, so the plays come first and the
    accounting second.
    """
    indices, plays = play_ome(pool, learner, T, x0)
    if u_T is None:
        config = solver_config or SolverConfig(tol=pool.tol)
        if comparator == AVERAGE_EQUILIBRIUM:
            u_T = approximate_u_T(pool.maps, pool.equilibria, pool.domain, AVERAGE_EQUILIBRIUM, config)
        else:
            maps = [pool.entries[i].map for i in indices]
            o_list = [pool.entries[i].x_star for i in indices]
            u_T = approximate_u_T(maps, o_list, pool.domain, comparator, config)
    trace = RegretTrace(u_T)
    for t, (idx, x) in enumerate(zip(indices, plays), start=1):
        e = pool.entries[idx]
        trace.record(t, e.map, LossSpec(e.map, e.x_star, 0.0), x, e.x_star, rule, index=idx)
    return trace


# ---------------------------------------------------------------------------
# pool files: entry count, then per entry a network block and an equilibrium line


def write_pool(pool: VIPool, fh) -> None:
    fh.write(f"{len(pool.entries)}\n")
    for e in pool.entries:
        if not isinstance(e.map, NetworkGame):
            raise TypeError("only NetworkGame pools can be serialised")
        fh.write(e.map.to_text())
        fh.write(format_row(e.x_star) + "\n")


def read_pool(fh, domain: ConvexDomain, tol: float = 1e-8, seed: int = 0,
              n_firms: int | None = None, controls_per_firm: int = 1, family: str = "generic") -> VIPool:
    lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty pool file")
    count = int(lines[0])
    pos, entries = 1, []
    for _ in range(count):
        n = int(lines[pos])
        F = NetworkGame.from_lines(lines[pos:pos + n + 2], n_firms=n_firms,
                                   controls_per_firm=controls_per_firm, family=family)
        x_star = as_vector([float(v) for v in lines[pos + n + 2].split()], n, "x_star")
        entries.append(PoolEntry(F, x_star, vi_residual(F, domain, x_star)))
        pos += n + 3
    pool = VIPool(entries, domain, seed, tol)
    pool.verify()
    return pool
