"""Seeded affine network games standing in for the MLN and supply-chain models.

Each firm controls a block of coordinates. The map is ``F(x) = A x + b`` with
``A = S + K``: ``S = D'D + delta I`` is symmetric positive definite (each
firm's utility is concave in its own controls) and ``K`` is skew-symmetric
with nonzero entries only between different firms, which makes F monotone
but not the gradient of any single objective.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .domain import Box, ConvexDomain
from .equilibrium import PoolEntry, SolverConfig, VIPool, extragradient_solve, vi_residual
from .maps import PSD_TOL, NetworkGame, check_monotone

MLN = "mln"
SUPPLY_CHAIN = "supply-chain"
FAMILIES = {
    # service providers pick quantity, network providers quality/price
    MLN: {"n_firms": 5, "controls_per_firm": 2},
    # product flow and frequency of operation per firm
    SUPPLY_CHAIN: {"n_firms": 3, "controls_per_firm": 2},
}


@dataclass(frozen=True)
class NetworkSpec:
    family: str = MLN
    n_firms: int = 5
    controls_per_firm: int = 2
    d_range: tuple[float, float] = (-1.0, 1.0)
    k_range: tuple[float, float] = (-0.5, 0.5)
    b_range: tuple[float, float] = (-1.0, 1.0)
    delta: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {sorted(FAMILIES)}")
        if self.n_firms < 1 or self.controls_per_firm < 1:
            raise ValueError("need at least one firm and one control per firm")
        for name in ("d_range", "k_range", "b_range"):
            lo, hi = getattr(self, name)
            if not lo <= hi:
                raise ValueError(f"{name} is empty: {lo} > {hi}")
            object.__setattr__(self, name, (float(lo), float(hi)))

    @classmethod
    def for_family(cls, family: str, **overrides) -> "NetworkSpec":
        return cls(family=family, **{**FAMILIES[family], **overrides})

    @property
    def dim(self) -> int:
        return self.n_firms * self.controls_per_firm

    def describe(self) -> dict[str, str]:
        return {k: str(v) for k, v in asdict(self).items()}


def gen_network(spec: NetworkSpec) -> NetworkGame:
    rng = np.random.default_rng(spec.seed)
    n, k = spec.dim, spec.controls_per_firm
    D = rng.uniform(*spec.d_range, size=(n, n))
    S = D.T @ D + spec.delta * np.eye(n)
    S = 0.5 * (S + S.T)
    firm = np.arange(n) // k
    upper = np.triu(rng.uniform(*spec.k_range, size=(n, n)), 1)
    upper *= firm[:, None] != firm[None, :]
    K = upper - upper.T
    b = rng.uniform(*spec.b_range, size=n)
    lam = np.linalg.eigvalsh(S)[0]
    if lam < -PSD_TOL:
        raise ValueError(f"parameter ranges give a non-PSD own-control block (min eigenvalue {lam:.3g})")
    return NetworkGame(S + K, b, n_firms=spec.n_firms, controls_per_firm=k,
                       family=spec.family, seed=spec.seed)


def derived_seeds(seed: int, count: int) -> list[int]:
    """Independent child seeds; entry i's seed never depends on ``count``."""
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(c.generate_state(1, np.uint64)[0]) for c in children]


def gen_pool(spec: NetworkSpec, count: int, domain: ConvexDomain | None = None,
             solver_config: SolverConfig = SolverConfig(), workers: int = 1) -> VIPool:
    if count < 1:
        raise ValueError("count must be at least 1")
    domain = domain or Box.unit(spec.dim)
    seeds = derived_seeds(spec.seed, count)

    def build(s):
        F = gen_network(replace(spec, seed=s))
        report = check_monotone(F, domain, n_samples=200, tol=1e-9, seed=s % 2**32)
        if not report.monotone:
            raise AssertionError(f"generated network (seed {s}) failed the monotonicity check")
        x = extragradient_solve(F, domain, solver_config)
        return PoolEntry(F, x, vi_residual(F, domain, x))

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            entries = list(ex.map(build, seeds))
    else:
        entries = [build(s) for s in seeds]
    meta = {**spec.describe(), "count": str(count), "entry_seeds": " ".join(map(str, seeds))}
    return VIPool(entries, domain, spec.seed, solver_config.tol, meta)


def average_network(pool: VIPool) -> NetworkGame:
    maps = pool.maps
    if not maps or not all(isinstance(F, NetworkGame) for F in maps):
        raise ValueError("average_network needs a pool of network games")
    first = maps[0]
    for F in maps[1:]:
        if (F.dim, F.family, F.n_firms, F.controls_per_firm) != (first.dim, first.family, first.n_firms,
                                                               first.controls_per_firm):
            raise ValueError("pool mixes networks of different shapes or families")
    A = sum(F.A for F in maps) / len(maps)
    b = sum(F.b for F in maps) / len(maps)
    return NetworkGame(A, b, n_firms=first.n_firms, controls_per_firm=first.controls_per_firm,
                       family=first.family)
