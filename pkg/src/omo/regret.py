"""Path-integral regret, standard regret and per-round accounting.

Orientation: ``regret_n`` integrates from the comparator ``u_T`` to the play
``x_t``; ``regret_s`` is the loss difference measured from the round's
reference point. Their difference is the loop integral o -> x -> u -> o.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .domain import ConvexDomain, as_vector
from .integral import DEFAULT_RULE, LossSpec, QuadratureRule, line_integral, omo_loss
from .maps import AffineMap, AffinePSD, MeanMap, MonotoneMap, check_conservative, estimate_lipschitz

CSV_HEADER = ("t", "regret_n", "regret_s", "loss_inf", "cum_regret_n", "avg_regret_n")

AVERAGE_EQUILIBRIUM = "average-equilibrium"
CONSERVATIVE_EXACT = "conservative-exact"
HINDSIGHT = "hindsight"
U_T_MODES = (HINDSIGHT, AVERAGE_EQUILIBRIUM, CONSERVATIVE_EXACT)


def regret_new_instant(map_t: MonotoneMap, x_t, u_T, rule: QuadratureRule = DEFAULT_RULE) -> float:
    return line_integral(map_t, u_T, x_t, rule)


def regret_std_instant(spec: LossSpec, x_t, u_T, rule: QuadratureRule = DEFAULT_RULE) -> float:
    return omo_loss(spec, x_t, rule) - omo_loss(spec, u_T, rule)


def linearized_regret(map_t: MonotoneMap, x_t, u_T) -> float:
    """<F(x_t), x_t - u_T>, an upper bound on ``regret_new_instant`` for monotone maps."""
    x_t = as_vector(x_t, map_t.dim)
    return float(map_t.evaluate(x_t) @ (x_t - as_vector(u_T, map_t.dim)))


@dataclass(frozen=True)
class RoundRecord:
    t: int
    regret_n: float
    regret_s: float
    loss_inf: float
    x_t: np.ndarray
    x_star_t: np.ndarray
    linear_regret: float = math.nan
    index: int = -1


@dataclass
class RegretTrace:
    """Ordered round records with running sums kept in step with them."""

    u_T: np.ndarray
    records: list[RoundRecord] = field(default_factory=list)
    cum_regret_n: list[float] = field(default_factory=list)
    cum_regret_s: list[float] = field(default_factory=list)
    cum_loss_inf: list[float] = field(default_factory=list)
    cum_linear_regret: list[float] = field(default_factory=list)

    def __post_init__(self):
        self.u_T = as_vector(self.u_T, name="u_T")

    def __len__(self):
        return len(self.records)

    @property
    def last_t(self) -> int:
        return self.records[-1].t if self.records else 0

    def append(self, rec: RoundRecord) -> RoundRecord:
        if rec.t != self.last_t + 1:
            raise ValueError(f"round {rec.t} recorded after round {self.last_t}")

        def nxt(series, v):
            series.append((series[-1] if series else 0.0) + v)

        self.records.append(rec)
        nxt(self.cum_regret_n, rec.regret_n)
        nxt(self.cum_regret_s, rec.regret_s)
        nxt(self.cum_loss_inf, rec.loss_inf)
        nxt(self.cum_linear_regret, rec.linear_regret)
        return rec

    def record(self, t: int, map_t: MonotoneMap, spec_t: LossSpec, x_t, x_star_t,
               rule: QuadratureRule = DEFAULT_RULE, index: int = -1) -> RoundRecord:
        x_t = as_vector(x_t, map_t.dim, "x_t")
        x_star_t = as_vector(x_star_t, map_t.dim, "x_star_t")
        rec = RoundRecord(
            t=t,
            regret_n=regret_new_instant(map_t, x_t, self.u_T, rule),
            regret_s=regret_std_instant(spec_t, x_t, self.u_T, rule),
            loss_inf=line_integral(map_t, x_t, x_star_t, rule),
            x_t=x_t,
            x_star_t=x_star_t,
            linear_regret=linearized_regret(map_t, x_t, self.u_T),
            index=index,
        )
        return self.append(rec)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records])

    @property
    def t(self) -> np.ndarray:
        return self.column("t")

    def running_average(self, name: str) -> np.ndarray:
        cum = {"regret_n": self.cum_regret_n, "regret_s": self.cum_regret_s,
               "loss_inf": self.cum_loss_inf, "linear_regret": self.cum_linear_regret}[name]
        return np.asarray(cum) / np.arange(1, len(cum) + 1)

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for rec, cum in zip(self.records, self.cum_regret_n):
            w.writerow([rec.t, repr(rec.regret_n), repr(rec.regret_s), repr(rec.loss_inf),
                        repr(cum), repr(cum / rec.t)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()


def read_trace_csv(fh) -> dict[str, np.ndarray]:
    """Parse a trace CSV back into columns."""
    rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"unexpected trace header {rows[:1]}")
    data = np.array([[float(v) for v in row] for row in rows[1:]]).reshape(-1, len(CSV_HEADER))
    return {name: data[:, i] for i, name in enumerate(CSV_HEADER)}


def record_round(trace: RegretTrace, t: int, map_t: MonotoneMap, spec_t: LossSpec, x_t, x_star_t,
                 u_T=None, rule: QuadratureRule = DEFAULT_RULE) -> RegretTrace:
    if u_T is not None and not np.array_equal(as_vector(u_T), trace.u_T):
        raise ValueError("u_T differs from the trace's comparator")
    trace.record(t, map_t, spec_t, x_t, x_star_t, rule)
    return trace


def average_map(maps) -> MonotoneMap:
    maps = list(maps)
    if maps and all(isinstance(F, AffineMap) for F in maps):
        A = sum(F.A for F in maps) / len(maps)
        b = sum(F.b for F in maps) / len(maps)
        if all(isinstance(F, AffinePSD) for F in maps):
            return AffinePSD(A, b)
        return AffineMap(A, b)
    return MeanMap(maps)


def hindsight_gradient(maps, o_list) -> AffinePSD:
    """Gradient in u of the mean loss ``(1/T) sum_t int_{o_t -> u} <F_t, dx>`` for affine F_t.

    Per round it is ``sym(A) u + skew(A) o + b``; the sum is the gradient of
    a convex quadratic, so its VI solution is the exact minimiser.
    """
    maps = list(maps)
    if not all(isinstance(F, AffineMap) for F in maps):
        raise ValueError(f"{HINDSIGHT!r} needs affine maps; use {AVERAGE_EQUILIBRIUM!r}")
    S = np.zeros_like(maps[0].A)
    c = np.zeros(maps[0].dim)
    # maps repeat across rounds, so accumulate by identity
    seen: dict[int, list] = {}
    for F, o in zip(maps, o_list):
        seen.setdefault(id(F), [F, np.zeros(F.dim), 0])
        entry = seen[id(F)]
        entry[1] = entry[1] + as_vector(o, F.dim)
        entry[2] += 1
    for F, o_sum, k in seen.values():
        S += k * F.symmetric_part
        c += 0.5 * (F.A - F.A.T) @ o_sum + k * F.b
    n = len(maps)
    return AffinePSD(S / n, c / n)


def approximate_u_T(maps, o_list, domain: ConvexDomain, mode: str = AVERAGE_EQUILIBRIUM,
                    solver_config=None, tol: float = 1e-10, max_iter: int = 100_000) -> np.ndarray:
    """Best fixed strategy in hindsight, exactly or by a surrogate.

    ``hindsight`` minimises the summed losses ``sum_t int_{o_t -> u} <F_t, dx>``
    exactly for affine monotone maps, where each loss is a convex quadratic
    in u. ``average-equilibrium`` solves the VI of the averaged map.
    ``conservative-exact`` minimises the summed losses for conservative maps
    of any form (then the gradient in u of each loss is F_t(u), whatever
    o_t is).
    """
    from .equilibrium import SolverConfig, extragradient_solve

    maps = list(maps)
    o_list = list(o_list)
    if not maps:
        raise ValueError("need at least one map")
    if len(o_list) != len(maps):
        raise ValueError("need one reference point per map")
    if mode == AVERAGE_EQUILIBRIUM:
        return extragradient_solve(average_map(maps), domain, solver_config or SolverConfig())
    if mode == HINDSIGHT:
        return extragradient_solve(hindsight_gradient(maps, o_list), domain, solver_config or SolverConfig())
    if mode != CONSERVATIVE_EXACT:
        raise ValueError(f"unknown mode {mode!r}")
    for i, F in enumerate(maps):
        if not check_conservative(F, domain, n_loops=20, seed=i).conservative:
            raise ValueError(f"map {i} is not conservative; use {AVERAGE_EQUILIBRIUM!r}")
    L = sum(F.lipschitz() or estimate_lipschitz(F, domain) for F in maps)
    step = 1.0 / max(L, 1e-12)
    u = domain.project(np.zeros(domain.dim))
    for _ in range(max_iter):
        g = sum(F.evaluate(u) for F in maps)
        u_new = domain.project(u - step * g)
        done = np.linalg.norm(u_new - u) <= tol * step
        u = u_new
        if done:
            break
    return u


def growth_exponent(cum, t=None, start_fraction: float = 0.5) -> float:
    """Log-log slope of cumulative regret over the tail of a run.

    Returns ``-inf`` when the cumulative regret is nonpositive at the end of
    the run (nothing is growing) and fits only the positive tail otherwise.
    """
    cum = np.asarray(cum, dtype=float)
    t = np.arange(1, len(cum) + 1) if t is None else np.asarray(t, dtype=float)
    tail = slice(int(len(cum) * start_fraction), len(cum))
    c, tt = cum[tail], t[tail]
    if len(c) < 2 or c[-1] <= 0:
        return -math.inf
    keep = c > 0
    return float(np.polyfit(np.log(tt[keep]), np.log(c[keep]), 1)[0])
