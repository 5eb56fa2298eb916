"""Empirical regret of OMoD and OMoMD against the B L sqrt(2T) bound.

Maps are affine monotone with ||F(x)|| <= 1 on the unit ball; each round the
adversary serves the map with the largest worst-case linearised loss at the
current play. Regret is measured against the worst comparator in the ball.

    python scripts/regret_bound_demo.py --T 100 1000 10000
"""
from __future__ import annotations

import argparse

import numpy as np

from omo.domain import Ball
from omo.learners import (EUCLIDEAN, OMOD, OMOMD, LearnerConfig, Regularizer, default_eta, ogd_theoretical_bound,
                          regret_bound_thm2)
from omo.maps import AffinePSD


def make_maps(rng: np.random.Generator, dim: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    As, bs = [], []
    for _ in range(count):
        M = rng.normal(size=(dim, dim))
        K = rng.normal(size=(dim, dim))
        F = AffinePSD(M.T @ M / dim + 0.5 * (K - K.T), rng.normal(size=dim))
        scale = np.linalg.norm(F.A, 2) + np.linalg.norm(F.b)
        As.append(F.A / scale)
        bs.append(F.b / scale)
    return np.array(As), np.array(bs)


def play(algo: str, As: np.ndarray, bs: np.ndarray, T: int) -> tuple[float, float]:
    dom = Ball.origin(As.shape[1], 1.0)
    eta = default_eta(1.0, 1.0, T)
    learner = LearnerConfig(algo, eta)
    state = learner.init(dom)
    xs, zs = [], []
    for _ in range(T):
        x = state.primal
        Z = As @ x + bs
        z = Z[np.argmax(Z @ x + np.linalg.norm(Z, axis=1))]
        xs.append(x)
        zs.append(z)
        state = learner.step(state, z, dom)
    xs, zs = np.array(xs), np.array(zs)
    G = zs.sum(0)
    u = -G / np.linalg.norm(G)
    regret = float(np.einsum("ij,ij->", zs, xs - u))
    thm2 = regret_bound_thm2(Regularizer(EUCLIDEAN, eta), u, np.linalg.norm(zs, axis=1), dom)
    return regret, thm2


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--T", type=int, nargs="+", default=[100, 1000, 10000])
    ap.add_argument("--dim", type=int, default=3)
    ap.add_argument("--maps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    As, bs = make_maps(np.random.default_rng(args.seed), args.dim, args.maps)
    print(f"{'T':>6}  {'algo':>6}  {'regret':>9}  {'R bound':>10}  {'BL sqrt(2T)':>11}")
    for T in args.T:
        for algo in (OMOD, OMOMD):
            regret, thm2 = play(algo, As, bs, T)
            print(f"{T:>6}  {algo:>6}  {regret:9.3f}  {thm2:10.3f}  {ogd_theoretical_bound(1, 1, T):11.3f}")


if __name__ == "__main__":
    main()
