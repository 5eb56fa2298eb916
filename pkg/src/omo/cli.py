"""Command line: ``omo run | verify | gen | integrate``.

Exit codes: 0 success, 1 a check failed, 2 bad configuration or input,
3 an equilibrium solve did not converge.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import checks
from .config import ConfigError, ExperimentConfig, load_config
from .equilibrium import NonConvergenceError, play_ome, run_ome, write_pool
from .integral import QuadratureRule, line_integral, quadrature_error
from .learners import LearnerConfig, default_eta
from .maps import AffineMap, AffinePSD, MonotoneMap, QuadraticGradient, Rotation2D, SaddleGame, max_map_norm
from .networks import gen_pool
from .plot import write_svg
from .regret import AVERAGE_EQUILIBRIUM, RegretTrace, approximate_u_T, growth_exponent

EXIT_OK, EXIT_CHECK, EXIT_CONFIG, EXIT_SOLVER = 0, 1, 2, 3

log = logging.getLogger("omo")

SEED_SCHEME = ("numpy SeedSequence(seed).spawn(pool_size); pool entry i draws from child i; "
               "learner and adversary use no randomness")
ETA_RULE = "B / (L sqrt(2 T)) with B = diameter / 2 and L = max ||F(x)|| over pool and domain"
U_T_CAVEAT = {
    "hindsight": "exact minimiser of the summed path-integral losses over the realised rounds",
    AVERAGE_EQUILIBRIUM: ("equilibrium of the pool-averaged map; a surrogate that assumes uniform "
                          "sampling, which the farthest-equilibrium adversary does not do"),
    "conservative-exact": "minimiser of the summed losses, valid for conservative maps only",
}


# ---------------------------------------------------------------------------
# map specs for `integrate`


class MapSpecError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    return line, pos - (text.rfind("\n", 0, pos) + 1) + 1


MAP_FAMILIES = {
    "saddle": ((), lambda p: SaddleGame()),
    "rotation2d": ((), lambda p: Rotation2D()),
    "affine": (("A", "b"), lambda p: AffineMap(p["A"], p["b"])),
    "affine-psd": (("A", "b"), lambda p: AffinePSD(p["A"], p["b"])),
    "quadratic": (("Q", "c"), lambda p: QuadraticGradient(p["Q"], p["c"])),
}


def parse_map_spec(text: str) -> MonotoneMap:
    """``family`` or ``family:key=<json>;key=<json>``, e.g. ``affine:A=[[1,0],[0,1]];b=[0,0]``."""
    name, sep, _ = text.partition(":")
    family = name.strip().lower()
    if family not in MAP_FAMILIES:
        raise MapSpecError(f"unknown map family {name.strip()!r}; expected one of {sorted(MAP_FAMILIES)}",
                           *_line_col(text, len(name) - len(name.lstrip())))
    keys, build = MAP_FAMILIES[family]
    params: dict[str, object] = {}
    pos = len(name) + len(sep)
    # split on ';' outside brackets
    depth, start = 0, pos
    parts = []
    for i in range(pos, len(text)):
        ch = text[i]
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        elif ch == ";" and depth == 0:
            parts.append((start, text[start:i]))
            start = i + 1
    parts.append((start, text[start:]))
    for offset, part in parts:
        if not part.strip():
            continue
        key, eq, value = part.partition("=")
        key_start = offset + len(key) - len(key.lstrip())
        if not eq:
            raise MapSpecError(f"expected key=value, got {part.strip()!r}", *_line_col(text, key_start))
        key = key.strip()
        if key not in keys:
            raise MapSpecError(f"unknown parameter {key!r} for {family}", *_line_col(text, key_start))
        value_start = offset + len(part) - len(value)
        try:
            params[key] = json.loads(value)
        except json.JSONDecodeError as exc:
            raise MapSpecError(exc.msg, *_line_col(text, value_start + exc.pos)) from None
    missing = [k for k in keys if k not in params]
    if missing:
        raise MapSpecError(f"missing parameter(s) {', '.join(missing)} for {family}", *_line_col(text, len(text)))
    try:
        return build(params)
    except (ValueError, TypeError) as exc:
        raise MapSpecError(str(exc), *_line_col(text, len(name) + len(sep))) from None


def parse_point(text: str, dim: int) -> np.ndarray:
    text = text.strip()
    try:
        values = json.loads(text) if text.startswith("[") else [float(v) for v in text.replace(",", " ").split()]
        x = np.asarray(values, dtype=float)
    except (ValueError, json.JSONDecodeError):
        raise ValueError(f"cannot parse point {text!r}") from None
    if x.shape != (dim,):
        raise ValueError(f"point {text!r} has {x.size} coordinates, map needs {dim}")
    return x


# ---------------------------------------------------------------------------
# subcommands


def _write_metadata(path: Path, meta: dict[str, object]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for k, v in meta.items():
            fh.write(f"{k} = {v}\n")


def _vec(v) -> str:
    return " ".join(repr(float(x)) for x in np.ravel(v))


def _describe(domain) -> str:
    return "; ".join(f"{k}={v}" for k, v in domain.describe().items())


def _load(args) -> ExperimentConfig:
    return load_config(args.config, {"seed": args.seed, "out": args.out})


def cmd_run(args) -> int:
    cfg = _load(args)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    domain = cfg.make_domain()
    rule = cfg.rule()
    solver = cfg.solver()
    meta: dict[str, object] = {"command": "run", **cfg.items(), "dim": cfg.dim,
                               "domain_resolved": _describe(domain), "seed_scheme": SEED_SCHEME}

    try:
        pool = gen_pool(cfg.network_spec(), cfg.pool_size, domain, solver)
    except NonConvergenceError as exc:
        with open(out / "trace.csv", "w", encoding="utf-8") as fh:
            RegretTrace(np.zeros(cfg.dim)).write_csv(fh)
        _write_metadata(out / "metadata.txt", {**meta, "status": f"pool solve failed: {exc}"})
        log.error("%s", exc)
        return EXIT_SOLVER
    with open(out / "pool.txt", "w", encoding="utf-8") as fh:
        write_pool(pool, fh)
    residuals = pool.verify()

    B = domain.diameter() / 2
    L = max(max_map_norm(F, domain) for F in pool.maps)
    eta = default_eta(B, L, cfg.T) if cfg.eta == "auto" else float(cfg.eta)
    learner = LearnerConfig(cfg.algo, eta, cfg.regularizer)

    status, code = "ok", EXIT_OK
    indices, _ = play_ome(pool, learner, cfg.T)
    try:
        maps = [pool.entries[i].map for i in indices]
        o_list = [pool.entries[i].x_star for i in indices]
        if cfg.comparator == AVERAGE_EQUILIBRIUM:
            maps, o_list = pool.maps, pool.equilibria
        u_T = approximate_u_T(maps, o_list, domain, cfg.comparator, solver)
    except NonConvergenceError as exc:
        u_T = exc.best
        status, code = f"comparator solve did not converge; trace uses best iterate ({exc})", EXIT_SOLVER
    trace = run_ome(pool, learner, cfg.T, rule, u_T=u_T)
    with open(out / "trace.csv", "w", encoding="utf-8") as fh:
        trace.write_csv(fh)

    avg = trace.running_average("regret_n")
    eps_q = max(quadrature_error(pool.entries[r.index].map, trace.u_T, r.x_t, rule) for r in trace.records)
    meta.update({
        "status": status,
        "entry_seeds": pool.meta["entry_seeds"],
        "pool_residual_max": repr(max(residuals)),
        "pool_residuals": _vec(residuals),
        "B": repr(B),
        "L": repr(L),
        "eta_resolved": repr(eta),
        "eta_rule": ETA_RULE if cfg.eta == "auto" else "given in config",
        "u_T": _vec(u_T),
        "u_T_caveat": U_T_CAVEAT[cfg.comparator],
        "eps_q": repr(eps_q),
        "adversary": "farthest equilibrium (Euclidean), ties to lowest index",
        "final_avg_regret_n": repr(float(avg[-1])),
        "final_avg_regret_s": repr(float(trace.running_average("regret_s")[-1])),
        "final_avg_loss_inf": repr(float(trace.running_average("loss_inf")[-1])),
        "avg_regret_n_ratio_T_over_10": repr(float(avg[-1] / avg[min(9, len(avg) - 1)])),
        "cum_regret_n_growth_exponent": repr(growth_exponent(trace.cum_regret_n)),
    })
    _write_metadata(out / "metadata.txt", meta)
    write_svg(out / "plot.svg", trace.t, {
        "avg regret_n": avg,
        "avg regret_s": trace.running_average("regret_s"),
        "avg loss_inf": trace.running_average("loss_inf"),
    }, title=f"{cfg.family}, {cfg.algo}, T={cfg.T}, seed={cfg.seed}", log_y=args.log_y)
    print(f"wrote {out / 'trace.csv'} ({len(trace)} rounds); final avg regret_n {avg[-1]:.6g}")
    return code


def cmd_gen(args) -> int:
    cfg = _load(args)
    out = Path(cfg.out)
    domain = cfg.make_domain()
    try:
        pool = gen_pool(cfg.network_spec(), cfg.pool_size, domain, cfg.solver())
    except NonConvergenceError as exc:
        log.error("%s", exc)
        return EXIT_SOLVER
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "pool.txt", "w", encoding="utf-8") as fh:
        write_pool(pool, fh)
    residuals = pool.verify()
    _write_metadata(out / "pool.meta", {"command": "gen", **cfg.items(), "dim": cfg.dim,
                                        "domain_resolved": _describe(domain), "seed_scheme": SEED_SCHEME,
                                        **pool.meta, "pool_residual_max": repr(max(residuals))})
    print(f"wrote {len(pool)} networks to {out / 'pool.txt'}")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.quad_nodes is None:
        rule = QuadratureRule(args.quad_rule)
    else:
        # deliberately unchecked so under-resolved rules can be injected
        rule = QuadratureRule.unchecked(args.quad_rule, args.quad_nodes)
    results = checks.run_checks(rule, inject_nonmonotone=args.inject_nonmonotone)
    print(checks.format_table(results))
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return EXIT_CHECK if failed else EXIT_OK


def cmd_integrate(args) -> int:
    try:
        F = parse_map_spec(args.map)
        a, b = parse_point(args.a, F.dim), parse_point(args.b, F.dim)
        rule = QuadratureRule(args.rule, args.nodes)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"integral = {line_integral(F, a, b, rule)!r}")
    print(f"eps_q = {quadrature_error(F, a, b, rule)!r}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="omo", description="Online monotone optimization experiments")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def experiment(p):
        p.add_argument("--config", help="INI config file; omitted keys take their defaults")
        p.add_argument("--seed", type=int, help="overrides [experiment] seed")
        p.add_argument("--out", help="output directory; overrides [experiment] out")

    p = sub.add_parser("run", help="run the equilibration experiment")
    experiment(p)
    p.add_argument("--log-y", action="store_true", help="log-scale |y| in plot.svg")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("gen", help="generate and solve a network pool")
    experiment(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="run the closed-form fact table")
    p.add_argument("--quad-rule", default="gauss-legendre")
    p.add_argument("--quad-nodes", type=int, help="test mode: force the node count (no lower limit)")
    p.add_argument("--inject-nonmonotone", action="store_true",
                   help="test mode: add a map with a negative eigenvalue to the monotonicity check")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("integrate", help="integrate a built-in map along a segment")
    p.add_argument("map", help="saddle | rotation2d | affine:A=..;b=.. | affine-psd:A=..;b=.. | quadratic:Q=..;c=..")
    p.add_argument("--a", required=True, help="start point, e.g. '1,1' or '[1, 1]'")
    p.add_argument("--b", required=True, help="end point")
    p.add_argument("--rule", default="gauss-legendre")
    p.add_argument("--nodes", type=int, default=16)
    p.set_defaults(func=cmd_integrate)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
