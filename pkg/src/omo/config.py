"""Experiment configuration: INI-style ``key = value`` lines under section headers."""
from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from .domain import Ball, Box, ConvexDomain, Simplex
from .equilibrium import SolverConfig
from .integral import QuadratureRule
from .learners import OMOD, OMOMD, Regularizer
from .networks import FAMILIES, NetworkSpec
from .regret import U_T_MODES


class ConfigError(ValueError):
    pass


# section -> key -> field name on ExperimentConfig
SCHEMA = {
    "experiment": {"seed": "seed", "T": "T", "out": "out", "comparator": "comparator"},
    "network": {"family": "family", "n_firms": "n_firms", "controls_per_firm": "controls_per_firm",
                "pool_size": "pool_size", "delta": "delta", "d_range": "d_range",
                "k_range": "k_range", "b_range": "b_range"},
    "domain": {"domain": "domain", "lower": "lower", "upper": "upper", "center": "center",
               "radius": "radius"},
    "learner": {"algo": "algo", "eta": "eta", "regularizer": "regularizer"},
    "quadrature": {"rule": "quad_rule", "nodes": "quad_nodes"},
    "solver": {"tol": "solver_tol", "gamma": "solver_gamma", "max_iter": "solver_max_iter"},
}


@dataclass
class ExperimentConfig:
    family: str = "mln"
    n_firms: int | None = None
    controls_per_firm: int | None = None
    pool_size: int = 10
    delta: float = 0.05
    d_range: tuple[float, float] = (-1.0, 1.0)
    k_range: tuple[float, float] = (-0.5, 0.5)
    b_range: tuple[float, float] = (-1.0, 1.0)
    domain: str = "box"
    lower: str = "0"
    upper: str = "1"
    center: str = "0"
    radius: float = 1.0
    T: int = 1000
    algo: str = OMOMD
    eta: str = "auto"
    regularizer: str = "euclidean"
    quad_rule: str = "gauss-legendre"
    quad_nodes: int = 16
    solver_tol: float = 1e-8
    solver_gamma: str = "auto"
    solver_max_iter: int = 1_000_000
    comparator: str = "hindsight"
    seed: int = 0
    out: str = "out"

    def __post_init__(self):
        self.validate()

    # -- validation -----------------------------------------------------
    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {sorted(FAMILIES)}, got {self.family!r}")
        defaults = FAMILIES[self.family]
        if self.n_firms is None:
            self.n_firms = defaults["n_firms"]
        if self.controls_per_firm is None:
            self.controls_per_firm = defaults["controls_per_firm"]
        if self.T < 1:
            raise ConfigError(f"T must be at least 1, got {self.T}")
        if self.pool_size < 1:
            raise ConfigError("pool_size must be at least 1")
        if self.algo not in (OMOD, OMOMD):
            raise ConfigError(f"algo must be omod or omomd, got {self.algo!r}")
        if self.eta != "auto":
            try:
                if not float(self.eta) > 0:
                    raise ValueError
            except ValueError:
                raise ConfigError(f"eta must be 'auto' or a positive number, got {self.eta!r}") from None
        if self.solver_gamma != "auto":
            try:
                SolverConfig(gamma=float(self.solver_gamma))
            except ValueError:
                raise ConfigError(f"solver gamma must be 'auto' or positive, got {self.solver_gamma!r}") from None
        if self.comparator not in U_T_MODES:
            raise ConfigError(f"comparator must be one of {U_T_MODES}")
        try:
            Regularizer(self.regularizer, 1.0)
            QuadratureRule(self.quad_rule, self.quad_nodes)
            SolverConfig(None, self.solver_tol, self.solver_max_iter)
            self.network_spec()
            self.make_domain()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.algo == OMOD and Regularizer(self.regularizer, 1.0).kind != "euclidean":
            raise ConfigError("omod only supports the euclidean regularizer")

    # -- derived objects ------------------------------------------------
    def network_spec(self) -> NetworkSpec:
        return NetworkSpec(self.family, self.n_firms, self.controls_per_firm, self.d_range,
                           self.k_range, self.b_range, self.delta, self.seed)

    @property
    def dim(self) -> int:
        return self.n_firms * self.controls_per_firm

    def make_domain(self) -> ConvexDomain:
        n = self.dim

        def vec(text):
            v = np.array([float(x) for x in str(text).replace(",", " ").split()])
            if v.size == 1:
                return np.full(n, v[0])
            if v.size != n:
                raise ConfigError(f"expected 1 or {n} values, got {v.size}")
            return v

        if self.domain == "box":
            return Box(vec(self.lower), vec(self.upper))
        if self.domain == "ball":
            return Ball(vec(self.center), self.radius)
        if self.domain == "simplex":
            return Simplex(n)
        raise ConfigError(f"domain must be box, ball or simplex, got {self.domain!r}")

    def rule(self) -> QuadratureRule:
        return QuadratureRule(self.quad_rule, self.quad_nodes)

    def solver(self) -> SolverConfig:
        gamma = None if self.solver_gamma == "auto" else float(self.solver_gamma)
        return SolverConfig(gamma, self.solver_tol, self.solver_max_iter)

    def items(self) -> dict[str, str]:
        """Every resolved setting, defaults included, as strings."""
        return {k: str(v) for k, v in asdict(self).items()}


_TYPES = {f.name: f.type for f in fields(ExperimentConfig)}


def _convert(name: str, raw: str):
    kind = _TYPES[name]
    raw = raw.strip()
    try:
        if kind == "int" or kind == "int | None":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind.startswith("tuple"):
            lo, hi = (float(v) for v in raw.replace(",", " ").split())
            return lo, hi
    except ValueError:
        raise ConfigError(f"cannot parse {name} = {raw!r} as {kind}") from None
    return raw


def parse_config(text: str, overrides: dict | None = None) -> ExperimentConfig:
    cp = configparser.ConfigParser(interpolation=None, default_section="__none__", inline_comment_prefixes=(";",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    values = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            name = SCHEMA[section][key]
            values[name] = _convert(name, raw)
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return ExperimentConfig(**values)


def load_config(path: str | Path | None, overrides: dict | None = None) -> ExperimentConfig:
    text = "" if path is None else Path(path).read_text()
    return parse_config(text, overrides)
