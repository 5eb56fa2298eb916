"""Online monotone optimization: path-integral losses over monotone maps and
no-regret learners for them."""
from .domain import Ball, Box, ConvexDomain, Simplex, contains, diameter, project
from .equilibrium import (NonConvergenceError, SolverConfig, VIPool, extragradient_solve, ome_adversary,
                          run_ome, vi_residual)
from .integral import (LossSpec, QuadratureRule, affine_loss_closed_form, curl_discrepancy_bound, line_integral,
                       omo_loss, quadrature_error, sandwich_bounds, triangle_loop)
from .learners import LearnerConfig, Regularizer, default_eta, link, ogd_theoretical_bound, regret_bound_thm2
from .maps import (AffineMap, AffinePSD, MonotoneMap, NetworkGame, QuadraticGradient, Rotation2D, SaddleGame,
                   check_conservative, check_monotone)
from .networks import NetworkSpec, gen_network, gen_pool
from .regret import RegretTrace, approximate_u_T, regret_new_instant, regret_std_instant

__all__ = [
    "Ball", "Box", "ConvexDomain", "Simplex", "contains", "diameter", "project",
    "NonConvergenceError", "SolverConfig", "VIPool", "extragradient_solve", "ome_adversary", "run_ome",
    "vi_residual",
    "LossSpec", "QuadratureRule", "affine_loss_closed_form", "curl_discrepancy_bound", "line_integral",
    "omo_loss", "quadrature_error", "sandwich_bounds", "triangle_loop",
    "LearnerConfig", "Regularizer", "default_eta", "link", "ogd_theoretical_bound", "regret_bound_thm2",
    "AffineMap", "AffinePSD", "MonotoneMap", "NetworkGame", "QuadraticGradient", "Rotation2D", "SaddleGame",
    "check_conservative", "check_monotone",
    "NetworkSpec", "gen_network", "gen_pool",
    "RegretTrace", "approximate_u_T", "regret_new_instant", "regret_std_instant",
]
