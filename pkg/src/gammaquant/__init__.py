"""Gamma-distribution quantiles: numeric inversion and asymptotic expansions
at small and large shape, with exactly derived large-shape coefficients."""

from .exactalg import NonVanishingResidual, RatPoly, SymExpr
from .infinity_expansion import (
    ExpansionTable,
    build_table,
    compose_tau,
    eval_expansion,
    phi_coefficients,
)
from .oracle import (
    QuantileResult,
    gaussian_quantile,
    quantile,
    quantile_log,
    reg_lower_gamma,
    reg_upper_gamma,
)
from .zero_expansion import SmallXCoeffs, eval_small_x_log, u_derivatives

__all__ = [
    "ExpansionTable",
    "NonVanishingResidual",
    "QuantileResult",
    "RatPoly",
    "SmallXCoeffs",
    "SymExpr",
    "build_table",
    "compose_tau",
    "eval_expansion",
    "eval_small_x_log",
    "gaussian_quantile",
    "phi_coefficients",
    "quantile",
    "quantile_log",
    "reg_lower_gamma",
    "reg_upper_gamma",
    "u_derivatives",
]
