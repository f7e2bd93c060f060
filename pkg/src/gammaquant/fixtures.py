"""Reviewed reference values used by the verification harness and tests.

Every entry says where it comes from. Polynomials are stored in the same
text form the CLI prints, in the variable ``L``.
"""
from __future__ import annotations

import math

# Euler-Mascheroni constant, first 40 digits (OEIS A001620).
EULER_GAMMA_LITERATURE = "0.5772156649015328606065120900824024310422"

# erf(1), Abramowitz & Stegun table 7.1.
ERF_ONE = 0.8427007929497149

# Apery's constant zeta(3) (OEIS A002117).
ZETA3 = 1.2020569031595942853997381615114499907650

# s_1 and s_2 in closed form. Both follow from
#   F(x) = int_0^c (e^-s - 1) s^(x-1) ds + int_c^inf e^-s s^(x-1) ds = Gamma(x) - c^x / x,
# c = e^-gamma, by differentiating q times at x = 0 with the Laurent series
#   Gamma(x) = 1/x - gamma + (gamma^2/2 + pi^2/12) x
#              - (gamma^3 + gamma pi^2/2 + 2 zeta(3))/6 x^2 + ...
_G = float(EULER_GAMMA_LITERATURE)
S1_CLOSED_FORM = math.pi**2 / 12
S2_CLOSED_FORM = -_G * math.pi**2 / 6 - 2 * ZETA3 / 3

# Large-shape coefficients as printed alongside the Maple code, t renamed to L.
TAU_PUBLISHED = {
    -2: "1",
    -1: "-L",
    0: "-1/3 + 1/3*L^2",
    1: "7/36*L - 1/36*L^3",
    2: "8/405 - 1/810*L^2 - 1/270*L^4",
    3: "433/38880*L - 8/1215*L^3 - 1/4320*L^5",
    4: "184/25515 - 923/204120*L^2 - 1/840*L^4 + 1/17010*L^6",
    5: "-289717/146966400*L - 289517/146966400*L^3 + 1451/48988800*L^5 + 139/5443200*L^7",
}

# The L^2 coefficient of tau_2 that the large-x quantile actually has:
# (m_p(x) - four leading terms) * x at x = 1e6, 50-digit arithmetic, gives
# -0.0741119 at L = 2 and -0.0184341 at L = -1.5, i.e. -7/810 rather than -1/810.
TAU2_NUMERIC = "8/405 - 7/810*L^2 - 1/270*L^4"

A_PUBLISHED = {
    1: "1/3 + 1/6*L^2",
    2: "5/36*L + 1/36*L^3",
}

# Q_1..Q_3 in the derivative variables y_j = h^(j)(0), as nested
# {s-power: [(coefficient, (exponent of y_1, y_2, y_3))]}.
Q_MULTIVARIATE = {
    1: {2: [(-1, (1, 0, 0))]},
    2: {4: [(1, (2, 0, 0))], 2: [(-1, (0, 1, 0))]},
    3: {6: [(-1, (3, 0, 0))], 4: [(3, (1, 1, 0))], 2: [(-1, (0, 0, 1))]},
}

# Exponent a in the closed form J_2(x) = x^(a - x) e^x Gamma(x, x) as printed.
J2_PUBLISHED_EXPONENT = 1.5
