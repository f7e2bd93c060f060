"""Behaviour of m_p(x) as the shape x -> 0.

Writing ``m_p(x) = exp(log(p)/x) u_p(x)``, the factor u_p is smooth at 0
with p-independent derivatives there. The first three are

    u(0)   = exp(-gamma)
    u'(0)  = exp(-gamma) s_1
    u''(0) = exp(-gamma) (s_2 + s_1^2 + 2 gamma s_1)

with ``s_q = int_0^{e^-gamma} g(s) log(s)^q ds + int_{e^-gamma}^inf h(s) log(s)^q ds``,
``g(s) = (e^{-s} - 1)/s`` and ``h(s) = e^{-s}/s``. The log power is q: with
it, s_1 = pi^2/12 and s_2 = -gamma pi^2/6 - 2 zeta(3)/3, and u'(0) agrees
with the numerically inverted quantile.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from functools import lru_cache
from math import comb
import math

from .exactalg import RatPoly
from .oracle import ToleranceNotMet, adaptive_quad

MAX_ORDER = 2


class NonPositiveArgument(ValueError):
    """The truncated Taylor polynomial of u_p is <= 0 at the requested x."""


class UnsupportedIndex(ValueError):
    pass


@lru_cache(maxsize=None)
def euler_gamma(digits: int = 40) -> Decimal:
    """Euler-Mascheroni constant by the Brent-McMillan series.

    gamma = U/V - log n with U = sum A_k, V = sum B_k,
    B_k = (n^k/k!)^2, A_k = B_k H_k; the error is about pi exp(-4n).
    """
    n = digits + 10
    with localcontext() as ctx:
        ctx.prec = digits + 15
        n_dec = Decimal(n)
        n2 = n_dec * n_dec
        A = -n_dec.ln()
        B = Decimal(1)
        U, V = A, B
        k = 1
        eps = Decimal(10) ** -(digits + 10)
        while True:
            B = B * n2 / (k * k)
            A = (A * n2 / k + B) / k
            U += A
            V += B
            if k > n and abs(A) < eps * abs(U) and B < eps * V:
                break
            k += 1
        result = U / V
    with localcontext() as ctx:
        ctx.prec = digits
        return +result


GAMMA = float(euler_gamma())
U0 = math.exp(-GAMMA)


@dataclass(frozen=True)
class SmallXCoeffs:
    gamma: float
    u0: float
    s1: float
    s2: float
    u1: float
    u2: float
    quadrature_error_estimates: dict = field(default_factory=dict, compare=False)

    def taylor(self, order: int = MAX_ORDER) -> list[float]:
        """u(0), u'(0), u''(0)/2 up to ``order``."""
        return [self.u0, self.u1, self.u2 / 2][: order + 1]


def _tail_first(T, q):
    # int_T^inf t^q e^{-t} dt <= 2 T^q e^{-T} for T >= 2q
    return 2.0 * T**q * math.exp(-T)


def _tail_second(T, q):
    return 2.0 * math.exp(-T) * math.log(T) ** q / T


def compute_s_parts(q: int, tol: float = 1e-12) -> tuple[float, float, dict]:
    """Both halves of s_q plus an error budget breakdown."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if not tol > 0:
        raise ValueError("tol must be positive")
    sign = -1.0 if q % 2 else 1.0

    # s = e^{-t} turns the log singularity at 0 into a smooth decaying integrand
    def first(t):
        return math.expm1(-math.exp(-t)) * sign * t**q

    T1 = max(2.0 * q, 10.0)
    while T1**q * math.exp(-T1) >= tol / 10:
        T1 += 1.0
    tail1 = _tail_first(T1, q)

    def second(s):
        return math.exp(-s) * math.log(s) ** q / s

    T2 = 10.0
    while math.exp(-T2) * abs(math.log(T2)) ** q / T2 >= tol / 10:
        T2 += 1.0
    tail2 = _tail_second(T2, q)

    v1, e1 = adaptive_quad(first, GAMMA, T1, tol / 2 - tail1)
    v2, e2 = adaptive_quad(second, U0, T2, tol / 2 - tail2)
    errors = {"first": e1 + tail1, "second": e2 + tail2,
              "first_tail": tail1, "second_tail": tail2}
    if errors["first"] + errors["second"] > tol:
        raise ToleranceNotMet(f"s_{q} error budget {errors['first'] + errors['second']:.2e} > {tol:.1e}")
    return v1, v2, errors


@lru_cache(maxsize=None)
def _compute_s(q: int, tol: float) -> tuple[float, float]:
    v1, v2, errors = compute_s_parts(q, tol)
    return v1 + v2, errors["first"] + errors["second"]


def compute_s(q: int, tol: float = 1e-12) -> float:
    return _compute_s(q, tol)[0]


@lru_cache(maxsize=None)
def u_derivatives(tol: float = 1e-12) -> SmallXCoeffs:
    s1, err1 = _compute_s(1, tol)
    s2, err2 = _compute_s(2, tol)
    return SmallXCoeffs(
        gamma=GAMMA,
        u0=U0,
        s1=s1,
        s2=s2,
        u1=U0 * s1,
        u2=U0 * (s2 + s1 * s1 + 2.0 * GAMMA * s1),
        quadrature_error_estimates={"s1": err1, "s2": err2},
    )


def eval_small_x_log(x: float, p: float, order: int = 2, coeffs: SmallXCoeffs | None = None) -> float:
    """log m_p(x) ~ log(p)/x + log(sum_{k<=order} u^(k)(0) x^k / k!)."""
    if not x > 0:
        raise ValueError("x must be positive")
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if order not in (0, 1, 2):
        raise ValueError("only orders 0, 1, 2 are available")
    c = coeffs or u_derivatives()
    poly = math.fsum(a * x**k for k, a in enumerate(c.taylor(order)))
    if poly <= 0:
        raise NonPositiveArgument(f"truncated u-polynomial is {poly:.3g} at x={x}; x too large")
    return math.log(p) / x + math.log(poly)


@lru_cache(maxsize=None)
def p_polynomial(n: int) -> RatPoly:
    """p_n(t) with d^n/dx^n e^{-1/x} = p_n(1/x) e^{-1/x}; p_0 = 1."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return RatPoly([1])
    prev = p_polynomial(n - 1) if n > 1 else RatPoly([1])
    if n == 1:
        return RatPoly.monomial(2)
    return (prev - prev.derivative()).shift(2)


def z_coefficient(n: int, k: int, p: float, coeffs: SmallXCoeffs | None = None) -> float:
    """Coefficient of x^{-k} in exp(-log(p)/x) m_p^(n)(x), for k in {2n, 2n-1, 2n-2}.

    The ``k = 2n-2`` branch reproduces the published closed form term by
    term; see :func:`z_coefficient_leibniz` for the version recomputed from
    the Leibniz sum, which differs in its ``s_1 log p`` part.
    """
    if n < 0 or k < 0 or k not in (2 * n, 2 * n - 1, 2 * n - 2):
        raise UnsupportedIndex(f"no closed form for z_({k},{n})")
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    c = coeffs or u_derivatives()
    lp = math.log(p)
    if k == 2 * n:
        return c.u0 * (-lp) ** n
    if k == 2 * n - 1:
        return c.u0 * (-lp) ** (n - 1) * (-c.s1 * lp - n * (n - 1))
    inner = (
        lp * lp / 2 * (c.s2 + c.s1 ** 2 + 2 * c.gamma * c.s1)
        + n * (n - 1) * c.s1 * lp
        + n * (n - 1) ** 2 * (n - 2) / 2
        - n**2 * (n - 1) ** 2 * (n - 2) / 2 * c.s1 * lp
    )
    return c.u0 * (-lp) ** (n - 2) * inner


def z_coefficient_leibniz(n: int, k: int, p: float, coeffs: SmallXCoeffs | None = None) -> float:
    """z_(k,n) straight from the Leibniz expansion with u-derivatives up to order 2.

    exp(-log(p)/x) m^(n)(x) = sum_i C(n,i) c^{-i} p_i(c/x) u^(n-i)(x),
    c = -log p, with u^(n-i)(x) expanded in x around 0. Raises
    UnsupportedIndex when a u-derivative beyond order 2 would be needed.
    """
    if n < 0 or k < 0 or k > 2 * n:
        raise UnsupportedIndex(f"z_({k},{n}) is not part of the expansion")
    cf = coeffs or u_derivatives()
    derivs = [cf.u0, cf.u1, cf.u2]
    c = -math.log(p)
    total = []
    for i in range(n + 1):
        poly = p_polynomial(i)
        for power, a in enumerate(poly):
            if a == 0:
                continue
            # c^{-i} a (c/x)^power * u^(n-i+j)(0) x^j / j!  with power - j = k
            j = power - k
            if j < 0:
                continue
            order = n - i + j
            if order > MAX_ORDER:
                raise UnsupportedIndex(f"z_({k},{n}) needs u^({order})(0)")
            total.append(comb(n, i) * float(a) * c ** (power - i) * derivs[order] / math.factorial(j))
    return math.fsum(total)


def m_derivative_leading(n: int, x: float, p: float) -> tuple[float, int]:
    """Leading term of m_p^(n)(x) as x -> 0, as (log magnitude, sign).

    (-log p)^n x^{-2n} exp(-gamma) exp(log(p)/x).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if not x > 0 or not 0 < p < 1:
        raise ValueError("need x > 0 and 0 < p < 1")
    lp = math.log(p)
    log_mag = n * math.log(-lp) - 2 * n * math.log(x) - GAMMA + lp / x
    return log_mag, 1
