"""Exact coefficients of the large-shape expansions.

With ``y = x**-1/2`` and ``L = L_p`` the Gaussian quantile,

    sqrt(x) * log(x / m_p(x)) - L  ~  sum_{k>=1} a_k(L) y^k
    m_p(x)                          ~  sum_{n>=-2} tau_n(L) y^n

where ``a_k`` and ``tau_n`` are polynomials in ``L`` with rational
coefficients. Both are derived here in exact arithmetic.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
import math

from .exactalg import ONE, ZERO, RatPoly, SymExpr, L as L_POLY
from .qpolys import gen_Q, q_derivative

DEFAULT_ORDER = 7


class ParityContractViolation(ArithmeticError):
    """c_k was not a pure rational (odd k) or a pure multiple of G (even k)."""


class TableOrderExceeded(ValueError):
    pass


def _double_factorial(n: int) -> int:
    # (-1)!! = 0!! = 1
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def gauss_moment_full(j: int) -> SymExpr:
    """int_0^inf s^j exp(-s^2/2) ds."""
    if j < 0:
        raise ValueError("j must be >= 0")
    val = _double_factorial(j - 1)
    if j % 2:
        return SymExpr(plain=RatPoly([val]))
    return SymExpr(g=RatPoly([val]))


@lru_cache(maxsize=None)
def gauss_moment_partial(j: int) -> SymExpr:
    """int_0^L s^j exp(-s^2/2) ds, via I_j = -L^{j-1} E + (j-1) I_{j-2}."""
    if j < 0:
        raise ValueError("j must be >= 0")
    if j == 0:
        return SymExpr(phi=ONE)
    if j == 1:
        return SymExpr(plain=ONE, e=RatPoly([-1]))
    return SymExpr(e=-RatPoly.monomial(j - 1)) + gauss_moment_partial(j - 2).scale(j - 1)


def _moment_sum(poly: RatPoly, moment) -> SymExpr:
    out = SymExpr()
    for power, c in enumerate(poly):
        if c:
            out = out + moment(power).scale(c)
    return out


@lru_cache(maxsize=None)
def compute_c(k: int) -> SymExpr:
    """c_k = int_0^inf s^k Q_k(s) exp(-s^2/2) ds."""
    return _moment_sum(gen_Q(k).shift(k), gauss_moment_full)


@lru_cache(maxsize=None)
def compute_d(k: int) -> SymExpr:
    """d_k = int_0^L s^k Q_k(s) exp(-s^2/2) ds."""
    return _moment_sum(gen_Q(k).shift(k), gauss_moment_partial)


@lru_cache(maxsize=None)
def compute_A(k: int) -> SymExpr:
    """Driving term A_k with ``(1 - 2p) G`` already replaced by ``Phi``.

    Odd k: ``(d_k - c_k)/k!``. Even k: ``(beta_k Phi - d_k)/k!`` where
    ``c_k = beta_k G``. G never survives.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    c = compute_c(k)
    d = compute_d(k)
    if k % 2:
        if not (c.e.is_zero() and c.phi.is_zero() and c.g.is_zero()) or c.plain.degree > 0:
            raise ParityContractViolation(f"c_{k} is not a pure rational: {c!r}")
        out = d - c
    else:
        if not (c.e.is_zero() and c.phi.is_zero() and c.plain.is_zero()) or c.g.degree > 0:
            raise ParityContractViolation(f"c_{k} is not a pure multiple of G: {c!r}")
        out = SymExpr(phi=c.g) - d
    return out / factorial(k)


class _PowerCache:
    """Coefficients a_{j,l} of y^l in (sum_k a_k y^k)^{j+1}."""

    def __init__(self, a: dict[int, RatPoly]):
        self.a = a
        self.cache: dict[tuple[int, int], RatPoly] = {}

    def __call__(self, j: int, l: int) -> RatPoly:
        if l < j + 1:
            return ZERO
        key = (j, l)
        if key in self.cache:
            return self.cache[key]
        if j == 0:
            val = self.a[l]
        else:
            val = ZERO
            for m in range(j, l):
                val = val + self(j - 1, m) * self.a[l - m]
        self.cache[key] = val
        return val


def _phi_table(M: int, numerators: list | None = None):
    if M < 0:
        raise ValueError("M must be >= 0")
    a: dict[int, RatPoly] = {1: (ONE + L_POLY * L_POLY / 2) / 3}
    power = _PowerCache(a)
    for N in range(1, M + 1):
        S = SymExpr()
        # triples (k, l, j): k + l = N + 1, k + j >= 1, j + 1 <= l <= N + j
        for k in range(0, N + 1):
            l = N + 1 - k
            for j in range(max(0, 1 - k), l):
                ajl = power(j, l)
                if ajl.is_zero():
                    continue
                coef = Fraction((-1) ** (k + 1), factorial(k) * factorial(j + 1))
                S = S + q_derivative(k, j).scale(ajl * coef)
        S = S + compute_A(N + 1)
        if numerators is not None:
            numerators.append(S)
        a[N + 1] = S.div_by_E()
        power.cache.clear()
    return a, power


def phi_coefficients(M: int = DEFAULT_ORDER) -> list[RatPoly]:
    """a_1 ... a_{M+1}."""
    a, _ = _phi_table(M)
    return [a[k] for k in range(1, M + 2)]


def recursion_numerators(M: int = DEFAULT_ORDER) -> list[SymExpr]:
    """The SymExpr divided by E at each step N = 1..M, for residual audits."""
    out: list[SymExpr] = []
    _phi_table(M, out)
    return out


def _series_exp(f: list[RatPoly], n: int) -> list[RatPoly]:
    # exp of a series with f[0] == 0, through y^n: k E_k = sum_{i=1}^k i f_i E_{k-i}
    out = [ONE]
    for k in range(1, n + 1):
        acc = ZERO
        for i in range(1, k + 1):
            if i < len(f) and f[i]:
                acc = acc + f[i] * out[k - i] * i
        out.append(acc / k)
    return out


def compose_tau(M: int = DEFAULT_ORDER, a: list[RatPoly] | None = None) -> list[RatPoly]:
    """tau_{-2} ... tau_M from m_p = x exp(-phi_p)."""
    if a is None:
        a = phi_coefficients(M)
    if len(a) < M + 1:
        raise ValueError(f"need a_1..a_{M + 1}, got {len(a)} coefficients")
    # -phi as a series in y: -(L y + sum_l a_l y^{l+1})
    n = M + 2
    f = [ZERO] * (n + 1)
    f[1] = -L_POLY
    for l in range(1, M + 2):
        if l + 1 <= n:
            f[l + 1] = -a[l - 1]
    return _series_exp(f, n)


@dataclass(frozen=True)
class ExpansionTable:
    order: int
    a: tuple
    tau: tuple
    power_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def tau_n(self, n: int) -> RatPoly:
        if not -2 <= n <= self.order:
            raise TableOrderExceeded(f"tau_{n} outside table of order {self.order}")
        return self.tau[n + 2]

    def a_k(self, k: int) -> RatPoly:
        if not 1 <= k <= self.order + 1:
            raise TableOrderExceeded(f"a_{k} outside table of order {self.order}")
        return self.a[k - 1]

    def eval(self, x: float, L: float, order: int | None = None) -> float:
        return eval_expansion(x, L, self.order if order is None else order, self)


@lru_cache(maxsize=8)
def build_table(M: int = DEFAULT_ORDER) -> ExpansionTable:
    a, power = _phi_table(M)
    a_list = [a[k] for k in range(1, M + 2)]
    tau = compose_tau(M, a_list)
    cache = {(0, k): a[k] for k in a}
    for j in range(1, M + 1):
        for l in range(j + 1, M + 2 + j):
            if l - j <= M + 1:
                cache[(j, l)] = power(j, l)
    return ExpansionTable(order=M, a=tuple(a_list), tau=tuple(tau), power_cache=cache)


def eval_expansion(x: float, L: float, order: int, table: ExpansionTable | None = None) -> float:
    """sum_{n=-2}^{order} tau_n(L) x^{-n/2}, in floating point."""
    if x <= 0:
        raise ValueError("x must be positive")
    if order < -2:
        raise ValueError("order must be >= -2")
    if table is None:
        table = build_table(max(DEFAULT_ORDER, order))
    if order > table.order:
        raise TableOrderExceeded(f"order {order} exceeds table order {table.order}")
    y = 1.0 / math.sqrt(x)
    terms = [table.tau[n + 2](float(L)) * y ** (n + 2) for n in range(-2, order + 1)]
    return x * math.fsum(terms)
