"""The polynomials Q_n(s) and the derivatives of q_k(s) = s^k Q_k(s) e^{-s^2/2}.

Q_n is defined by ``d^n/dv^n exp(-s^2 h(v)) = Q_n(s, h'(v), ...) exp(-s^2 h(v))``
with ``h(v) = (e^v - 1 - v)/v^2``. Only its value at ``v = 0`` is ever needed,
so instead of carrying the y-variables symbolically we carry truncated Taylor
jets of ``h`` in ``v`` and evaluate at the end.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import factorial

from .exactalg import RatPoly, SymExpr


class Jet:
    """Truncated power series ``sum c_k v^k`` for ``k <= order``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = tuple(Fraction(c) for c in coeffs)
        if not self.coeffs:
            raise ValueError("a jet needs at least one coefficient")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, c, order: int) -> Jet:
        return cls([c] + [0] * order)

    def __add__(self, other: Jet) -> Jet:
        n = min(len(self.coeffs), len(other.coeffs))
        return Jet(a + b for a, b in zip(self.coeffs[:n], other.coeffs[:n]))

    def __sub__(self, other: Jet) -> Jet:
        n = min(len(self.coeffs), len(other.coeffs))
        return Jet(a - b for a, b in zip(self.coeffs[:n], other.coeffs[:n]))

    def __mul__(self, other):
        if not isinstance(other, Jet):
            return Jet(a * other for a in self.coeffs)
        n = min(len(self.coeffs), len(other.coeffs))
        out = [Fraction(0)] * n
        for i in range(n):
            a = self.coeffs[i]
            if a == 0:
                continue
            for j in range(n - i):
                out[i + j] += a * other.coeffs[j]
        return Jet(out)

    __rmul__ = __mul__

    def derivative(self) -> Jet:
        """d/dv; the result is one order shorter."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        return Jet(k * c for k, c in enumerate(self.coeffs) if k > 0)

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __eq__(self, other):
        return isinstance(other, Jet) and self.coeffs == other.coeffs

    def __repr__(self):
        return f"Jet({[str(c) for c in self.coeffs]})"


def h_jet(order: int) -> Jet:
    """Taylor jet of h at 0: the coefficient of v^k is 1/(k+2)!."""
    if order < 0:
        raise ValueError("order must be >= 0")
    return Jet(Fraction(1, factorial(k + 2)) for k in range(order + 1))


# A polynomial in s with jet coefficients, stored as {power: Jet}.
SJetPoly = dict


def _step(T: SJetPoly, dh: Jet) -> SJetPoly:
    # T <- dT/dv - s^2 h'(v) T
    out: SJetPoly = {}
    for power, jet in T.items():
        d = jet.derivative()
        out[power] = out[power] + d if power in out else d
        prod = dh * jet
        tgt = power + 2
        out[tgt] = out[tgt] - prod if tgt in out else prod * -1
    order = min(j.order for j in out.values())
    return {
        k: Jet(j.coeffs[: order + 1])
        for k, j in out.items()
        if not j.is_zero()
    } or {0: Jet.constant(0, order)}


@lru_cache(maxsize=None)
def gen_Q(n: int) -> RatPoly:
    """Q_n(s) at v = 0, as an even polynomial in s of degree 2n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    # Jets start at order n + 1 so that n differentiations leave order >= 1.
    order = n + 1
    dh = h_jet(order + 1).derivative()
    T: SJetPoly = {0: Jet.constant(1, order)}
    for _ in range(n):
        T = _step(T, dh)
    deg = max(T)
    return RatPoly(T[k][0] if k in T else 0 for k in range(deg + 1))


@lru_cache(maxsize=None)
def q_derivative(k: int, j: int) -> SymExpr:
    """j-th derivative in L of ``L^k Q_k(L) exp(-L^2/2)``, as ``P(L) E``."""
    if k < 0 or j < 0:
        raise ValueError("k and j must be >= 0")
    if j == 0:
        return SymExpr(e=gen_Q(k).shift(k))
    P = q_derivative(k, j - 1).e
    return SymExpr(e=P.derivative() - P.shift(1))
