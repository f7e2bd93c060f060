from fractions import Fraction
from math import factorial

import pytest

from gammaquant.exactalg import RatPoly, SymExpr
from gammaquant.qpolys import Jet, gen_Q, h_jet, q_derivative

F = Fraction
Y = {j: F(1, (j + 1) * (j + 2)) for j in range(1, 5)}


def test_h_jet():
    assert h_jet(0).coeffs == (F(1, 2),)
    assert h_jet(2).coeffs == (F(1, 2), F(1, 6), F(1, 24))
    assert h_jet(4)[3] == F(1, 120)


def test_h_derivatives_at_zero():
    # h^(j)(0) = j! / (j+2)! = 1/((j+1)(j+2))
    jet = h_jet(6)
    for j in range(1, 5):
        assert jet[j] * factorial(j) == Y[j]


def test_jet_truncation():
    a = Jet([1, 2, 3])
    b = Jet([1, 1])
    assert (a * b).coeffs == (1, 3)
    assert a.derivative().coeffs == (2, 6)


def test_Q_small_cases():
    assert gen_Q(0) == RatPoly([1])
    assert gen_Q(1) == RatPoly([0, 0, F(-1, 6)])
    assert gen_Q(2) == RatPoly([0, 0, F(-1, 12), 0, F(1, 36)])


def test_Q3_matches_multivariate_form():
    y1, y2, y3 = Y[1], Y[2], Y[3]
    want = RatPoly([0, 0, -y3, 0, 3 * y1 * y2, 0, -(y1**3)])
    assert gen_Q(3) == want


@pytest.mark.parametrize("n", range(13))
def test_Q_even_of_degree_2n(n):
    Q = gen_Q(n)
    assert all(c == 0 for i, c in enumerate(Q) if i % 2)
    assert Q.degree == 2 * n


def test_Q_from_explicit_differentiation():
    # independent route: exp(-s^2 h(v)) expanded in v with sympy-free series
    # arithmetic; coefficient of v^n times n! is Q_n(s) at v = 0.
    order = 5
    hs = [F(1, factorial(k + 2)) for k in range(order + 1)]
    # series in v whose coefficients are RatPolys in s: -s^2 (h(v) - h(0))
    f = [RatPoly()] + [RatPoly([0, 0, -hs[k]]) for k in range(1, order + 1)]
    # exp of f via k E_k = sum i f_i E_{k-i}
    E = [RatPoly([1])]
    for k in range(1, order + 1):
        acc = RatPoly()
        for i in range(1, k + 1):
            acc = acc + f[i] * E[k - i] * i
        E.append(acc / k)
    for n in range(order + 1):
        assert gen_Q(n) == E[n] * factorial(n)


def test_q_derivative_examples():
    assert q_derivative(0, 0) == SymExpr(e=RatPoly([1]))
    assert q_derivative(0, 1) == SymExpr(e=RatPoly([0, -1]))
    assert q_derivative(1, 0) == SymExpr(e=RatPoly([0, 0, 0, F(-1, 6)]))


@pytest.mark.parametrize("k, j", [(k, j) for k in range(5) for j in range(5)])
def test_q_derivative_is_pure_E(k, j):
    q = q_derivative(k, j)
    assert q.plain.is_zero() and q.phi.is_zero() and q.g.is_zero()
