"""Double-precision ground truth: incomplete gamma, quantile inversion,
the Gaussian quantile L_p and the Laplace-type integrals J_1, J_2.
"""
from __future__ import annotations

from dataclasses import dataclass
from statistics import NormalDist
import math
import warnings

from scipy import integrate

EPS = 2.220446049250313e-16
TINY = 1e-300
MAX_ITER = 100_000


class NonConvergence(RuntimeError):
    pass


class BracketFailure(RuntimeError):
    pass


class RegimeError(ValueError):
    pass


class ToleranceNotMet(RuntimeError):
    pass


@dataclass(frozen=True)
class QuantileResult:
    value: float
    residual: float
    method: str  # "linear" or "logDomain"
    iterations: int

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "residual": self.residual,
            "method": self.method,
            "iterations": self.iterations,
        }


def _check_shape(x):
    if not x > 0:
        raise ValueError(f"shape must be positive, got {x}")


def _lower_series(x: float, m: float) -> float:
    # sum_k m^k / ((x+1)...(x+k)); P = exp(x log m - m - lgamma(x+1)) * sum
    term = 1.0
    total = [1.0]
    ap = x
    for _ in range(MAX_ITER):
        ap += 1.0
        term *= m / ap
        total.append(term)
        if term < EPS * 1e-2 * total[0]:
            return math.fsum(total)
    raise NonConvergence(f"incomplete gamma series did not converge for x={x}, m={m}")


def _upper_cf(x: float, m: float) -> float:
    # modified Lentz for Gamma(x, m) e^m m^-x
    b = m + 1.0 - x
    c = 1.0 / TINY
    d = 1.0 / b
    h = d
    for i in range(1, MAX_ITER):
        an = -i * (i - x)
        b += 2.0
        d = an * d + b
        if abs(d) < TINY:
            d = TINY
        c = b + an / c
        if abs(c) < TINY:
            c = TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < EPS:
            return h
    raise NonConvergence(f"incomplete gamma continued fraction did not converge for x={x}, m={m}")


def log_reg_lower_gamma(x: float, m: float) -> float:
    """log P(x, m); stays finite when P underflows."""
    _check_shape(x)
    if m < 0:
        raise ValueError("m must be >= 0")
    if m == 0:
        return -math.inf
    if m < x + 1.0:
        return x * math.log(m) - m - math.lgamma(x + 1.0) + math.log(_lower_series(x, m))
    return math.log1p(-reg_upper_gamma(x, m))


def reg_lower_gamma(x: float, m: float) -> float:
    """Regularized lower incomplete gamma P(x, m)."""
    _check_shape(x)
    if m < 0:
        raise ValueError("m must be >= 0")
    if m == 0:
        return 0.0
    if m < x + 1.0:
        return math.exp(x * math.log(m) - m - math.lgamma(x + 1.0)) * _lower_series(x, m)
    return 1.0 - reg_upper_gamma(x, m)


def reg_upper_gamma(x: float, m: float) -> float:
    """Regularized upper incomplete gamma Q(x, m) = 1 - P(x, m)."""
    _check_shape(x)
    if m < 0:
        raise ValueError("m must be >= 0")
    if m < x + 1.0:
        return 1.0 - reg_lower_gamma(x, m)
    return math.exp(x * math.log(m) - m - math.lgamma(x)) * _upper_cf(x, m)


def log_upper_gamma(x: float, m: float) -> float:
    """log Gamma(x, m), the unregularized upper incomplete gamma."""
    _check_shape(x)
    if m >= x + 1.0:
        return x * math.log(m) - m + math.log(_upper_cf(x, m))
    return math.lgamma(x) + math.log(reg_upper_gamma(x, m))


def gamma_density(x: float, m: float) -> float:
    if m <= 0:
        return 0.0
    return math.exp(-m + (x - 1.0) * math.log(m) - math.lgamma(x))


def gaussian_quantile(p: float) -> float:
    """L_p: the root of int_0^L exp(-s^2/2) ds = (1 - 2p) sqrt(pi/2).

    Equivalently the standard normal (1 - p)-quantile. Seeded from
    ``statistics.NormalDist`` and polished by Newton on erf / erfc, using
    whichever tail keeps the target well conditioned.
    """
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if p == 0.5:
        return 0.0
    if p > 0.5:
        return -gaussian_quantile(1.0 - p) if (1.0 - p) != p else 0.0
    # p < 1/2, L > 0: solve erfc(L/sqrt2) = 2p
    Lv = NormalDist().inv_cdf(1.0 - p)
    rt2 = math.sqrt(2.0)
    for _ in range(50):
        f = math.erfc(Lv / rt2) - 2.0 * p
        fp = -math.sqrt(2.0 / math.pi) * math.exp(-Lv * Lv / 2.0)
        step = f / fp
        Lv -= step
        if abs(step) <= 4 * EPS * max(1.0, abs(Lv)):
            break
    return Lv


def _infinity_seed(x: float, p: float) -> float:
    Lv = gaussian_quantile(p)
    r = math.sqrt(x)
    return x - Lv * r + (Lv * Lv - 1.0) / 3.0 + Lv * (7.0 - Lv * Lv) / (36.0 * r)


def quantile(x: float, p: float, tol: float = 1e-13) -> QuantileResult:
    """m with |P(x, m) - p| <= tol; safeguarded Newton inside a bracket."""
    _check_shape(x)
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    if x >= 5:
        m = _infinity_seed(x, p)
    else:
        m = math.exp((math.log(p) + math.lgamma(x + 1.0)) / x)
    if not (m > 0 and math.isfinite(m)):
        m = x

    def F(t):
        return reg_lower_gamma(x, t) - p

    lo, hi = 0.0, None
    f = F(m)
    if f < 0:
        lo = m
        step = max(m, 1.0)
        for _ in range(2000):
            cand = lo + step
            fc = F(cand)
            if fc >= 0:
                hi = cand
                break
            lo = cand
            step *= 2.0
    else:
        hi = m
        for _ in range(2000):
            cand = hi / 2.0
            if cand == 0.0:
                break
            if F(cand) < 0:
                lo = cand
                break
            hi = cand
    if hi is None:
        raise BracketFailure(f"could not bracket quantile for x={x}, p={p}")

    it = 0
    best = (abs(f), m)
    while it < 500:
        it += 1
        f = F(m)
        if abs(f) < best[0]:
            best = (abs(f), m)
        if f == 0:
            break
        if f < 0:
            lo = max(lo, m)
        else:
            hi = min(hi, m)
        dens = gamma_density(x, m)
        newton = m - f / dens if dens > 0 else math.nan
        if lo < newton < hi and math.isfinite(newton):
            m_new = newton
        else:
            m_new = 0.5 * (lo + hi)
        # converged once Newton stalls at rounding level
        if abs(m_new - m) <= 4 * EPS * m or hi - lo <= 2 * EPS * hi:
            f_new = F(m_new)
            if abs(f_new) < best[0]:
                best = (abs(f_new), m_new)
            break
        m = m_new
    res, m = best
    if res <= tol:
        return QuantileResult(m, res, "linear", it)
    raise NonConvergence(f"quantile residual {res:.3e} > tol {tol:.1e} for x={x}, p={p}")


LOG_DOMAIN_MAX_SHAPE = 0.5


def _log_series(x: float, w: float) -> tuple[float, float]:
    # S(w) = sum_k (-1)^k e^{kw} / (k! (x+k)) so that lower gamma = e^{xw} S(w)
    m = math.exp(w)
    first = 1.0 / x
    terms = [first]
    term_mag = 1.0
    for k in range(1, MAX_ITER):
        term_mag *= m / k
        t = term_mag / (x + k)
        terms.append(-t if k % 2 else t)
        if t < EPS * 1e-2 * first and k > m:
            return math.fsum(terms), m
    raise NonConvergence("log-domain series did not converge")


def quantile_log(x: float, p: float, tol: float = 1e-13) -> QuantileResult:
    """log m_p(x) for small shapes, without ever forming m_p(x) itself.

    Solves ``x w + log S(w) = log p + lgamma(x)`` where
    ``S(w) = sum_k (-1)^k e^{kw}/(k! (x+k))``. Its w-derivative is
    ``e^{-m}/S(w)``, positive, so Newton is safeguarded by a bracket.
    The reported residual is ``|P(x, e^w) - p|``.
    """
    _check_shape(x)
    if x > LOG_DOMAIN_MAX_SHAPE:
        raise RegimeError(f"quantile_log is for x <= {LOG_DOMAIN_MAX_SHAPE}; use quantile")
    if not 0 < p < 1:
        raise ValueError("p must lie in (0, 1)")
    target = math.log(p) + math.lgamma(x)

    def G(w):
        S, m = _log_series(x, w)
        return x * w + math.log(S) - target, math.exp(-m) / S

    # small-m approximation: x w - log x = target
    w = (target + math.log(x)) / x
    w = min(w, 2.0)
    g, dg = G(w)
    lo, hi = (w, None) if g < 0 else (None, w)
    step = 1.0
    while lo is None or hi is None:
        cand = (hi - step) if lo is None else (lo + step)
        gc, _ = G(cand)
        if gc < 0:
            lo = cand
        else:
            hi = cand
        step *= 2.0
        if step > 1e6:
            raise BracketFailure(f"could not bracket log-quantile for x={x}, p={p}")

    it = 0
    for it in range(1, 200):
        g, dg = G(w)
        if g < 0:
            lo = max(lo, w)
        else:
            hi = min(hi, w)
        # |dP| = P |dlogP| and P ~ p near the root
        if p * abs(g) <= tol * 0.5:
            break
        w_new = w - g / dg
        if not (lo < w_new < hi):
            w_new = 0.5 * (lo + hi)
        if w_new == w or hi - lo <= 2 * EPS * max(1.0, abs(w)):
            w = w_new
            break
        w = w_new
    g, _ = G(w)
    residual = abs(math.expm1(g)) * p
    if residual > tol:
        raise NonConvergence(f"log-quantile residual {residual:.3e} > tol {tol:.1e}")
    return QuantileResult(w, residual, "logDomain", it)


def _J_exponent(s: float, x: float, sign: int) -> float:
    # s^2 h(u) with u = sign*s/sqrt(x) equals x (e^u - 1 - u)
    u = sign * s / math.sqrt(x)
    return x * (math.expm1(u) - u)


def numeric_J(x: float, sign: str = "-", tol: float = 1e-12) -> float:
    """J_1 (sign '-') or J_2 (sign '+'): int_0^inf exp(-s^2 h(-+ s/sqrt(x))) ds."""
    if x < 1:
        raise ValueError("numeric_J needs x >= 1")
    sgn = {"-": -1, "+": 1}[sign]
    value, _ = _J_integral(x, sgn, math.inf, tol)
    return value


def numeric_J_partial(x: float, upper: float, tol: float = 1e-12) -> float:
    """int_0^upper exp(-s^2 h(-s/sqrt(x))) ds (upper may be negative)."""
    value, _ = _J_integral(x, -1, upper, tol)
    return value


def _J_integral(x, sgn, upper, tol):
    def f(s):
        return math.exp(-_J_exponent(s, x, sgn))

    if math.isinf(upper):
        # cut where the exponent passes -log(tol) + margin; the tail is bounded
        # by exp(-F(T)) / F'(T) since F is convex increasing
        T = 1.0
        while _J_exponent(T, x, sgn) < -math.log(tol) + 10:
            T *= 1.5
        dF = math.sqrt(x) * abs(math.expm1(sgn * T / math.sqrt(x)))
        tail = math.exp(-_J_exponent(T, x, sgn)) / dF
        lo, hi = 0.0, T
    else:
        tail = 0.0
        lo, hi = 0.0, upper
    value, err = adaptive_quad(f, lo, hi, tol)
    if tail > tol:
        raise ToleranceNotMet(f"J tail {tail:.2e} exceeds tol {tol:.1e}")
    return value, err + tail


def adaptive_quad(f, a: float, b: float, tol: float, limit: int = 500) -> tuple[float, float]:
    """Adaptive Gauss-Kronrod quadrature (QUADPACK) with a hard tolerance check.

    QUADPACK is asked for ``tol/10``. A roundoff warning is tolerated only
    if the returned error estimate still meets ``tol``; any other warning
    (subdivision limit, divergence) fails.
    """
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, err = integrate.quad(f, a, b, epsabs=tol * 0.1, epsrel=0.0, limit=limit)
    for w in caught:
        if issubclass(w.category, integrate.IntegrationWarning) and "roundoff" not in str(w.message):
            raise ToleranceNotMet(str(w.message).strip())
    if not err <= tol:
        raise ToleranceNotMet(f"quadrature error estimate {err:.2e} exceeds tol {tol:.1e}")
    return value, err
