"""Exact rational polynomials and the symbolic algebra Q[L]{1, E, Phi, G}.

``E = exp(-L^2/2)``, ``Phi = int_0^L exp(-s^2/2) ds`` and ``G = sqrt(pi/2)``.
The span of these four over Q[L] is closed under d/dL, which is all the
large-shape coefficient derivation needs.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
import re


class NonVanishingResidual(ArithmeticError):
    """A SymExpr expected to be a pure multiple of E had other components."""


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"cannot use {type(c).__name__} as an exact coefficient")


class RatPoly:
    """Immutable univariate polynomial with ``Fraction`` coefficients.

    ``coeffs[i]`` is the coefficient of ``var**i``. Trailing zeros are
    stripped so the zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [_as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("RatPoly is immutable")

    @classmethod
    def constant(cls, c) -> RatPoly:
        return cls([c])

    @classmethod
    def monomial(cls, power: int, c=1) -> RatPoly:
        return cls([0] * power + [c])

    @property
    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __getitem__(self, i: int) -> Fraction:
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return Fraction(0)

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, RatPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == RatPoly([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return bool(self.coeffs)

    @staticmethod
    def _coerce(other) -> RatPoly:
        if isinstance(other, RatPoly):
            return other
        return RatPoly([_as_fraction(other)])

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return RatPoly(self[i] + other[i] for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return RatPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, RatPoly):
            c = _as_fraction(other)
            return RatPoly(c * a for a in self.coeffs)
        if not self.coeffs or not other.coeffs:
            return RatPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RatPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, c):
        c = _as_fraction(c)
        return RatPoly(a / c for a in self.coeffs)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative power")
        result = RatPoly([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def shift(self, k: int) -> RatPoly:
        """Multiply by ``var**k``."""
        if not self.coeffs:
            return self
        return RatPoly([0] * k + list(self.coeffs))

    def derivative(self) -> RatPoly:
        return RatPoly(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def __call__(self, t):
        """Horner evaluation; exact for rationals, floating for floats."""
        if isinstance(t, (int, Fraction)):
            acc = Fraction(0)
        else:
            acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * t + (c if isinstance(acc, Fraction) else float(c))
        return acc

    def parity(self) -> int | None:
        """``0`` if even, ``1`` if odd, ``None`` if mixed (zero counts as even)."""
        powers = {i % 2 for i, c in enumerate(self.coeffs) if c != 0}
        if not powers:
            return 0
        if len(powers) == 1:
            return powers.pop()
        return None

    def reflect(self) -> RatPoly:
        """``P(-var)``."""
        return RatPoly(c if i % 2 == 0 else -c for i, c in enumerate(self.coeffs))

    def to_string(self, var: str = "L") -> str:
        """Serialize as ``c0 + c1*L + c2*L^2 + ...``, skipping zero terms."""
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mag = abs(c)
            num = str(mag.numerator) if mag.denominator == 1 else f"{mag.numerator}/{mag.denominator}"
            if i == 0:
                body = num
            else:
                mono = var if i == 1 else f"{var}^{i}"
                body = f"{num}*{mono}"
            terms.append(("-" if c < 0 else "+", body))
        if not terms:
            return "0"
        sign, body = terms[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    @classmethod
    def parse(cls, text: str, var: str = "L") -> RatPoly:
        """Inverse of :meth:`to_string`."""
        s = text.replace(" ", "")
        if s in ("", "0"):
            return cls()
        if s[0] not in "+-":
            s = "+" + s
        v = re.escape(var)
        term_re = re.compile(rf"([+-])(?:(\d+(?:/\d+)?)(\*{v}(?:\^(\d+))?)?|{v}(?:\^(\d+))?)")
        out: dict[int, Fraction] = {}
        pos = 0
        while pos < len(s):
            m = term_re.match(s, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse polynomial near {s[pos:]!r}")
            sign, num, var_part, power, bare_power = m.groups()
            if num is None:
                c, k = Fraction(1), int(bare_power) if bare_power else 1
            else:
                c = Fraction(num)
                k = (int(power) if power else 1) if var_part else 0
            c = -c if sign == "-" else c
            out[k] = out.get(k, Fraction(0)) + c
            pos = m.end()
        n = max(out) + 1
        return cls(out.get(i, 0) for i in range(n))

    def __repr__(self):
        return f"RatPoly({self.to_string()!r})"

    __str__ = to_string


ZERO = RatPoly()
ONE = RatPoly([1])
L = RatPoly([0, 1])


def _poly(c) -> RatPoly:
    return c if isinstance(c, RatPoly) else RatPoly([_as_fraction(c)])


@dataclass(frozen=True)
class SymExpr:
    """``plain + e*E + phi*Phi + g*G`` with every component in Q[L]."""

    plain: RatPoly = ZERO
    e: RatPoly = ZERO
    phi: RatPoly = ZERO
    g: RatPoly = ZERO

    def __post_init__(self):
        for name in ("plain", "e", "phi", "g"):
            object.__setattr__(self, name, _poly(getattr(self, name)))

    def _parts(self):
        return (self.plain, self.e, self.phi, self.g)

    def __add__(self, other: SymExpr) -> SymExpr:
        return SymExpr(*(a + b for a, b in zip(self._parts(), other._parts())))

    def __neg__(self) -> SymExpr:
        return SymExpr(*(-a for a in self._parts()))

    def __sub__(self, other: SymExpr) -> SymExpr:
        return self + (-other)

    def scale(self, c) -> SymExpr:
        """Multiply every component by a polynomial or rational ``c``."""
        c = _poly(c)
        return SymExpr(*(a * c for a in self._parts()))

    def __mul__(self, c) -> SymExpr:
        if isinstance(c, SymExpr):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __truediv__(self, c) -> SymExpr:
        return SymExpr(*(a / c for a in self._parts()))

    def diff(self) -> SymExpr:
        """d/dL using E' = -L E, Phi' = E, G' = 0."""
        e_part = self.e.derivative() - L * self.e + self.phi
        return SymExpr(
            plain=self.plain.derivative(),
            e=e_part,
            phi=self.phi.derivative(),
            g=self.g.derivative(),
        )

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self._parts())

    def div_by_E(self) -> RatPoly:
        """Return the E-coefficient, insisting every other part vanishes."""
        if not (self.plain.is_zero() and self.phi.is_zero() and self.g.is_zero()):
            raise NonVanishingResidual(
                "expected a pure multiple of E, got residual "
                f"plain={self.plain}, Phi={self.phi}, G={self.g}"
            )
        return self.e

    def evaluate(self, L_value: float) -> float:
        """Numeric value at a real ``L``."""
        import math

        E = math.exp(-L_value * L_value / 2)
        Phi = math.sqrt(math.pi / 2) * math.erf(L_value / math.sqrt(2))
        G = math.sqrt(math.pi / 2)
        return (
            self.plain(L_value)
            + self.e(L_value) * E
            + self.phi(L_value) * Phi
            + self.g(L_value) * G
        )

    def __repr__(self):
        parts = []
        for label, p in zip(("", "E", "Phi", "G"), self._parts()):
            if p.is_zero():
                continue
            parts.append(f"({p})" + (f"*{label}" if label else ""))
        return "SymExpr(" + (" + ".join(parts) or "0") + ")"


SYM_ZERO = SymExpr()
SYM_ONE = SymExpr(plain=ONE)
SYM_E = SymExpr(e=ONE)
SYM_PHI = SymExpr(phi=ONE)
SYM_G = SymExpr(g=ONE)


def sym_add(a: SymExpr, b: SymExpr) -> SymExpr:
    return a + b


def sym_scale(a: SymExpr, c) -> SymExpr:
    return a.scale(c)


def sym_diff(a: SymExpr) -> SymExpr:
    return a.diff()


def sym_div_by_E(a: SymExpr) -> RatPoly:
    return a.div_by_E()
