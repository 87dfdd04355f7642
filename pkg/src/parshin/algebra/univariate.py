"""Dense univariate polynomials over Q or Q(i) and the rational function
field built on them. Used as exact coefficients of series along a curve."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .poly import Polynomial, RationalFunction
from .scalars import is_exact_scalar, normalize

__all__ = ["UniPoly", "UniRat"]


def _strip(coeffs):
    coeffs = [normalize(c) for c in coeffs]
    while coeffs and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


class UniPoly:
    __slots__ = ("c",)

    def __init__(self, coeffs: Sequence = ()):
        self.c = _strip(coeffs)

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> UniPoly:
        if len(p.vars) != 1:
            raise ValueError(f"expected a univariate polynomial, got variables {p.vars}")
        deg = max((e[0] for e in p.terms), default=-1)
        coeffs = [Fraction(0)] * (deg + 1)
        for (e,), c in p.terms.items():
            coeffs[e] = c
        return cls(coeffs)

    @property
    def degree(self) -> int:
        return len(self.c) - 1

    def is_zero(self):
        return not self.c

    def lead(self):
        return self.c[-1]

    def __add__(self, other):
        if is_exact_scalar(other):
            other = UniPoly([other])
        if not isinstance(other, UniPoly):
            return NotImplemented
        n = max(len(self.c), len(other.c))
        a = self.c + (0,) * (n - len(self.c))
        b = other.c + (0,) * (n - len(other.c))
        return UniPoly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return UniPoly([-x for x in self.c])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if is_exact_scalar(other):
            return UniPoly([x * other for x in self.c])
        if not isinstance(other, UniPoly):
            return NotImplemented
        if not self.c or not other.c:
            return UniPoly()
        out = [0] * (len(self.c) + len(other.c) - 1)
        for i, x in enumerate(self.c):
            if x == 0:
                continue
            for j, y in enumerate(other.c):
                out[i + j] += x * y
        return UniPoly(out)

    __rmul__ = __mul__

    def __divmod__(self, other: UniPoly):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.c)
        q = [Fraction(0)] * max(len(rem) - len(other.c) + 1, 0)
        lead = other.lead()
        for k in range(len(rem) - len(other.c), -1, -1):
            coef = rem[k + len(other.c) - 1] / lead
            q[k] = coef
            if coef != 0:
                for j, y in enumerate(other.c):
                    rem[k + j] -= coef * y
        return UniPoly(q), UniPoly(rem[: len(other.c) - 1])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def monic(self) -> UniPoly:
        if not self.c:
            return self
        return UniPoly([x / self.lead() for x in self.c])

    def gcd(self, other: UniPoly) -> UniPoly:
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def __eq__(self, other):
        if is_exact_scalar(other):
            other = UniPoly([other])
        if not isinstance(other, UniPoly):
            return NotImplemented
        return self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __call__(self, x):
        acc = 0
        for coef in reversed(self.c):
            acc = acc * x + coef
        return acc

    def derivative(self) -> UniPoly:
        return UniPoly([k * x for k, x in enumerate(self.c)][1:])

    def taylor_shift(self, x0) -> UniPoly:
        """Coefficients of p(x0 + a) as a polynomial in a."""
        acc = UniPoly()
        lin = UniPoly([x0, 1])
        for coef in reversed(self.c):
            acc = acc * lin + coef
        return acc

    def valuation(self) -> int:
        for k, x in enumerate(self.c):
            if x != 0:
                return k
        return 10**9

    def __repr__(self):
        return f"UniPoly({list(self.c)})"


class UniRat:
    """Element of K(t), K = Q or Q(i); reduced with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        if not isinstance(num, UniPoly):
            num = UniPoly([num])
        if den is None:
            den = UniPoly([1])
        elif not isinstance(den, UniPoly):
            den = UniPoly([den])
        if den.is_zero():
            raise ZeroDivisionError("UniRat with zero denominator")
        if num.is_zero():
            den = UniPoly([1])
        elif den.degree == 0:
            if den.c[0] != 1:
                num, den = num * (Fraction(1) / den.c[0]), UniPoly([1])
        else:
            # common powers of t first; monomial denominators need no gcd
            k = min(num.valuation(), den.valuation())
            if k:
                num, den = UniPoly(num.c[k:]), UniPoly(den.c[k:])
            if den.degree > 0 and any(x != 0 for x in den.c[:-1]):
                g = num.gcd(den)
                if g.degree > 0:
                    num, den = num // g, den // g
            lc = den.lead()
            if lc != 1:
                num, den = num * (Fraction(1) / lc), den.monic()
        self.num = num
        self.den = den

    @classmethod
    def from_rational_function(cls, r: RationalFunction | Polynomial) -> UniRat:
        r = RationalFunction.lift(r)
        return cls(UniPoly.from_polynomial(r.num), UniPoly.from_polynomial(r.den))

    @classmethod
    def variable(cls) -> UniRat:
        return cls(UniPoly([0, 1]))

    def _coerce(self, other):
        if isinstance(other, UniRat):
            return other
        if isinstance(other, UniPoly) or is_exact_scalar(other):
            return UniRat(other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return UniRat(self.num + o.num, self.den)
        return UniRat(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return UniRat(-self.num, self.den)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return UniRat(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            raise ZeroDivisionError("division by zero in K(t)")
        return UniRat(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if k < 0:
            return UniRat(self.den, self.num) ** (-k)
        out = UniRat(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return not self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.degree <= 0 and self.den.degree == 0

    def constant_value(self):
        if not self.is_constant():
            raise ValueError("not a constant")
        return self.num.c[0] if self.num.c else Fraction(0)

    def derivative(self) -> UniRat:
        return UniRat(self.num.derivative() * self.den - self.num * self.den.derivative(), self.den * self.den)

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def __complex__(self):
        return complex(self.constant_value())

    def valuation_at(self, x0) -> int:
        return self.num.taylor_shift(x0).valuation() - self.den.taylor_shift(x0).valuation()

    def __repr__(self):
        return f"UniRat({list(self.num.c)}/{list(self.den.c)})"
