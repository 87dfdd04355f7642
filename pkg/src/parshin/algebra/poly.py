"""Sparse multivariate polynomials and rational functions over exact scalars."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .scalars import GaussianRational, is_exact_scalar, normalize

__all__ = [
    "Polynomial",
    "RationalFunction",
    "VariableMismatch",
    "poly_arith",
    "poly_partial",
    "power",
]


class VariableMismatch(ValueError):
    pass


def power(v, e: int):
    """``v**e`` for e >= 0 using only ``*`` (works for any ring element)."""
    if e == 0:
        return 1
    out = None
    base = v
    while e:
        if e & 1:
            out = base if out is None else out * base
        e >>= 1
        if e:
            base = base * base
    return out


def _fmt_scalar(c) -> str:
    c = normalize(c)
    if isinstance(c, GaussianRational):
        return "(" + str(c).strip("()") + ")"
    if isinstance(c, Fraction) and c.denominator != 1:
        return f"{c.numerator}/{c.denominator}"
    return str(c)


class Polynomial:
    """Polynomial in a fixed ordered variable list, stored as
    ``{exponent tuple: coefficient}`` with no zero coefficients."""

    __slots__ = ("vars", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple, object] | None = None):
        self.vars = tuple(variables)
        clean = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != len(self.vars):
                raise ValueError(f"exponent {exp} does not match variables {self.vars}")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent {exp}")
            c = normalize(c)
            if c != 0:
                clean[exp] = c
        self.terms = clean
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def constant(cls, variables, c) -> Polynomial:
        return cls(variables, {(0,) * len(tuple(variables)): c})

    @classmethod
    def variable(cls, variables, name: str) -> Polynomial:
        variables = tuple(variables)
        if name not in variables:
            raise VariableMismatch(f"unknown variable {name!r}")
        exp = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {exp: Fraction(1)})

    @classmethod
    def zero(cls, variables) -> Polynomial:
        return cls(variables, {})

    # basic queries -----------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self):
        return self.terms.get((0,) * len(self.vars), Fraction(0))

    def degree(self, var: str | None = None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        k = self._index(var)
        return max(e[k] for e in self.terms)

    def _index(self, var: str) -> int:
        try:
            return self.vars.index(var)
        except ValueError:
            raise VariableMismatch(f"unknown variable {var!r} (have {self.vars})") from None

    def sorted_terms(self) -> list[tuple[tuple, object]]:
        return sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0])))

    def leading_coefficient(self):
        if not self.terms:
            return Fraction(0)
        return self.sorted_terms()[0][1]

    def is_gaussian(self) -> bool:
        return any(isinstance(c, GaussianRational) for c in self.terms.values())

    # arithmetic ----------------------------------------------------------
    def _check(self, other: Polynomial):
        if self.vars != other.vars:
            raise VariableMismatch(f"variable lists differ: {self.vars} vs {other.vars}")

    def _lift(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if is_exact_scalar(other):
            return Polynomial.constant(self.vars, other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for e, c in o.terms.items():
            terms[e] = terms.get(e, 0) + c
        return Polynomial(self.vars, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.vars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in o.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Polynomial(self.vars, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        if k == 0:
            return Polynomial.constant(self.vars, 1)
        return power(self, k)

    def __truediv__(self, other):
        if is_exact_scalar(other):
            return Polynomial(self.vars, {e: c / other for e, c in self.terms.items()})
        if isinstance(other, (Polynomial, RationalFunction)):
            return RationalFunction(self, other) if isinstance(other, Polynomial) else RationalFunction(self) / other
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.vars == other.vars and self.terms == other.terms
        if is_exact_scalar(other):
            return self.terms == Polynomial.constant(self.vars, other).terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.vars, frozenset(self.terms.items())))
        return self._hash

    # calculus / evaluation ----------------------------------------------
    def partial(self, var: str) -> Polynomial:
        k = self._index(var)
        terms = {}
        for e, c in self.terms.items():
            if e[k]:
                ne = list(e)
                ne[k] -= 1
                terms[tuple(ne)] = c * e[k]
        return Polynomial(self.vars, terms)

    def evaluate(self, values: Sequence | Mapping):
        """Substitute ``values`` (aligned with ``vars`` or keyed by name).

        Values may be any ring elements supporting ``+`` and ``*`` with exact
        scalars: numbers, series, polynomials, ...
        """
        if isinstance(values, Mapping):
            values = [values[v] for v in self.vars]
        if len(values) != len(self.vars):
            raise VariableMismatch(f"expected {len(self.vars)} values, got {len(values)}")
        cache: dict = {}
        total = None
        for e, c in self.sorted_terms():
            mono = None
            for k, ek in enumerate(e):
                if ek:
                    key = (k, ek)
                    if key not in cache:
                        cache[key] = power(values[k], ek)
                    mono = cache[key] if mono is None else mono * cache[key]
            term = c if mono is None else mono * c
            total = term if total is None else total + term
        return Fraction(0) if total is None else total

    def __call__(self, *values):
        return self.evaluate(values)

    def to_variables(self, variables: Sequence[str]) -> Polynomial:
        """Re-embed into a larger/reordered variable list."""
        variables = tuple(variables)
        idx = []
        for v in self.vars:
            if v not in variables:
                if any(e[self.vars.index(v)] for e in self.terms):
                    raise VariableMismatch(f"variable {v!r} missing from {variables}")
                idx.append(None)
            else:
                idx.append(variables.index(v))
        terms = {}
        for e, c in self.terms.items():
            ne = [0] * len(variables)
            for k, ek in enumerate(e):
                if idx[k] is not None:
                    ne[idx[k]] += ek
            terms[tuple(ne)] = c
        return Polynomial(variables, terms)

    def monomial_gcd(self) -> tuple:
        if not self.terms:
            return (0,) * len(self.vars)
        return tuple(min(e[k] for e in self.terms) for k in range(len(self.vars)))

    def shift_down(self, exp: tuple) -> Polynomial:
        return Polynomial(self.vars, {tuple(a - b for a, b in zip(e, exp)): c for e, c in self.terms.items()})

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                v if k == 1 else f"{v}^{k}" for v, k in zip(self.vars, e) if k
            )
            neg = isinstance(c, Fraction) and c < 0
            mag = -c if neg else c
            if mono:
                body = mono if mag == 1 else f"{_fmt_scalar(mag)}*{mono}"
            else:
                body = _fmt_scalar(mag)
            parts.append(("-" if neg else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"Polynomial({self.vars}, {str(self)!r})"


class RationalFunction:
    """Quotient of two polynomials over the same variables.

    Normal form: common monomial factors cancelled, denominator leading
    coefficient 1. No multivariate gcd is attempted.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None:
            den = Polynomial.constant(num.vars, 1)
        num._check(den)
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            den = Polynomial.constant(num.vars, 1)
        else:
            g = tuple(min(a, b) for a, b in zip(num.monomial_gcd(), den.monomial_gcd()))
            if any(g):
                num, den = num.shift_down(g), den.shift_down(g)
            lc = den.leading_coefficient()
            if lc != 1:
                num, den = num / lc, den / lc
        self.num = num
        self.den = den

    @property
    def vars(self):
        return self.num.vars

    @classmethod
    def lift(cls, v, variables=None) -> RationalFunction:
        if isinstance(v, RationalFunction):
            return v
        if isinstance(v, Polynomial):
            return cls(v)
        if is_exact_scalar(v) and variables is not None:
            return cls(Polynomial.constant(variables, v))
        raise TypeError(f"cannot lift {v!r} to a rational function")

    def _coerce(self, other):
        if isinstance(other, (RationalFunction, Polynomial)):
            return RationalFunction.lift(other)
        if is_exact_scalar(other):
            return RationalFunction.lift(other, self.vars)
        return None

    def is_zero(self):
        return self.num.is_zero()

    def is_polynomial(self):
        return self.den.is_constant()

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if self.den == o.den:
            return RationalFunction(self.num + o.num, self.den)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

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
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return RationalFunction(self.den ** (-k), self.num ** (-k))
        return RationalFunction(self.num ** k, self.den ** k)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def partial(self, var: str) -> RationalFunction:
        n, d = self.num, self.den
        return RationalFunction(n.partial(var) * d - n * d.partial(var), d * d)

    def evaluate(self, values):
        return self.num.evaluate(values) / self.den.evaluate(values)

    def substitute(self, values: Sequence) -> RationalFunction:
        """Compose with rational-function values in a new variable list."""
        vals = [RationalFunction.lift(v) for v in values]
        if not vals:
            raise ValueError("substitute needs at least one value")
        target = vals[0].vars
        num = RationalFunction.lift(self.num.evaluate(vals), target)
        den = RationalFunction.lift(self.den.evaluate(vals), target)
        return num / den

    def to_variables(self, variables) -> RationalFunction:
        return RationalFunction(self.num.to_variables(variables), self.den.to_variables(variables))

    def __str__(self):
        if self.den == 1:
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self):
        return f"RationalFunction({str(self)!r})"


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    a._check(b)
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def poly_partial(p: Polynomial, var: str) -> Polynomial:
    return p.partial(var)
