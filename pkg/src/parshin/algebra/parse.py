"""Infix parser for polynomials and rational functions over declared
variables. Errors carry the byte offset of the offending token."""

from __future__ import annotations

import re
from fractions import Fraction

from .poly import Polynomial, RationalFunction
from .scalars import I

__all__ = ["ExpressionError", "parse_rational", "parse_polynomial"]

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d+)?)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


class ExpressionError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset
        self.message = message


class _Parser:
    def __init__(self, text: str, variables, base: int):
        self.vars = tuple(variables)
        self.base = base
        self.toks = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None or m.end() == pos:
                break
            start = m.start(m.lastindex)
            self.toks.append((m.lastindex, m.group(m.lastindex), self._off(text, start)))
            pos = m.end()
        self.end = self._off(text, len(text))
        self.i = 0

    def _off(self, text, k):
        return self.base + len(text[:k].encode())

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, self.end)

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        raise ExpressionError(msg, (tok or self.peek())[2])

    def parse(self):
        if not self.toks:
            self.fail("empty expression")
        v = self.expr()
        if self.peek()[0] is not None:
            self.fail(f"unexpected {self.peek()[1]!r}")
        return v

    def expr(self):
        v = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == 3:
            op = self.take()[1]
            r = self.term()
            v = v + r if op == "+" else v - r
        return v

    def term(self):
        v = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == 3:
            tok = self.take()
            r = self.unary()
            if tok[1] == "*":
                v = v * r
            else:
                if r.is_zero():
                    self.fail("division by zero", tok)
                v = v / r
        return v

    def unary(self):
        if self.peek()[1] in ("+", "-") and self.peek()[0] == 3:
            op = self.take()[1]
            v = self.unary()
            return -v if op == "-" else v
        return self.power()

    def power(self):
        v = self.atom()
        if self.peek()[1] == "^":
            self.take()
            neg = False
            if self.peek()[1] == "-":
                self.take()
                neg = True
            kind, text, off = self.take()
            if kind != 1 or "." in text:
                raise ExpressionError("exponent must be a non-negative integer literal", off)
            k = int(text)
            if neg:
                if v.is_zero():
                    raise ExpressionError("negative power of zero", off)
                return RationalFunction.lift(1, self.vars) / v ** k
            return v ** k
        return v

    def atom(self):
        kind, text, off = self.take()
        if kind == 1:
            if "." in text:
                raise ExpressionError("decimal literals are not allowed; write a fraction", off)
            return RationalFunction.lift(Fraction(int(text)), self.vars)
        if kind == 2:
            if text in self.vars:
                return RationalFunction(Polynomial.variable(self.vars, text))
            if text == "I":
                return RationalFunction.lift(I, self.vars)
            raise ExpressionError(f"unknown variable {text!r}", off)
        if text == "(":
            v = self.expr()
            k, t, o = self.take()
            if t != ")":
                raise ExpressionError("expected ')'", o)
            return v
        raise ExpressionError(f"unexpected {text!r}" if text else "unexpected end of expression", off)


def parse_rational(text: str, variables, offset: int = 0) -> RationalFunction:
    """Parse ``text`` as a rational function; ``offset`` is added to error
    positions so callers can report positions within a larger file."""
    return _Parser(text, variables, offset).parse()


def parse_polynomial(text: str, variables, offset: int = 0) -> Polynomial:
    r = parse_rational(text, variables, offset)
    if not r.den.is_constant():
        raise ExpressionError("expected a polynomial, got a proper fraction", offset)
    return r.num * (Fraction(1) / r.den.constant_term()) if r.den.constant_term() != 1 else r.num
