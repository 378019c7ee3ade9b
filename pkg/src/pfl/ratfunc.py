"""Quotients of polynomials, kept as (numerator, denominator) pairs without gcds."""
from __future__ import annotations

from typing import Sequence

from .poly import Polynomial, Rational, as_rational

__all__ = ["RationalFunction", "compose_rational"]


def _try_divexact(a: Polynomial, b: Polynomial) -> Polynomial | None:
    try:
        return a.divexact(b)
    except ArithmeticError:
        return None


class RationalFunction:
    """num / den with den != 0.

    Normalization is cheap and partial: constant denominators are folded into
    the numerator, exact polynomial quotients are detected, and the
    denominator is made monic in its leading term.  No gcd is ever taken, so
    equality is decided by cross-multiplication.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial | None = None):
        if den is None:
            den = Polynomial.one(num.nvars)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if den.is_constant():
            c = den.constant_term()
            num, den = num.scale(1 / c), Polynomial.one(num.nvars)
        elif not num:
            den = Polynomial.one(num.nvars)
        else:
            q = _try_divexact(num, den)
            if q is not None:
                num, den = q, Polynomial.one(num.nvars)
            else:
                lc = den.leading_term()[1]
                if lc != 1:
                    num, den = num.scale(1 / lc), den.scale(1 / lc)
        self.num = num
        self.den = den

    @classmethod
    def constant(cls, nvars: int, value) -> "RationalFunction":
        return cls(Polynomial.constant(nvars, value))

    @classmethod
    def zero(cls, nvars: int) -> "RationalFunction":
        return cls(Polynomial.zero(nvars))

    @property
    def nvars(self) -> int:
        return self.num.nvars

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def __bool__(self) -> bool:
        return bool(self.num)

    def _lift(self, other) -> "RationalFunction":
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction(other)
        return RationalFunction(Polynomial.constant(self.nvars, other))

    def __add__(self, other) -> "RationalFunction":
        other = self._lift(other)
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return RationalFunction(self.num + other.num, self.den)
        if other.den.is_constant():
            return RationalFunction(self.num + other.num * self.den, self.den)
        if self.den.is_constant():
            return RationalFunction(self.num * other.den + other.num, other.den)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other) -> "RationalFunction":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "RationalFunction":
        return self._lift(other) - self

    def __mul__(self, other) -> "RationalFunction":
        other = self._lift(other)
        if not self.num or not other.num:
            return RationalFunction.zero(self.nvars)
        if self.den == other.num:
            return RationalFunction(self.num, other.den)
        if other.den == self.num:
            return RationalFunction(other.num, self.den)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RationalFunction":
        other = self._lift(other)
        if not other.num:
            raise ZeroDivisionError("division by the zero function")
        return self * RationalFunction(other.den, other.num)

    def __pow__(self, e: int) -> "RationalFunction":
        return RationalFunction(self.num ** e, self.den ** e)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalFunction):
            try:
                other = self._lift(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.num * other.den == other.num * self.den

    __hash__ = None

    def extend(self, nvars: int) -> "RationalFunction":
        return RationalFunction(self.num.extend(nvars), self.den.extend(nvars))

    def evaluate(self, at: Sequence) -> Rational:
        d = self.den.evaluate(at)
        if not d:
            raise ZeroDivisionError("denominator vanishes at the evaluation point")
        return self.num.evaluate(at) / d

    def derivative(self, field) -> "RationalFunction":
        """Lie derivative along a vector field: f(n/d) = (f(n) d - n f(d)) / d^2."""
        fn = field.apply(self.num)
        if self.den.is_constant():
            return RationalFunction(fn, self.den)
        fd = field.apply(self.den)
        if not fd:
            return RationalFunction(fn, self.den)
        return RationalFunction(fn * self.den - self.num * fd, self.den * self.den)

    def diff(self, index: int) -> "RationalFunction":
        n, d = self.num.diff(index), self.den.diff(index)
        if not d:
            return RationalFunction(n, self.den)
        return RationalFunction(n * self.den - self.num * d, self.den * self.den)

    def to_text(self, names=None) -> str:
        if self.den.is_constant():
            return self.num.to_text(names)
        return f"({self.num.to_text(names)}) / ({self.den.to_text(names)})"

    def __repr__(self) -> str:
        return f"RationalFunction({self.to_text()})"


def compose_rational(p: Polynomial, maps: Sequence[RationalFunction]) -> RationalFunction:
    """p(maps[0], ..., maps[N-1]) with terms grouped by shared denominators."""
    if len(maps) != p.nvars:
        raise ValueError(f"arity mismatch: {len(maps)} maps for {p.nvars} variables")
    if not maps:
        raise ValueError("nothing to substitute")
    target = maps[0].nvars
    if p.is_constant():
        return RationalFunction.constant(target, p.constant_term())
    powers: dict[tuple[int, int], tuple[Polynomial, Polynomial]] = {}

    def power(i: int, e: int):
        key = (i, e)
        hit = powers.get(key)
        if hit is None:
            if e == 1:
                hit = (maps[i].num, maps[i].den)
            else:
                a, b = power(i, e - 1)
                hit = (a * maps[i].num, b * maps[i].den)
            powers[key] = hit
        return hit

    groups: dict[Polynomial, Polynomial] = {}
    one = Polynomial.one(target)
    for exps, c in p.terms():
        num = Polynomial.constant(target, c)
        den = one
        for i, e in enumerate(exps):
            if e:
                a, b = power(i, e)
                num = num * a
                if not b.is_constant():
                    den = den * b
                else:
                    num = num.scale(1 / b.constant_term())
        groups[den] = groups.get(den, Polynomial.zero(target)) + num
    out = RationalFunction.zero(target)
    for den, num in groups.items():
        if num:
            out = out + RationalFunction(num, den)
    return out
