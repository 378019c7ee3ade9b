"""
Sparse multivariate polynomials over the rationals.

Monomials are packed into a single Python integer: one 16-bit field per
variable plus a leading field holding the total degree.  With variable 0 in
the most significant variable field, plain integer comparison of packed keys
is graded lexicographic order, and multiplying monomials is integer addition.

Coefficients are ``gmpy2.mpq`` values, which are always stored reduced.
"""
from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from flint import fmpq, fmpq_mpoly_ctx
from gmpy2 import mpq, mpz

__all__ = [
    "Polynomial",
    "Rational",
    "RationalPoint",
    "as_rational",
    "compose",
    "evaluate",
    "parse_point",
    "polynomial_gcd",
    "partial_derivative",
    "poly_arith",
]

Rational = type(mpq())
RationalPoint = tuple  # tuple of mpq, one entry per chart coordinate

FIELD_BITS = 16
_MASK = (1 << FIELD_BITS) - 1
MAX_DEGREE = (1 << (FIELD_BITS - 1)) - 1


def as_rational(value) -> Rational:
    """Coerce ints, Fractions, mpq and ``"p/q"`` strings to ``mpq``."""
    if isinstance(value, Rational):
        return value
    if isinstance(value, (int, type(mpz()))):
        return mpq(value)
    if isinstance(value, Fraction):
        return mpq(value.numerator, value.denominator)
    if isinstance(value, str):
        text = value.strip()
        if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
            raise ValueError(f"not a rational literal: {value!r}")
        num, _, den = text.partition("/")
        if den and int(den) == 0:
            raise ZeroDivisionError(f"zero denominator in {value!r}")
        return mpq(int(num), int(den) if den else 1)
    raise TypeError(f"cannot interpret {type(value).__name__} as a rational")


def parse_point(text: str, dim: int | None = None) -> RationalPoint:
    """Parse ``"a1,...,aN"`` into a tuple of rationals."""
    parts = [p for p in text.split(",") if p.strip()]
    point = tuple(as_rational(p) for p in parts)
    if dim is not None and len(point) != dim:
        raise ValueError(f"point has {len(point)} coordinates, chart has {dim}")
    return point


class _Layout:
    __slots__ = ("nvars", "shifts", "deg_shift", "units", "guard")

    def __init__(self, nvars: int):
        self.nvars = nvars
        self.shifts = tuple(FIELD_BITS * (nvars - 1 - i) for i in range(nvars))
        self.deg_shift = FIELD_BITS * nvars
        deg_unit = 1 << self.deg_shift
        self.units = tuple((1 << s) + deg_unit for s in self.shifts)
        guard = 0
        for f in range(nvars + 1):
            guard |= 1 << (FIELD_BITS * f + FIELD_BITS - 1)
        self.guard = guard

    def pack(self, exps: Sequence[int]) -> int:
        if len(exps) != self.nvars:
            raise ValueError(f"exponent vector of length {len(exps)}, expected {self.nvars}")
        key = 0
        deg = 0
        for e, s in zip(exps, self.shifts):
            if e < 0:
                raise ValueError("negative exponent")
            key |= e << s
            deg += e
        if deg > MAX_DEGREE:
            raise OverflowError("total degree exceeds packed monomial capacity")
        return key | (deg << self.deg_shift)

    def unpack(self, key: int) -> tuple[int, ...]:
        return tuple((key >> s) & _MASK for s in self.shifts)

    def divides(self, a: int, b: int) -> bool:
        """True when monomial ``a`` divides monomial ``b``."""
        g = self.guard
        return ((b | g) - a) & g == g


@lru_cache(maxsize=None)
def _layout(nvars: int) -> _Layout:
    return _Layout(nvars)


class Polynomial:
    """Immutable sparse polynomial in ``nvars`` variables with rational coefficients.

    ``terms`` maps exponent tuples to coefficients; zero coefficients are
    dropped.  Equality is structural and requires the same number of
    variables.
    """

    __slots__ = ("nvars", "_t", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], object] | None = None):
        if nvars < 0:
            raise ValueError("nvars must be non-negative")
        self.nvars = nvars
        self._hash = None
        lay = _layout(nvars)
        t: dict[int, Rational] = {}
        if terms:
            for exps, c in terms.items():
                c = as_rational(c)
                if c:
                    k = lay.pack(tuple(exps))
                    v = t.get(k)
                    if v is None:
                        t[k] = c
                    else:
                        v += c
                        if v:
                            t[k] = v
                        else:
                            del t[k]
        self._t = t

    @classmethod
    def _raw(cls, nvars: int, packed: dict) -> "Polynomial":
        p = object.__new__(cls)
        p.nvars = nvars
        p._t = packed
        p._hash = None
        return p

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "Polynomial":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, value) -> "Polynomial":
        c = as_rational(value)
        return cls._raw(nvars, {0: c} if c else {})

    @classmethod
    def one(cls, nvars: int) -> "Polynomial":
        return cls.constant(nvars, 1)

    @classmethod
    def variable(cls, nvars: int, index: int) -> "Polynomial":
        if not 0 <= index < nvars:
            raise IndexError(f"variable index {index} out of range for {nvars} variables")
        return cls._raw(nvars, {_layout(nvars).units[index]: mpq(1)})

    @classmethod
    def variables(cls, nvars: int) -> list["Polynomial"]:
        return [cls.variable(nvars, i) for i in range(nvars)]

    # -- inspection -----------------------------------------------------------
    def __bool__(self) -> bool:
        return bool(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def is_constant(self) -> bool:
        t = self._t
        return not t or (len(t) == 1 and 0 in t)

    def constant_term(self) -> Rational:
        return self._t.get(0, mpq(0))

    def __len__(self) -> int:
        return len(self._t)

    def degree(self) -> int:
        """Total degree; ``-1`` for the zero polynomial."""
        if not self._t:
            return -1
        return max(self._t) >> _layout(self.nvars).deg_shift

    def degree_in(self, index: int) -> int:
        s = _layout(self.nvars).shifts[index]
        return max(((k >> s) & _MASK for k in self._t), default=-1)

    def depends_on(self, index: int) -> bool:
        s = _layout(self.nvars).shifts[index]
        return any((k >> s) & _MASK for k in self._t)

    def support(self) -> set[int]:
        """Indices of the variables that actually occur."""
        lay = _layout(self.nvars)
        acc = 0
        for k in self._t:
            acc |= k
        return {i for i, s in enumerate(lay.shifts) if (acc >> s) & _MASK}

    def terms(self) -> list[tuple[tuple[int, ...], Rational]]:
        """Terms in descending graded-lex order."""
        lay = _layout(self.nvars)
        return [(lay.unpack(k), self._t[k]) for k in sorted(self._t, reverse=True)]

    def leading_term(self) -> tuple[tuple[int, ...], Rational]:
        if not self._t:
            raise ValueError("zero polynomial has no leading term")
        k = max(self._t)
        return _layout(self.nvars).unpack(k), self._t[k]

    def coefficients(self) -> list[Rational]:
        return list(self._t.values())

    # -- equality / hashing -----------------------------------------------------
    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self._t == other._t
        try:
            c = as_rational(other)
        except TypeError:
            return NotImplemented
        return self.is_constant() and self.constant_term() == c

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._t.items())))
        return self._hash

    # -- arithmetic ---------------------------------------------------------------
    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError(
                    f"dimension mismatch: {self.nvars} vs {other.nvars} variables")
            return other
        return Polynomial.constant(self.nvars, other)

    def __add__(self, other) -> "Polynomial":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        a, b = self._t, other._t
        if len(a) < len(b):
            a, b = b, a
        out = dict(a)
        for k, c in b.items():
            v = out.get(k)
            if v is None:
                out[k] = c
            else:
                v = v + c
                if v:
                    out[k] = v
                else:
                    del out[k]
        return Polynomial._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw(self.nvars, {k: -c for k, c in self._t.items()})

    def __sub__(self, other) -> "Polynomial":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._t)
        for k, c in other._t.items():
            v = out.get(k)
            if v is None:
                out[k] = -c
            else:
                v = v - c
                if v:
                    out[k] = v
                else:
                    del out[k]
        return Polynomial._raw(self.nvars, out)

    def __rsub__(self, other) -> "Polynomial":
        return (-self).__add__(other)

    def scale(self, c) -> "Polynomial":
        c = as_rational(c)
        if not c:
            return Polynomial.zero(self.nvars)
        return Polynomial._raw(self.nvars, {k: v * c for k, v in self._t.items()})

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        if other.nvars != self.nvars:
            raise ValueError(f"dimension mismatch: {self.nvars} vs {other.nvars} variables")
        a, b = self._t, other._t
        if not a or not b:
            return Polynomial.zero(self.nvars)
        if len(b) == 1:
            (kb, cb), = b.items()
            if kb == 0:
                return self.scale(cb)
        if len(a) == 1:
            (ka, ca), = a.items()
            if ka == 0:
                return other.scale(ca)
        if self.degree() + other.degree() > MAX_DEGREE:
            raise OverflowError("product degree exceeds packed monomial capacity")
        if len(a) < len(b):
            a, b = b, a
        out: dict[int, Rational] = {}
        get = out.get
        for kb, cb in b.items():
            for ka, ca in a.items():
                k = ka + kb
                v = get(k)
                out[k] = ca * cb if v is None else v + ca * cb
        return Polynomial._raw(self.nvars, {k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Polynomial":
        if not isinstance(e, int) or e < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Polynomial.one(self.nvars)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def divexact(self, other: "Polynomial") -> "Polynomial":
        """Quotient ``self / other``; raises ``ArithmeticError`` unless exact."""
        other = self._coerce(other)
        b = other._t
        if not b:
            raise ZeroDivisionError("division by the zero polynomial")
        if not self._t:
            return self
        if len(b) == 1:
            (kb, cb), = b.items()
            if kb == 0:
                return self.scale(1 / cb)
            lay = _layout(self.nvars)
            out = {}
            for k, c in self._t.items():
                if not lay.divides(kb, k):
                    raise ArithmeticError("inexact polynomial division")
                out[k - kb] = c / cb
            return Polynomial._raw(self.nvars, out)
        lay = _layout(self.nvars)
        kb = max(b)
        cb = b[kb]
        rest = [(k, c) for k, c in b.items() if k != kb]
        r = dict(self._t)
        q: dict[int, Rational] = {}
        while r:
            kr = max(r)
            if not lay.divides(kb, kr):
                raise ArithmeticError("inexact polynomial division")
            kt = kr - kb
            ct = r.pop(kr) / cb
            q[kt] = ct
            for k, c in rest:
                kk = k + kt
                v = r.get(kk)
                if v is None:
                    r[kk] = -ct * c
                else:
                    v = v - ct * c
                    if v:
                        r[kk] = v
                    else:
                        del r[kk]
        return Polynomial._raw(self.nvars, q)

    def __truediv__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return self.divexact(other)
        return self.scale(1 / as_rational(other))

    # -- calculus and evaluation ----------------------------------------------
    def diff(self, index: int) -> "Polynomial":
        """Formal partial derivative with respect to variable ``index``."""
        if not 0 <= index < self.nvars:
            raise IndexError(f"variable index {index} out of range for {self.nvars} variables")
        lay = _layout(self.nvars)
        s, unit = lay.shifts[index], lay.units[index]
        out = {}
        for k, c in self._t.items():
            e = (k >> s) & _MASK
            if e:
                out[k - unit] = c * e
        return Polynomial._raw(self.nvars, out)

    def evaluate(self, point: Sequence) -> Rational:
        if len(point) != self.nvars:
            raise ValueError(
                f"dimension mismatch: point has {len(point)} coordinates, "
                f"polynomial has {self.nvars} variables")
        if not self._t:
            return mpq(0)
        lay = _layout(self.nvars)
        pt = [as_rational(v) for v in point]
        total = mpq(0)
        for k, c in self._t.items():
            if k == 0:
                total += c
                continue
            term = c
            for v, s in zip(pt, lay.shifts):
                e = (k >> s) & _MASK
                if e:
                    term *= v ** e
                    if not term:
                        break
            total += term
        return total

    __call__ = evaluate

    def compose(self, maps: Sequence["Polynomial"]) -> "Polynomial":
        """Substitute ``maps[i]`` for variable ``i``."""
        if len(maps) != self.nvars:
            raise ValueError(f"arity mismatch: {len(maps)} maps for {self.nvars} variables")
        if not maps:
            return self
        target = maps[0].nvars
        if any(m.nvars != target for m in maps):
            raise ValueError("substituted polynomials must share a chart dimension")
        lay = _layout(self.nvars)
        powers: dict[tuple[int, int], Polynomial] = {}

        def power(i: int, e: int) -> Polynomial:
            key = (i, e)
            p = powers.get(key)
            if p is None:
                p = maps[i] if e == 1 else power(i, e - 1) * maps[i]
                powers[key] = p
            return p

        out: dict[int, Rational] = {}
        for k, c in self._t.items():
            term = Polynomial.constant(target, c)
            for i, s in enumerate(lay.shifts):
                e = (k >> s) & _MASK
                if e:
                    term = term * power(i, e)
            for kk, cc in term._t.items():
                v = out.get(kk)
                out[kk] = cc if v is None else v + cc
        return Polynomial._raw(target, {k: c for k, c in out.items() if c})

    # -- chart manipulation ---------------------------------------------------
    def extend(self, nvars: int) -> "Polynomial":
        """The same polynomial viewed in ``nvars >= self.nvars`` variables (new ones appended)."""
        if nvars == self.nvars:
            return self
        if nvars < self.nvars:
            raise ValueError("extend cannot drop variables; use truncate")
        old, new = _layout(self.nvars), _layout(nvars)
        pad = (0,) * (nvars - self.nvars)
        return Polynomial._raw(nvars, {new.pack(old.unpack(k) + pad): c for k, c in self._t.items()})

    def truncate(self, nvars: int) -> "Polynomial":
        """Drop trailing variables, which must not occur."""
        if nvars == self.nvars:
            return self
        old, new = _layout(self.nvars), _layout(nvars)
        out = {}
        for k, c in self._t.items():
            exps = old.unpack(k)
            if any(exps[nvars:]):
                raise ValueError("polynomial depends on a dropped variable")
            out[new.pack(exps[:nvars])] = c
        return Polynomial._raw(nvars, out)

    def split(self, indices: Sequence[int]) -> dict[tuple[int, ...], "Polynomial"]:
        """Group terms by their exponents in ``indices``.

        Returns a map from the exponent sub-vector to the coefficient
        polynomial, which no longer involves those variables.
        """
        lay = _layout(self.nvars)
        groups: dict[tuple[int, ...], dict[int, Rational]] = {}
        for k, c in self._t.items():
            sub = tuple((k >> lay.shifts[i]) & _MASK for i in indices)
            rem = k
            for i, e in zip(indices, sub):
                rem -= e * lay.units[i]
            groups.setdefault(sub, {})[rem] = c
        return {sub: Polynomial._raw(self.nvars, t) for sub, t in groups.items()}

    def monomial_content(self) -> tuple[int, ...]:
        """Exponents of the largest monomial dividing every term."""
        if not self._t:
            return (0,) * self.nvars
        lay = _layout(self.nvars)
        exps = [lay.unpack(k) for k in self._t]
        return tuple(min(col) for col in zip(*exps))

    def shift_down(self, exps: Sequence[int]) -> "Polynomial":
        """Divide by the monomial with exponents ``exps`` (must divide every term)."""
        lay = _layout(self.nvars)
        m = lay.pack(exps)
        if not m:
            return self
        if any(not lay.divides(m, k) for k in self._t):
            raise ArithmeticError("monomial does not divide polynomial")
        return Polynomial._raw(self.nvars, {k - m: c for k, c in self._t.items()})

    # -- text form ----------------------------------------------------------------
    def to_text(self, names: Sequence[str] | None = None) -> str:
        if not self._t:
            return "0"
        if names is None:
            names = [f"x{i + 1}" for i in range(self.nvars)]
        parts = []
        for exps, c in self.terms():
            mono = "*".join(
                f"{names[i]}^{e}" for i, e in enumerate(exps) if e)
            parts.append(f"{c} * {mono}" if mono else f"{c}")
        return " + ".join(parts)

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"Polynomial({self.nvars}, {self.to_text()!r})"

    @classmethod
    def parse(cls, text: str, nvars: int, names: Sequence[str] | None = None) -> "Polynomial":
        """Inverse of :meth:`to_text`.

        Accepts terms ``c``, ``c * v^e*w^f`` or bare monomials, joined by
        ``+`` or ``-``.
        """
        if names is None:
            names = [f"x{i + 1}" for i in range(nvars)]
        index = {n: i for i, n in enumerate(names)}
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty polynomial text")
        # split on + or - that is not an exponent sign or leading sign
        chunks = re.findall(r"[+-]?[^+-]+", s)
        terms: dict[tuple[int, ...], Rational] = {}
        for chunk in chunks:
            sign = -1 if chunk.startswith("-") else 1
            body = chunk.lstrip("+-")
            coef = mpq(sign)
            factors = body.split("*")
            exps = [0] * nvars
            for f in factors:
                if not f:
                    raise ValueError(f"malformed term {chunk!r}")
                if re.fullmatch(r"\d+(/\d+)?", f):
                    coef *= as_rational(f)
                    continue
                name, _, e = f.partition("^")
                if name not in index:
                    raise ValueError(f"unknown variable {name!r}")
                exps[index[name]] += int(e) if e else 1
            key = tuple(exps)
            terms[key] = terms.get(key, mpq(0)) + coef
        return cls(nvars, terms)


# -- operation-level API -------------------------------------------------------

def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    if a.nvars != b.nvars:
        raise ValueError(f"dimension mismatch: {a.nvars} vs {b.nvars} variables")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def partial_derivative(p: Polynomial, var_index: int) -> Polynomial:
    return p.diff(var_index)


def evaluate(p: Polynomial, at: Sequence) -> Rational:
    return p.evaluate(at)


def compose(p: Polynomial, maps: Sequence[Polynomial]) -> Polynomial:
    return p.compose(maps)


@lru_cache(maxsize=None)
def _flint_ctx(nvars: int):
    return fmpq_mpoly_ctx.get(tuple(f"x{i}" for i in range(nvars)), "deglex")


def _to_flint(p: Polynomial):
    return _flint_ctx(p.nvars).from_dict(
        {e: fmpq(int(c.numerator), int(c.denominator)) for e, c in p.terms()})


def _from_flint(f, nvars: int) -> Polynomial:
    return Polynomial(nvars, {tuple(map(int, e)): mpq(int(c.p), int(c.q)) for e, c in f.to_dict().items()})


def polynomial_gcd(polys: Sequence[Polynomial]) -> Polynomial:
    """Monic gcd of the nonzero entries (python-flint does the work).

    Returns 1 when every entry is zero.
    """
    nonzero = [p for p in polys if p]
    if not nonzero:
        return Polynomial.one(polys[0].nvars) if polys else Polynomial.one(0)
    nvars = nonzero[0].nvars
    if any(p.is_constant() for p in nonzero):
        return Polynomial.one(nvars)
    g = _to_flint(nonzero[0])
    for p in nonzero[1:]:
        g = g.gcd(_to_flint(p))
        if g.is_one():
            return Polynomial.one(nvars)
    return _from_flint(g, nvars)


def divide_by_gcd(polys: Sequence[Polynomial]) -> list[Polynomial]:
    """Entries divided exactly by their common polynomial factor."""
    nonzero = [p for p in polys if p]
    if len(nonzero) == 0 or any(p.is_constant() for p in nonzero):
        return list(polys)
    flints = [_to_flint(p) for p in nonzero]
    g = flints[0]
    for f in flints[1:]:
        g = g.gcd(f)
        if g.is_one():
            return list(polys)
    if g.total_degree() <= 0:
        return list(polys)
    out, it = [], iter(flints)
    for p in polys:
        out.append(_from_flint(next(it) / g, p.nvars) if p else p)
    return out


def random_polynomial(rng, nvars: int, nterms: int = 3, max_degree: int = 2,
                      coeff_range: int = 3, support: Iterable[int] | None = None) -> Polynomial:
    """Sparse random polynomial with small integer coefficients (test helper)."""
    idx = list(range(nvars)) if support is None else list(support)
    terms: dict[tuple[int, ...], int] = {}
    for _ in range(nterms):
        exps = [0] * nvars
        for _ in range(rng.randint(0, max_degree)):
            if idx:
                exps[rng.choice(idx)] += 1
        c = rng.randint(-coeff_range, coeff_range)
        terms[tuple(exps)] = terms.get(tuple(exps), 0) + c
    return Polynomial(nvars, terms)
