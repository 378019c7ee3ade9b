"""
Vector fields and low-degree differential forms with polynomial coefficients.

Conventions, fixed once:

* ``TwoForm`` stores only ``(i, j)`` with ``i < j``; ``w(f, g) = sum w_ij (f^i g^j - f^j g^i)``.
* ``interior_product(f, w)`` is ``w(f, .)``, so ``(f _| w)_j = sum_i f^i w_ij``.
* ``exterior_derivative(w)_ij = d_i w_j - d_j w_i`` and ``dw(f, g) = f(w(g)) - g(w(f)) - w([f, g])``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from .errors import ChartMismatchError, InputError, RankNotConstantError, VerificationError
from .linalg import Echelon, PolyMatrix, RationalSpan, generic_rank, rank_at_point
from .poly import Polynomial, Rational, as_rational

__all__ = [
    "Chart",
    "DiffeoPair",
    "Distribution",
    "FourForm",
    "OneForm",
    "PfaffianSystem",
    "TwoForm",
    "VectorField",
    "annihilator",
    "exterior_derivative",
    "interior_product",
    "kernel",
    "lie_bracket",
    "pairing",
    "pushforward",
    "wedge_two_forms",
]


@dataclass(frozen=True)
class Chart:
    """Coordinate chart on R^N with named variables.

    ``jet`` is ``(n, m)`` when the chart carries the canonical coordinates of
    the jet space of curves; ``names`` then follow ``x{j}_{i}`` for x_j^i.
    """

    names: tuple[str, ...]
    jet: tuple[int, int] | None = None

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if len(set(self.names)) != len(self.names):
            raise InputError("chart variable names must be distinct")
        if self.jet is not None:
            n, m = self.jet
            if (n + 1) * m + 1 != len(self.names):
                raise InputError(f"jet labels for J^{n} with m={m} need {(n + 1) * m + 1} coordinates")

    @classmethod
    def standard(cls, dim: int) -> "Chart":
        return cls(tuple(f"x{i + 1}" for i in range(dim)))

    @property
    def dim(self) -> int:
        return len(self.names)

    def zero(self) -> Polynomial:
        return Polynomial.zero(self.dim)

    def var(self, i: int) -> Polynomial:
        return Polynomial.variable(self.dim, i)

    def origin(self) -> tuple:
        return tuple(as_rational(0) for _ in range(self.dim))

    def point(self, at: Sequence | None) -> tuple:
        if at is None:
            return self.origin()
        if len(at) != self.dim:
            raise InputError(f"point has {len(at)} coordinates, chart has {self.dim}")
        return tuple(as_rational(v) for v in at)

    def check(self, other: "Chart") -> None:
        if other.names != self.names:
            raise ChartMismatchError(f"chart mismatch: {self.dim}-dim vs {other.dim}-dim chart")


def _components(chart: Chart, comps: Iterable) -> tuple[Polynomial, ...]:
    out = []
    for c in comps:
        if not isinstance(c, Polynomial):
            c = Polynomial.constant(chart.dim, c)
        elif c.nvars != chart.dim:
            raise ChartMismatchError("component lives on a chart of another dimension")
        out.append(c)
    if len(out) != chart.dim:
        raise InputError(f"expected {chart.dim} components, got {len(out)}")
    return tuple(out)


class VectorField:
    """sum_i components[i] * d/dx_i."""

    __slots__ = ("chart", "components")

    def __init__(self, chart: Chart, components: Iterable):
        self.chart = chart
        self.components = _components(chart, components)

    @classmethod
    def coordinate(cls, chart: Chart, i: int) -> "VectorField":
        one, zero = Polynomial.one(chart.dim), chart.zero()
        return cls(chart, [one if k == i else zero for k in range(chart.dim)])

    @classmethod
    def zero(cls, chart: Chart) -> "VectorField":
        return cls(chart, [chart.zero()] * chart.dim)

    def __getitem__(self, i: int) -> Polynomial:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    def is_zero(self) -> bool:
        return not any(self.components)

    def apply(self, p: Polynomial) -> Polynomial:
        """Directional derivative f(p) = sum_k f^k dp/dx_k."""
        out = Polynomial.zero(p.nvars)
        for k, fk in enumerate(self.components):
            if fk and p.depends_on(k):
                out = out + fk * p.diff(k)
        return out

    def evaluate(self, at: Sequence) -> list[Rational]:
        pt = tuple(as_rational(v) for v in at)
        return [c.evaluate(pt) for c in self.components]

    def _same(self, other: "VectorField") -> None:
        self.chart.check(other.chart)

    def __add__(self, other: "VectorField") -> "VectorField":
        self._same(other)
        return VectorField(self.chart, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        self._same(other)
        return VectorField(self.chart, [a - b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> "VectorField":
        return VectorField(self.chart, [-a for a in self.components])

    def scale(self, factor) -> "VectorField":
        """Multiply by a function (Polynomial) or a rational constant."""
        if isinstance(factor, Polynomial):
            return VectorField(self.chart, [factor * a if a else a for a in self.components])
        return VectorField(self.chart, [a.scale(factor) for a in self.components])

    __rmul__ = scale

    def __eq__(self, other) -> bool:
        return (isinstance(other, VectorField) and self.chart.names == other.chart.names
                and self.components == other.components)

    def __hash__(self) -> int:
        return hash(self.components)

    def to_text(self) -> str:
        parts = [f"({c.to_text(self.chart.names)}) d/d{self.chart.names[i]}"
                 for i, c in enumerate(self.components) if c]
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"VectorField({self.to_text()})"


class OneForm:
    """sum_i components[i] * dx_i."""

    __slots__ = ("chart", "components")

    def __init__(self, chart: Chart, components: Iterable):
        self.chart = chart
        self.components = _components(chart, components)

    @classmethod
    def coordinate(cls, chart: Chart, i: int) -> "OneForm":
        one, zero = Polynomial.one(chart.dim), chart.zero()
        return cls(chart, [one if k == i else zero for k in range(chart.dim)])

    @classmethod
    def gradient(cls, p: Polynomial, chart: Chart) -> "OneForm":
        return cls(chart, [p.diff(i) for i in range(chart.dim)])

    def __getitem__(self, i: int) -> Polynomial:
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    def is_zero(self) -> bool:
        return not any(self.components)

    def evaluate(self, at: Sequence) -> list[Rational]:
        pt = tuple(as_rational(v) for v in at)
        return [c.evaluate(pt) for c in self.components]

    def __add__(self, other: "OneForm") -> "OneForm":
        self.chart.check(other.chart)
        return OneForm(self.chart, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "OneForm") -> "OneForm":
        self.chart.check(other.chart)
        return OneForm(self.chart, [a - b for a, b in zip(self.components, other.components)])

    def scale(self, factor) -> "OneForm":
        if isinstance(factor, Polynomial):
            return OneForm(self.chart, [factor * a if a else a for a in self.components])
        return OneForm(self.chart, [a.scale(factor) for a in self.components])

    def __call__(self, f: VectorField) -> Polynomial:
        return pairing(self, f)

    def __eq__(self, other) -> bool:
        return (isinstance(other, OneForm) and self.chart.names == other.chart.names
                and self.components == other.components)

    def __hash__(self) -> int:
        return hash(self.components)

    def to_text(self) -> str:
        parts = [f"({c.to_text(self.chart.names)}) d{self.chart.names[i]}"
                 for i, c in enumerate(self.components) if c]
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"OneForm({self.to_text()})"


class TwoForm:
    """Antisymmetric 2-form; only keys (i, j) with i < j and nonzero value are kept."""

    __slots__ = ("chart", "components")

    def __init__(self, chart: Chart, components: Mapping[tuple[int, int], Polynomial]):
        self.chart = chart
        comps: dict[tuple[int, int], Polynomial] = {}
        for (i, j), p in components.items():
            if not (0 <= i < chart.dim and 0 <= j < chart.dim):
                raise InputError(f"index pair {(i, j)} out of range")
            if i == j:
                continue
            if not isinstance(p, Polynomial):
                p = Polynomial.constant(chart.dim, p)
            if i > j:
                i, j, p = j, i, -p
            q = comps.get((i, j))
            q = p if q is None else q + p
            if q:
                comps[(i, j)] = q
            else:
                comps.pop((i, j), None)
        self.components = dict(sorted(comps.items()))

    def get(self, i: int, j: int) -> Polynomial:
        if i < j:
            return self.components.get((i, j), self.chart.zero())
        if i > j:
            p = self.components.get((j, i))
            return -p if p is not None else self.chart.zero()
        return self.chart.zero()

    def is_zero(self) -> bool:
        return not self.components

    def __call__(self, f: VectorField, g: VectorField) -> Polynomial:
        out = self.chart.zero()
        for (i, j), w in self.components.items():
            t = f[i] * g[j] - f[j] * g[i]
            if t:
                out = out + w * t
        return out

    def __eq__(self, other) -> bool:
        return (isinstance(other, TwoForm) and self.chart.names == other.chart.names
                and self.components == other.components)

    def __repr__(self) -> str:
        return f"TwoForm({self.chart.dim}, {len(self.components)} terms)"


class FourForm:
    """Exterior 4-form stored on strictly increasing index quadruples."""

    __slots__ = ("chart", "components")

    def __init__(self, chart: Chart, components: Mapping[tuple[int, int, int, int], Polynomial]):
        for key in components:
            if not all(a < b for a, b in zip(key, key[1:])):
                raise InputError(f"four-form key {key} not strictly increasing")
        self.chart = chart
        self.components = {k: v for k, v in sorted(components.items()) if v}

    def is_zero(self) -> bool:
        return not self.components

    def __eq__(self, other) -> bool:
        return (isinstance(other, FourForm) and self.chart.names == other.chart.names
                and self.components == other.components)

    def __repr__(self) -> str:
        return f"FourForm({self.chart.dim}, {len(self.components)} terms)"


# -- operations -----------------------------------------------------------------

def lie_bracket(f: VectorField, g: VectorField) -> VectorField:
    """[f, g]^j = sum_k f^k d_k g^j - g^k d_k f^j."""
    f.chart.check(g.chart)
    return VectorField(f.chart, [f.apply(gj) - g.apply(fj)
                                 for fj, gj in zip(f.components, g.components)])


def pairing(w: OneForm, f: VectorField) -> Polynomial:
    w.chart.check(f.chart)
    out = w.chart.zero()
    for a, b in zip(w.components, f.components):
        if a and b:
            out = out + a * b
    return out


def exterior_derivative(w: OneForm) -> TwoForm:
    n = w.chart.dim
    comps = {}
    for i in range(n):
        for j in range(i + 1, n):
            v = w[j].diff(i) - w[i].diff(j)
            if v:
                comps[(i, j)] = v
    return TwoForm(w.chart, comps)


def wedge_components(a: Mapping[tuple[int, int], Polynomial],
                     b: Mapping[tuple[int, int], Polynomial],
                     zero: Polynomial) -> dict[tuple[int, int, int, int], Polynomial]:
    """Wedge of two 2-forms given as ``{(i, j): value}`` with i < j."""
    out: dict[tuple[int, int, int, int], Polynomial] = {}
    for (i, j), x in a.items():
        for (k, l), y in b.items():
            if len({i, j, k, l}) < 4:
                continue
            idx = [i, j, k, l]
            key = tuple(sorted(idx))
            # sign of the permutation sorting idx
            sign = 1
            for s in range(4):
                for t in range(s + 1, 4):
                    if idx[s] > idx[t]:
                        sign = -sign
            term = x * y
            if sign < 0:
                term = -term
            out[key] = out.get(key, zero) + term
    return {k: v for k, v in out.items() if v}


def wedge_two_forms(a: TwoForm, b: TwoForm) -> FourForm:
    a.chart.check(b.chart)
    return FourForm(a.chart, wedge_components(a.components, b.components, a.chart.zero()))


def interior_product(f: VectorField, w: TwoForm) -> OneForm:
    """f _| w = w(f, .)."""
    f.chart.check(w.chart)
    n = f.chart.dim
    comps = [f.chart.zero() for _ in range(n)]
    for (i, j), v in w.components.items():
        if f[i]:
            comps[j] = comps[j] + f[i] * v
        if f[j]:
            comps[i] = comps[i] - f[j] * v
    return OneForm(f.chart, comps)


# -- families -------------------------------------------------------------------

class _Family:
    """Shared machinery for finite families of row vectors with cached ranks."""

    _kind = "family"

    def __init__(self, chart: Chart, generators: Iterable, locus: Polynomial | None = None):
        gens = tuple(generators)
        for g in gens:
            chart.check(g.chart)
        self.chart = chart
        self.generators = gens
        self.locus = locus
        self._rank: int | None = None

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __getitem__(self, i):
        return self.generators[i]

    @property
    def dim(self) -> int:
        return self.chart.dim

    def matrix(self) -> PolyMatrix:
        return PolyMatrix([g.components for g in self.generators], self.chart.dim)

    @property
    def generic_rank(self) -> int:
        if self._rank is None:
            self._rank = generic_rank(self.matrix()) if self.generators else 0
        return self._rank

    def rank_at(self, at: Sequence | None = None) -> int:
        if not self.generators:
            return 0
        return rank_at_point(self.matrix(), self.chart.point(at))

    def has_constant_rank(self, at: Sequence | None = None) -> bool:
        return self.rank_at(at) == self.generic_rank

    def echelon(self, base: Sequence | None = None, track: bool = False) -> Echelon:
        base = None if base is None else self.chart.point(base)
        return Echelon([g.components for g in self.generators], self.chart.dim,
                       self.chart.dim, base=base, track=track)

    def contains(self, v) -> bool:
        """Span membership over the field of rational functions."""
        return self.echelon().contains(v.components)

    def includes(self, other: "_Family") -> bool:
        e = self.echelon()
        return all(e.contains(g.components) for g in other.generators)

    def same_span(self, other: "_Family") -> bool:
        return (self.generic_rank == other.generic_rank
                and self.includes(other))

    def independent_at(self, at: Sequence | None = None) -> list[int]:
        """Indices of a maximal subfamily independent at ``at`` (greedy, in order)."""
        span = RationalSpan(self.chart.dim)
        pt = self.chart.point(at)
        return [i for i, g in enumerate(self.generators) if span.add(g.evaluate(pt))]

    def basis(self, at: Sequence | None = None):
        """Subfamily independent at ``at`` and spanning generically.

        Requires constant rank at ``at``.
        """
        idx = self.independent_at(at)
        if len(idx) != self.generic_rank:
            raise RankNotConstantError(
                f"{self._kind} has rank {len(idx)} at the base point but generic rank {self.generic_rank}")
        return type(self)(self.chart, [self.generators[i] for i in idx], self.locus)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({len(self.generators)} generators on R^{self.chart.dim})"


class Distribution(_Family):
    """Span of a finite family of vector fields."""

    _kind = "distribution"

    def is_involutive(self) -> bool:
        e = self.echelon()
        gens = self.generators
        return all(e.contains(lie_bracket(gens[a], gens[b]).components)
                   for a, b in combinations(range(len(gens)), 2))


class PfaffianSystem(_Family):
    """Span of a finite family of 1-forms."""

    _kind = "Pfaffian system"


def _kernel_rows(family: _Family, base) -> tuple[list[list[Polynomial]], Polynomial]:
    pt = family.chart.point(base)
    if not family.generators:
        n = family.chart.dim
        one = Polynomial.one(n)
        return [[one if i == j else family.chart.zero() for j in range(n)] for i in range(n)], one
    if family.rank_at(pt) != family.generic_rank:
        raise RankNotConstantError(
            f"{family._kind} rank is {family.rank_at(pt)} at the base point, "
            f"{family.generic_rank} generically")
    e = family.echelon(pt)
    return e.kernel(), e.det


def annihilator(D: Distribution, base: Sequence | None = None) -> PfaffianSystem:
    """Polynomial 1-forms spanning the annihilator of ``D``.

    They are independent wherever ``locus`` (the pivot minor) is nonzero,
    which includes ``base``.
    """
    rows, det = _kernel_rows(D, base)
    return PfaffianSystem(D.chart, [OneForm(D.chart, r) for r in rows], det)


def kernel(I: PfaffianSystem, base: Sequence | None = None) -> Distribution:
    """Polynomial vector fields spanning the common kernel of ``I``."""
    rows, det = _kernel_rows(I, base)
    return Distribution(I.chart, [VectorField(I.chart, r) for r in rows], det)


# -- diffeomorphisms ----------------------------------------------------------

class DiffeoPair:
    """Polynomial map ``forward`` with polynomial inverse ``backward``, verified exactly."""

    __slots__ = ("chart", "forward", "backward", "base_point")

    def __init__(self, chart: Chart, forward: Sequence[Polynomial], backward: Sequence[Polynomial],
                 base_point: Sequence | None = None):
        n = chart.dim
        forward = tuple(forward)
        backward = tuple(backward)
        if len(forward) != n or len(backward) != n:
            raise InputError(f"diffeomorphism components must number {n}")
        if any(p.nvars != n for p in forward + backward):
            raise ChartMismatchError("diffeomorphism components on wrong chart")
        self.chart = chart
        self.forward = forward
        self.backward = backward
        self.base_point = chart.point(base_point)
        self._verify()

    def _verify(self) -> None:
        xs = Polynomial.variables(self.chart.dim)
        for i, (p, x) in enumerate(zip(self.forward, xs)):
            if p.compose(self.backward) != x:
                raise VerificationError(f"forward o backward is not the identity in component {i}", i)
        for i, (p, x) in enumerate(zip(self.backward, xs)):
            if p.compose(self.forward) != x:
                raise VerificationError(f"backward o forward is not the identity in component {i}", i)

    @classmethod
    def identity(cls, chart: Chart) -> "DiffeoPair":
        xs = Polynomial.variables(chart.dim)
        return cls(chart, xs, xs)

    def inverse(self) -> "DiffeoPair":
        return DiffeoPair(self.chart, self.backward, self.forward, self.image(self.base_point))

    def image(self, at: Sequence) -> tuple:
        pt = self.chart.point(at)
        return tuple(p.evaluate(pt) for p in self.forward)

    def then(self, other: "DiffeoPair") -> "DiffeoPair":
        """Composite map ``other o self``."""
        fwd = [p.compose(self.forward) for p in other.forward]
        bwd = [p.compose(other.backward) for p in self.backward]
        return DiffeoPair(self.chart, fwd, bwd, self.base_point)

    def push_vector_field(self, f: VectorField) -> VectorField:
        self.chart.check(f.chart)
        return VectorField(f.chart, [f.apply(p).compose(self.backward) for p in self.forward])


def pushforward(D: Distribution, pair: DiffeoPair) -> Distribution:
    """phi_* D with (phi_* f)(x) = J phi(psi(x)) f(psi(x))."""
    if not isinstance(pair, DiffeoPair):
        raise VerificationError("pushforward needs a verified DiffeoPair")
    return Distribution(D.chart, [pair.push_vector_field(f) for f in D.generators])
