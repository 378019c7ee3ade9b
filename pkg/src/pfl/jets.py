"""
Jet charts, the canonical contact system for curves, and Kumpera-Ruiz words.

Coordinates on J^n(R, R^m) are ordered ``x0_0, x1_0..xm_0, x1_1..xm_1, ...,
x1_n..xm_n`` (``xj_i`` is x_j^i).  Going up one level appends m coordinates at
the end, so lifting a field is just padding with zeros.

A family is always listed as ``[k_1, ..., k_m, k_0]``: the m top coordinate
fields first, the drift field last.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .errors import ChartMismatchError, InputError
from .exterior import Chart, Distribution, VectorField
from .poly import Polynomial, Rational, as_rational

__all__ = [
    "JetSpec",
    "ProlongationLetter",
    "ProlongationWord",
    "canonical_contact_system",
    "canonical_family",
    "constant_parameter_family",
    "jet_frame",
    "generate_kumpera_ruiz",
    "kumpera_ruiz_family",
    "lift_vector_field",
    "prolong",
]


@dataclass(frozen=True)
class JetSpec:
    n: int
    m: int

    def __post_init__(self):
        if self.n < 0 or self.m < 1:
            raise InputError(f"invalid jet spec n={self.n}, m={self.m}")

    @classmethod
    def parse(cls, text: str) -> "JetSpec":
        try:
            n, m = (int(t) for t in text.split(","))
        except ValueError:
            raise InputError(f"--spec expects 'n,m', got {text!r}") from None
        if n < 1:
            raise InputError("jet order n must be at least 1")
        return cls(n, m)

    @property
    def dim(self) -> int:
        return (self.n + 1) * self.m + 1

    def index(self, i: int, j: int) -> int:
        """Chart position of x_j^i (x_0^0 is position 0)."""
        if i == 0 and j == 0:
            return 0
        if not (0 <= i <= self.n and 1 <= j <= self.m):
            raise InputError(f"no coordinate x_{j}^{i} on J^{self.n} with m={self.m}")
        return 1 + i * self.m + (j - 1)

    def label(self, k: int) -> tuple[int, int]:
        if k == 0:
            return 0, 0
        i, r = divmod(k - 1, self.m)
        return i, r + 1

    def chart(self) -> Chart:
        names = [f"x{j}_{i}" for i, j in map(self.label, range(self.dim))]
        return Chart(tuple(names), (self.n, self.m))

    def lower(self) -> "JetSpec":
        return JetSpec(self.n - 1, self.m)

    def higher(self) -> "JetSpec":
        return JetSpec(self.n + 1, self.m)


def _jet_spec(chart: Chart) -> JetSpec:
    if chart.jet is None:
        raise ChartMismatchError("a jet chart is required")
    return JetSpec(*chart.jet)


@dataclass(frozen=True)
class ProlongationLetter:
    kind: str
    c: tuple

    def __post_init__(self):
        if self.kind not in ("R", "S"):
            raise InputError(f"letter kind must be R or S, got {self.kind!r}")
        object.__setattr__(self, "c", tuple(as_rational(v) for v in self.c))
        if not self.c:
            raise InputError("a letter needs m >= 1 parameters")
        if self.kind == "S" and self.c[-1] != 0:
            raise InputError("a singular letter must have its last parameter equal to 0")

    def __str__(self) -> str:
        return f"{self.kind}({','.join(_fmt(v) for v in self.c)})"


def _fmt(q) -> str:
    q = as_rational(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


_LETTER = re.compile(r"\s*([RS])\s*\(([^)]*)\)\s*")


@dataclass(frozen=True)
class ProlongationWord:
    """Letters sigma_2 ... sigma_n applied in order to the first-order canonical frame."""

    spec: JetSpec
    letters: tuple[ProlongationLetter, ...]

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        if len(self.letters) != self.spec.n - 1:
            raise InputError(
                f"J^{self.spec.n} needs {self.spec.n - 1} letters, got {len(self.letters)}")
        for k, l in enumerate(self.letters):
            if len(l.c) != self.spec.m:
                raise InputError(f"letter {k + 2} has {len(l.c)} parameters, expected m={self.spec.m}")

    @classmethod
    def parse(cls, text: str, spec: JetSpec) -> "ProlongationWord":
        letters = []
        pos = 0
        text = text.strip()
        while pos < len(text):
            mt = _LETTER.match(text, pos)
            if not mt:
                raise InputError(f"cannot parse word at {text[pos:]!r}")
            params = [p for p in mt.group(2).replace(" ", "").split(",") if p]
            try:
                letters.append(ProlongationLetter(mt.group(1), tuple(as_rational(p) for p in params)))
            except (ValueError, ZeroDivisionError) as exc:
                raise InputError(f"bad letter {mt.group(0).strip()!r}: {exc}") from None
            pos = mt.end()
        return cls(spec, tuple(letters))

    @classmethod
    def canonical(cls, spec: JetSpec) -> "ProlongationWord":
        zero = tuple(0 for _ in range(spec.m))
        return cls(spec, tuple(ProlongationLetter("R", zero) for _ in range(spec.n - 1)))

    def has_singular(self) -> bool:
        return any(l.kind == "S" for l in self.letters)

    def __str__(self) -> str:
        return " ".join(str(l) for l in self.letters)


def lift_vector_field(f: VectorField, chart: Chart) -> VectorField:
    """Extend a field from J^(n-1) to J^n with zero components on the new top coordinates."""
    src, dst = _jet_spec(f.chart), _jet_spec(chart)
    if src.m != dst.m or src.n + 1 != dst.n:
        raise ChartMismatchError(f"cannot lift from J^{src.n} (m={src.m}) to J^{dst.n} (m={dst.m})")
    zero = chart.zero()
    comps = [c.extend(chart.dim) for c in f.components] + [zero] * dst.m
    return VectorField(chart, comps)


def canonical_family(spec: JetSpec) -> list[VectorField]:
    """[d/dx_1^n, ..., d/dx_m^n, sum x_j^(i+1) d/dx_j^i + d/dx_0^0]."""
    chart = spec.chart()
    top = [VectorField.coordinate(chart, spec.index(spec.n, j)) for j in range(1, spec.m + 1)]
    comps = [chart.zero()] * spec.dim
    comps[0] = Polynomial.one(spec.dim)
    for i in range(spec.n):
        for j in range(1, spec.m + 1):
            comps[spec.index(i, j)] = chart.var(spec.index(i + 1, j))
    return top + [VectorField(chart, comps)]


def constant_parameter_family(spec: JetSpec, c: Sequence[Sequence]) -> list[VectorField]:
    """Top fields and sum_i sum_j (x_j^(i+1) + c[i][j-1]) d/dx_j^i + d/dx_0^0.

    ``c`` has n rows of m constants; row i shifts the coefficient x^(i+1).
    """
    if len(c) != spec.n or any(len(row) != spec.m for row in c):
        raise InputError(f"need {spec.n} rows of {spec.m} constants")
    family = canonical_family(spec)
    comps = list(family[-1].components)
    for i in range(spec.n):
        for j in range(1, spec.m + 1):
            k = spec.index(i, j)
            comps[k] = comps[k] + as_rational(c[i][j - 1])
    return family[:-1] + [VectorField(family[0].chart, comps)]


def jet_frame(spec: JetSpec) -> dict[tuple[int, int], VectorField]:
    """Coordinate fields d/dx_j^i keyed by (i, j), for 0 <= i <= n and 1 <= j <= m."""
    chart = spec.chart()
    return {(i, j): VectorField.coordinate(chart, spec.index(i, j))
            for i in range(spec.n + 1) for j in range(1, spec.m + 1)}


def canonical_contact_system(spec: JetSpec) -> Distribution:
    if spec.n < 1:
        raise InputError("the contact system needs n >= 1")
    return Distribution(spec.chart(), canonical_family(spec))


def prolong(family: Sequence[VectorField], letter: ProlongationLetter) -> list[VectorField]:
    """One regular (R) or singular (S) prolongation of ``[k_1..k_m, k_0]``."""
    spec = _jet_spec(family[0].chart)
    m = spec.m
    if len(family) != m + 1:
        raise InputError(f"a family on J^{spec.n} with m={m} has {m + 1} fields, got {len(family)}")
    if len(letter.c) != m:
        raise InputError(f"letter has {len(letter.c)} parameters, expected {m}")
    up = spec.higher()
    chart = up.chart()
    lifted = [lift_vector_field(f, chart) for f in family]
    ks, k0 = lifted[:m], lifted[m]
    top = [VectorField.coordinate(chart, up.index(up.n, j)) for j in range(1, m + 1)]

    def coef(j: int) -> Polynomial:
        return chart.var(up.index(up.n, j)) + letter.c[j - 1]

    if letter.kind == "R":
        drift = k0
        for j in range(1, m + 1):
            drift = drift + ks[j - 1].scale(coef(j))
    else:
        drift = ks[m - 1] + k0.scale(chart.var(up.index(up.n, m)))
        for j in range(1, m):
            drift = drift + ks[j - 1].scale(coef(j))
    return top + [drift]


def kumpera_ruiz_family(word: ProlongationWord) -> list[VectorField]:
    family = canonical_family(JetSpec(1, word.spec.m))
    for letter in word.letters:
        family = prolong(family, letter)
    return family


def generate_kumpera_ruiz(word: ProlongationWord) -> Distribution:
    family = kumpera_ruiz_family(word)
    return Distribution(family[0].chart, family)
