"""
Derived and Lie flags of distributions, derived flags of Pfaffian systems,
and regular-point tests.

Each flag level is stored as a generating family.  A new bracket is kept only
if it raises the generic rank or the rank at the base point; anything else is
redundant for every rank question asked later.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .errors import RankNotConstantError
from .exterior import (Distribution, OneForm, PfaffianSystem, exterior_derivative, kernel,
                       lie_bracket)
from .linalg import Echelon, RationalSpan, primitive_vector
from .parallel import parallel_map
from .poly import Polynomial

__all__ = [
    "FlagLevel",
    "FlagReport",
    "RegularityVerdict",
    "derived_flag",
    "derived_flag_forms",
    "is_regular_point",
    "lie_flag",
]


@dataclass(frozen=True)
class FlagLevel:
    generator_count: int
    generic_rank: int
    rank_at_base: int

    @property
    def constant(self) -> bool:
        return self.generic_rank == self.rank_at_base


@dataclass(frozen=True)
class FlagReport:
    kind: str
    levels: tuple[FlagLevel, ...]
    base_point: tuple
    dim: int

    @property
    def stabilized(self) -> bool:
        """Last two levels agree in generic and pointwise rank."""
        return (len(self.levels) >= 2
                and self.levels[-1].generic_rank == self.levels[-2].generic_rank
                and self.levels[-1].rank_at_base == self.levels[-2].rank_at_base)

    @property
    def full(self) -> bool:
        last = self.levels[-1]
        return last.generic_rank == last.rank_at_base == self.dim

    @property
    def generic_ranks(self) -> tuple[int, ...]:
        return tuple(l.generic_rank for l in self.levels)

    @property
    def ranks_at_base(self) -> tuple[int, ...]:
        return tuple(l.rank_at_base for l in self.levels)


@dataclass(frozen=True)
class RegularityVerdict:
    is_regular: bool
    first_defective_level: int | None = None
    report: FlagReport | None = field(default=None, compare=False)


class _Growing:
    """A generating family together with its generic and base-point spans."""

    def __init__(self, D: Distribution, base: tuple):
        self.chart = D.chart
        self.base = base
        self.gens = list(D.generators)
        n = D.chart.dim
        self.generic = Echelon([], n, n, base=base)
        self.at_base = RationalSpan(n)
        for g in self.gens:
            self.generic.add(g.components)
            self.at_base.add(g.evaluate(base))

    def offer(self, g) -> bool:
        if g.is_zero():
            return False
        new_generic = self.generic.add(g.components)
        new_base = self.at_base.add(g.evaluate(self.base))
        if new_generic or new_base:
            self.gens.append(g)
            return True
        return False

    def level(self) -> FlagLevel:
        return FlagLevel(len(self.gens), self.generic.rank, self.at_base.rank)

    def distribution(self) -> Distribution:
        d = Distribution(self.chart, self.gens)
        d._rank = self.generic.rank
        return d


def _flag(D: Distribution, base, max_level, kind: str, prune: bool):
    base = D.chart.point(base)
    if max_level is None:
        max_level = D.chart.dim
    if max_level < 0:
        raise ValueError("max_level must be non-negative")
    cur = _Growing(D, base)
    levels = [cur.level()]
    families = [cur.distribution()]
    first_new = 0
    root = list(cur.gens)
    for _ in range(max_level):
        last = levels[-1]
        if last.generic_rank == last.rank_at_base == D.chart.dim:
            break
        old = list(cur.gens)
        if kind == "derived":
            pairs = [(a, b) for a, b in combinations(range(len(old)), 2)
                     if prune is False or b >= first_new]
            left, right = old, old
        else:
            pairs = [(a, b) for a in range(len(root)) for b in range(len(old))
                     if (prune is False or b >= first_new) and not (b < len(root) and b <= a)]
            left, right = root, old
        brackets = parallel_map(lambda ab: lie_bracket(left[ab[0]], right[ab[1]]), pairs)
        nxt = _Growing(Distribution(D.chart, old), base)
        for g in brackets:
            if prune:
                nxt.offer(g)
            elif not g.is_zero():
                nxt.generic.add(g.components)
                nxt.at_base.add(g.evaluate(base))
                nxt.gens.append(g)
        first_new = len(old)
        cur = nxt
        levels.append(cur.level())
        families.append(cur.distribution())
        if levels[-1].generic_rank == levels[-2].generic_rank and \
                levels[-1].rank_at_base == levels[-2].rank_at_base:
            break
    return FlagReport(kind, tuple(levels), base, D.chart.dim), families


def derived_flag(D: Distribution, base: Sequence | None = None, max_level: int | None = None,
                 prune: bool = True) -> tuple[FlagReport, list[Distribution]]:
    """D^(i+1) = D^(i) + [D^(i), D^(i)], computed until stable, full, or ``max_level``.

    ``prune=False`` keeps every nonzero bracket; it exists as an exhaustive
    oracle for the pruned computation.
    """
    return _flag(D, base, max_level, "derived", prune)


def lie_flag(D: Distribution, base: Sequence | None = None, max_level: int | None = None,
             prune: bool = True) -> tuple[FlagReport, list[Distribution]]:
    """D_(i+1) = D_i + [D_0, D_i]."""
    return _flag(D, base, max_level, "lie", prune)


def is_regular_point(D: Distribution, base: Sequence | None = None) -> RegularityVerdict:
    report, _ = lie_flag(D, base)
    for i, lvl in enumerate(report.levels):
        if not lvl.constant:
            return RegularityVerdict(False, i, report)
    return RegularityVerdict(True, None, report)


# -- Pfaffian side ----------------------------------------------------------------

def _derived_forms_step(I: PfaffianSystem, base: tuple) -> PfaffianSystem:
    """Combinations a_k w_k of the generators with d(sum a_k w_k) = 0 mod I."""
    chart = I.chart
    forms = list(I.generators)
    if not forms:
        return I
    D = kernel(I, base).basis(base)
    frame = list(D.generators)
    dws = [exterior_derivative(w) for w in forms]
    rows = []
    for a, b in combinations(range(len(frame)), 2):
        rows.append([dw(frame[a], frame[b]) for dw in dws])
    if not rows:
        return I
    e = Echelon(rows, len(forms), chart.dim, base=base)
    out = []
    for coef in e.kernel():
        comps = [chart.zero()] * chart.dim
        for a, w in zip(coef, forms):
            if a:
                comps = [c + a * x for c, x in zip(comps, w.components)]
        out.append(OneForm(chart, primitive_vector(comps)))
    return PfaffianSystem(chart, out, e.det)


def derived_flag_forms(I: PfaffianSystem, base: Sequence | None = None,
                       max_level: int | None = None) -> tuple[FlagReport, list[PfaffianSystem]]:
    """I^(i+1) = {a in I^(i) : da = 0 mod I^(i)}.

    Raises ``RankNotConstantError`` (with ``.level``) as soon as some level
    has a rank at ``base`` different from its generic rank.
    """
    base = I.chart.point(base)
    if max_level is None:
        max_level = I.chart.dim
    systems = [I]
    levels = []
    cur = I
    for lvl in range(max_level + 1):
        r, rb = cur.generic_rank, cur.rank_at(base)
        levels.append(FlagLevel(len(cur.generators), r, rb))
        if r != rb:
            raise RankNotConstantError(
                f"level {lvl} of the derived system has rank {rb} at the base point, {r} generically",
                level=lvl)
        if r == 0 or lvl == max_level:
            break
        if len(levels) >= 2 and levels[-1].generic_rank == levels[-2].generic_rank:
            break
        cur = _derived_forms_step(cur.basis(base), base)
        systems.append(cur)
    return FlagReport("derived", tuple(levels), base, I.chart.dim), systems
