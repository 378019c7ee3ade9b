"""
Engel-rank tests, structure functions, characteristic distributions and the
decision procedure for corank-one involutive subdistributions.

Notation: D = D^(0) has rank d0, D^(1) = D + [D, D] has rank d1, r0 = d1 - d0.
For w in the annihilator of D and f, g in D we use dw(f, g) = -w([f, g]).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement
from typing import Sequence

from gmpy2 import mpq

from .errors import InconsistencyError, InternalError, PreconditionError, RankNotConstantError
from .exterior import (Distribution, OneForm, PfaffianSystem, VectorField, annihilator,
                       exterior_derivative, kernel, lie_bracket, wedge_components)
from .linalg import Echelon, RationalSpan, _random_points, primitive_vector
from .parallel import parallel_map
from .poly import Polynomial

__all__ = [
    "CorankOneVerdict",
    "StructureFunctions",
    "characteristic_by_brackets",
    "characteristic_distribution",
    "corank_one_B",
    "decide_corank_one_involutive",
    "engel_rank_le_one",
    "engel_relations_check",
    "first_derived",
    "structure_functions",
    "w_space",
]


def _combine(chart, coefs: Sequence[Polynomial], fields: Sequence[VectorField]) -> VectorField:
    comps = [chart.zero()] * chart.dim
    for a, f in zip(coefs, fields):
        if a:
            comps = [c + a * x if x else c for c, x in zip(comps, f.components)]
    return VectorField(chart, primitive_vector(comps))


def _require_constant(D: Distribution, base, what: str) -> None:
    r, rb = D.generic_rank, D.rank_at(base)
    if r != rb:
        raise RankNotConstantError(f"{what} has rank {rb} at the base point but {r} generically")


def first_derived(D: Distribution, base: Sequence | None = None) -> Distribution:
    """D + [D, D], pruned to generators that raise the generic or base rank."""
    from .flags import derived_flag
    _, fams = derived_flag(D, base, max_level=1)
    return fams[-1]


def _span_distribution(chart, fields: Sequence[VectorField], base) -> Distribution:
    """Subfamily of ``fields`` spanning them both generically and at ``base``."""
    n = chart.dim
    e = Echelon([], n, n, base=base)
    at = RationalSpan(n)
    keep = []
    for f in fields:
        if f.is_zero():
            continue
        g, b = e.add(f.components), at.add(f.evaluate(base))
        if g or b:
            keep.append(f)
    d = Distribution(chart, keep)
    d._rank = e.rank
    return d


# -- characteristic distribution ----------------------------------------------------

def _frame(D: Distribution, base) -> list[VectorField]:
    _require_constant(D, base, "the distribution")
    return list(D.basis(base).generators)


def characteristic_by_forms(D: Distribution, base: Sequence | None = None) -> Distribution:
    """Combinations f = sum a_i f_i with f _| dw = 0 mod the annihilator (cond-C)."""
    base = D.chart.point(base)
    frame = _frame(D, base)
    forms = annihilator(D, base).generators
    dws = [exterior_derivative(w) for w in forms]
    rows = [[dw(frame[i], frame[b]) for i in range(len(frame))]
            for dw in dws for b in range(len(frame))]
    return _solve_combinations(D, frame, rows, base)


def characteristic_by_brackets(D: Distribution, base: Sequence | None = None) -> Distribution:
    """Combinations f = sum a_i f_i with sum a_i [f_i, f_b] = 0 mod D for every b."""
    base = D.chart.point(base)
    frame = _frame(D, base)
    e = Echelon([f.components for f in frame], D.chart.dim, D.chart.dim, base=base)
    res = {}
    for i, b in combinations(range(len(frame)), 2):
        r = e.residual(lie_bracket(frame[i], frame[b]).components)
        res[(i, b)] = r
        res[(b, i)] = [-x for x in r]
    zero = D.chart.zero()
    rows = []
    for b in range(len(frame)):
        for k in range(D.chart.dim):
            rows.append([zero if i == b else res[(i, b)][k] for i in range(len(frame))])
    return _solve_combinations(D, frame, rows, base)


def _solve_combinations(D, frame, rows, base) -> Distribution:
    rows = [r for r in rows if any(r)]
    e = Echelon(rows, len(frame), D.chart.dim, base=base)
    gens = [_combine(D.chart, v, frame) for v in e.kernel()]
    out = Distribution(D.chart, gens, e.det)
    out._rank = len(gens)
    return out


def characteristic_distribution(D: Distribution, base: Sequence | None = None) -> Distribution:
    """All f in D with [f, D] in D.

    Computed from the structure of dw for w in the annihilator, then checked
    against the bracket definition: every returned generator h must satisfy
    [h, f] in D for every generator f.  A mismatch raises ``InternalError``.
    """
    base = D.chart.point(base)
    C = characteristic_by_forms(D, base)
    _require_constant(first_derived(D, base), base, "the first derived distribution")
    e = D.echelon()
    for h in C.generators:
        for f in D.generators:
            if not e.contains(lie_bracket(h, f).components):
                raise InternalError("characteristic generator fails the bracket definition")
    return C


# -- structure functions ---------------------------------------------------------

@dataclass
class StructureFunctions:
    """c_ij^k = table[(i, j)][k] / denominator for i < j, with [f_i, f_j] = sum c_ij^k g_k mod D0."""

    frame: tuple[VectorField, ...]
    complement: tuple[VectorField, ...]
    table: dict
    denominator: Polynomial
    residual_check: bool

    @property
    def d0(self) -> int:
        return len(self.frame)

    @property
    def r0(self) -> int:
        return len(self.complement)

    def numerator(self, i: int, j: int, k: int) -> Polynomial:
        if i == j:
            return self.denominator.zero(self.denominator.nvars)
        if i < j:
            return self.table[(i, j)][k]
        return -self.table[(j, i)][k]

    def c(self, i: int, j: int, k: int):
        """c_ij^k as a (numerator, denominator) pair; antisymmetric in (i, j)."""
        return self.numerator(i, j, k), self.denominator


def structure_functions(D0: Distribution, D1: Distribution,
                        base: Sequence | None = None) -> StructureFunctions:
    base = D0.chart.point(base)
    _require_constant(D0, base, "D0")
    _require_constant(D1, base, "D1")
    if not D1.includes(D0):
        raise PreconditionError("D0 is not contained in D1")
    r0 = D1.generic_rank - D0.generic_rank
    if r0 < 1:
        raise PreconditionError("r0 = d1 - d0 must be at least 1")
    frame = list(D0.basis(base).generators)
    n = D0.chart.dim
    at = RationalSpan(n)
    for f in frame:
        at.add(f.evaluate(base))
    comp = [g for g in D1.generators if at.add(g.evaluate(base))]
    if len(comp) != r0:
        raise RankNotConstantError("cannot complete D0 to D1 at the base point")
    basis = frame + comp
    e = Echelon([v.components for v in basis], n, n, base=base, track=True)
    if not e.det.evaluate(base):
        raise PreconditionError("decomposition is not solvable at the base point")
    e0 = Echelon([f.components for f in frame], n, n, base=base)
    table = {}
    ok = True
    d0 = len(frame)
    for i, j in combinations(range(d0), 2):
        br = lie_bracket(frame[i], frame[j])
        den, nums = e.coordinates(br.components)
        cs = nums[d0:]
        table[(i, j)] = cs
        rest = [den * x for x in br.components]
        for c, g in zip(cs, comp):
            if c:
                rest = [r - c * x for r, x in zip(rest, g.components)]
        ok = ok and e0.contains(rest)
    if not ok:
        raise InternalError("structure-function residual is not in D0")
    return StructureFunctions(tuple(frame), tuple(comp), table, e.det, ok)


def engel_relations_check(S: StructureFunctions) -> bool:
    """The quadratic sextuple identities among the c_ij^k (trivially true for d0 <= 3)."""
    if S.d0 <= 3:
        return True
    c = S.numerator
    for i, j, k, l in combinations(range(S.d0), 4):
        for p, q in combinations_with_replacement(range(S.r0), 2):
            e = (c(i, j, p) * c(k, l, q) - c(i, k, p) * c(j, l, q) + c(i, l, p) * c(j, k, q)
                 + c(j, k, p) * c(i, l, q) - c(j, l, p) * c(i, k, q) + c(k, l, p) * c(i, j, q))
            if e:
                return False
    return True


# -- Engel rank via forms ---------------------------------------------------------

def _kernel_frame(I: PfaffianSystem, base, frame: Distribution | None) -> list[VectorField]:
    if frame is None:
        return list(kernel(I, base).basis(base).generators)
    vs = list(frame.basis(base).generators)
    if len(vs) != I.chart.dim - I.rank_at(base):
        raise PreconditionError("frame does not have the rank of the kernel of the Pfaffian system")
    if any(w(f) for w in I.generators for f in vs):
        raise PreconditionError("frame is not annihilated by the Pfaffian system")
    return vs


def _restricted_two_forms(I: PfaffianSystem, base,
                          frame: Distribution | None = None) -> tuple[list[VectorField], list[dict]]:
    vs = _kernel_frame(I, base, frame)
    out = []
    for w in I.generators:
        dw = exterior_derivative(w)
        comps = {}
        for a, b in combinations(range(len(vs)), 2):
            v = dw(vs[a], vs[b])
            if v:
                comps[(a, b)] = v
        out.append(comps)
    return vs, out


def engel_rank_le_one(I: PfaffianSystem, base: Sequence | None = None,
                      frame: Distribution | None = None) -> bool:
    """True iff dw_i ^ dw_j = 0 mod I for all generator pairs i <= j.

    A 4-form lies in the ideal of I exactly when it vanishes on the kernel
    distribution, so each wedge is evaluated on a frame of that kernel.  By
    polarization the pairs i <= j of a generating family cover every w in I.
    ``frame`` may supply a spanning family of the kernel (for instance the
    distribution I was computed from); it is checked, and it keeps the
    polynomials far smaller than a kernel rebuilt from I.
    """
    base = I.chart.point(base)
    if I.rank_at(base) != len(I.generators):
        raise PreconditionError("generators of the Pfaffian system are not independent at the base point")
    vs, restricted = _restricted_two_forms(I, base, frame)
    if len(vs) < 4:
        return True
    pairs = list(combinations_with_replacement(range(len(restricted)), 2))
    # a nonzero value at any point already certifies a nonzero wedge
    for pt in _random_points(I.chart.dim, 2):
        values = [{k: v.evaluate(pt) for k, v in r.items()} for r in restricted]
        if any(wedge_components(values[i], values[j], mpq(0)) for i, j in pairs):
            return False
    zero = I.chart.zero()
    results = parallel_map(lambda ij: not wedge_components(restricted[ij[0]], restricted[ij[1]], zero),
                           pairs)
    return all(results)


# -- W spaces and B ------------------------------------------------------------------

def w_space(D: Distribution, w: OneForm, base: Sequence | None = None,
            frame: Sequence[VectorField] | None = None) -> Distribution:
    """W(w) = {f in D : f _| dw in the annihilator of D}."""
    base = D.chart.point(base)
    frame = list(frame) if frame is not None else _frame(D, base)
    dw = exterior_derivative(w)
    rows = [[dw(frame[i], frame[b]) for i in range(len(frame))] for b in range(len(frame))]
    return _solve_combinations(D, frame, rows, base)


def _complementary_forms(D0: Distribution, D1: Distribution, base) -> list[OneForm]:
    """r0 annihilator forms of D0 completing the annihilator of D1."""
    n = D0.chart.dim
    I1 = annihilator(D1, base)
    I0 = annihilator(D0, base)
    e = Echelon([], n, n, base=base)
    at = RationalSpan(n)
    for w in I1.generators:
        e.add(w.components)
        at.add(w.evaluate(base))
    out = []
    for w in sorted(I0.generators, key=lambda w: [c.terms() for c in w.components], reverse=True):
        if at.contains(w.evaluate(base)):
            continue
        if e.add(w.components):
            at.add(w.evaluate(base))
            out.append(w)
    return out


def corank_one_B(D: Distribution, base: Sequence | None = None,
                 terms: Sequence[int] | None = None, check: bool = True) -> Distribution:
    """The corank-one subdistribution B = sum W(w_i) of D with [B, B] in D.

    ``terms`` restricts the sum to the listed complementary forms (indices
    into w_1..w_r0); by default all r0 are used.
    """
    base = D.chart.point(base)
    frame = _frame(D, base)
    D1 = first_derived(D, base)
    _require_constant(D1, base, "the first derived distribution")
    d0, r0 = len(frame), D1.generic_rank - len(frame)
    if r0 < 2:
        raise PreconditionError(f"B is defined for r0 >= 2, got r0 = {r0}")
    if check:
        C = characteristic_distribution(D, base)
        if C.generic_rank != d0 - r0 - 1 or C.rank_at(base) != d0 - r0 - 1:
            raise PreconditionError("characteristic rank differs from d0 - r0 - 1")
        if not engel_rank_le_one(annihilator(D, base), base, frame=D):
            raise PreconditionError("Engel rank exceeds one")
    forms = _complementary_forms(D, D1, base)
    if terms is not None:
        forms = [forms[i] for i in terms]
    ws = parallel_map(lambda w: w_space(D, w, base, frame), forms)
    fields = [f for W in ws for f in W.generators]
    B = _span_distribution(D.chart, fields, base)
    if B.generic_rank != d0 - 1 or B.rank_at(base) != d0 - 1:
        raise InconsistencyError(
            f"B has rank {B.generic_rank} (at base {B.rank_at(base)}), expected corank one in rank {d0}")
    e = D.echelon()
    for a, b in combinations(range(len(B.generators)), 2):
        if not e.contains(lie_bracket(B[a], B[b]).components):
            raise InconsistencyError("[B, B] is not contained in D")
    return B


@dataclass
class CorankOneVerdict:
    exists: bool
    r0: int
    char_rank_ok: bool
    engel_rank_one: bool
    B: Distribution | None = field(default=None, compare=False)
    B_involutive: bool | None = None
    L_witness: Distribution | None = field(default=None, compare=False)
    characteristic: Distribution | None = field(default=None, compare=False)
    detail: str | None = None


def decide_corank_one_involutive(D: Distribution, base: Sequence | None = None) -> CorankOneVerdict:
    """Does D contain an involutive subdistribution of constant corank one near ``base``?

    Checks: characteristic rank d0 - r0 - 1, Engel rank one, and for r0 = 2
    involutivity of B.  For r0 = 1 only existence is reported.
    """
    base = D.chart.point(base)
    _require_constant(D, base, "the distribution")
    D1 = first_derived(D, base)
    _require_constant(D1, base, "the first derived distribution")
    d0 = D.generic_rank
    r0 = D1.generic_rank - d0
    if r0 < 1:
        raise PreconditionError("the distribution is involutive (r0 = 0)")
    C = characteristic_distribution(D, base)
    char_ok = C.generic_rank == d0 - r0 - 1 and C.rank_at(base) == d0 - r0 - 1
    engel_ok = engel_rank_le_one(annihilator(D, base), base, frame=D)
    verdict = CorankOneVerdict(False, r0, char_ok, engel_ok, characteristic=C)
    if not (char_ok and engel_ok):
        verdict.detail = "characteristic rank" if not char_ok else "Engel rank"
        return verdict
    if r0 == 1:
        verdict.exists = True
        return verdict
    try:
        B = corank_one_B(D, base, check=False)
    except InconsistencyError as exc:
        verdict.detail = str(exc)
        return verdict
    inv = B.is_involutive()
    verdict.B = B
    verdict.B_involutive = inv
    verdict.exists = inv or r0 >= 3
    if inv:
        verdict.L_witness = B
    elif r0 >= 3:
        raise InconsistencyError("B is not involutive although r0 >= 3")
    else:
        verdict.detail = "B is not involutive"
    return verdict
