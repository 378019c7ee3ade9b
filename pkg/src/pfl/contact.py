"""
Classification of distributions (and Pfaffian systems) against the canonical
contact system for curves and its extended Kumpera-Ruiz normal forms.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .bryant import characteristic_distribution, decide_corank_one_involutive, engel_rank_le_one
from .errors import InputError, PreconditionError, RankNotConstantError
from .exterior import Distribution, PfaffianSystem, annihilator, kernel, lie_bracket
from .flags import derived_flag, derived_flag_forms, lie_flag
from .jets import JetSpec, ProlongationWord, generate_kumpera_ruiz

__all__ = [
    "CANONICAL",
    "EXTENDED_KR",
    "REJECTED",
    "ClassificationVerdict",
    "classify_contact",
    "classify_pfaffian",
    "infer_contact_spec",
    "kr_signature_at_point",
]

CANONICAL = "canonical_equivalent"
EXTENDED_KR = "extended_kr"
REJECTED = "rejected"


@dataclass
class ClassificationVerdict:
    status: str
    n: int
    m: int
    derived_ranks: list = field(default_factory=list)
    lie_ranks_at_base: list = field(default_factory=list)
    corank_one_witness_per_level: list = field(default_factory=list)
    failure_reason: dict | None = None
    word: ProlongationWord | None = None
    mode: str = "contact"
    derived_ranks_at_base: list = field(default_factory=list)
    cartan_ranks: list = field(default_factory=list)
    engel_rank_one: list = field(default_factory=list)
    witnesses: dict = field(default_factory=dict, compare=False, repr=False)

    def _reject(self, level: int | None, condition: str, detail: str) -> "ClassificationVerdict":
        self.status = REJECTED
        self.failure_reason = {"level": level, "condition": condition, "detail": detail}
        return self


def infer_contact_spec(dim: int, rank: int) -> JetSpec:
    """(n, m) from dim = (n+1)m + 1 and rank = m + 1."""
    m = rank - 1
    if m < 1:
        raise InputError(f"rank {rank} is too small for a contact system (need m = rank - 1 >= 1)")
    if (dim - 1) % m:
        raise InputError(f"no jet space fits: (dim - 1)/m = {dim - 1}/{m} is not an integer")
    n = (dim - 1) // m - 1
    if n < 1:
        raise InputError(f"no jet space fits: dim {dim} with m = {m} gives n = {n}")
    return JetSpec(n, m)


def classify_contact(D: Distribution, base: Sequence | None = None) -> ClassificationVerdict:
    """Canonical-contact / extended Kumpera-Ruiz / rejected verdict at ``base``."""
    base = D.chart.point(base)
    spec = infer_contact_spec(D.chart.dim, D.generic_rank)
    n, m = spec.n, spec.m
    v = ClassificationVerdict(REJECTED, n, m)
    report, fams = derived_flag(D, base, max_level=n)
    v.derived_ranks = list(report.generic_ranks)
    v.derived_ranks_at_base = list(report.ranks_at_base)
    for i in range(n + 1):
        want = (i + 1) * m + 1
        if i >= len(report.levels):
            return v._reject(i, "derived_rank", f"derived flag stopped before level {i}")
        lvl = report.levels[i]
        if lvl.generic_rank != want:
            return v._reject(i, "derived_rank", f"generic rank {lvl.generic_rank}, expected {want}")
        if lvl.rank_at_base != want:
            return v._reject(i, "derived_rank_constant",
                             f"rank {lvl.rank_at_base} at the base point, expected {want}")
    # corank-one involutive witnesses
    chars: dict[int, Distribution] = {}
    for i in range(n + 1):
        if i == n:
            v.corank_one_witness_per_level.append(True)
            v.witnesses[i] = {"kind": "automatic"}
            continue
        if i <= n - 2:
            if i + 1 not in chars:
                chars[i + 1] = characteristic_distribution(fams[i + 1], base)
            L = chars[i + 1]
            want = (i + 1) * m
            ok = (L.generic_rank == want and L.rank_at(base) == want
                  and fams[i].includes(L) and L.is_involutive())
            v.corank_one_witness_per_level.append(ok)
            v.witnesses[i] = {"kind": "characteristic", "L": L}
            if not ok:
                return v._reject(i, "corank_one_involutive",
                                 f"characteristic distribution of level {i + 1} is not a corank-one "
                                 f"involutive subdistribution of level {i}")
        else:
            try:
                cv = decide_corank_one_involutive(fams[i], base)
            except (PreconditionError, RankNotConstantError) as exc:
                v.corank_one_witness_per_level.append(False)
                return v._reject(i, "corank_one_involutive", str(exc))
            v.corank_one_witness_per_level.append(cv.exists)
            v.witnesses[i] = {"kind": "bryant", "verdict": cv, "L": cv.L_witness,
                              "C": cv.characteristic, "B": cv.B}
            if not cv.exists:
                return v._reject(i, "corank_one_involutive", cv.detail or "no witness")
    lie, _ = lie_flag(D, base, max_level=n)
    v.lie_ranks_at_base = list(lie.ranks_at_base)
    regular = all(i < len(lie.levels) and lie.levels[i].rank_at_base == (i + 1) * m + 1
                  for i in range(n + 1))
    v.status = CANONICAL if regular else EXTENDED_KR
    return v


def classify_pfaffian(I: PfaffianSystem, base: Sequence | None = None) -> ClassificationVerdict:
    """Verdict for a Pfaffian system of rank nm on a chart of dimension (n+1)m+1, m != 2."""
    base = I.chart.point(base)
    N = I.chart.dim
    s = I.generic_rank
    m = N - s - 1
    if m < 1 or s % m or s // m < 1:
        raise InputError(f"rank {s} on a {N}-dimensional chart does not fit rank nm with dim (n+1)m+1")
    if m == 2:
        raise InputError("m = 2 is not covered by the Pfaffian criterion; use classify_contact")
    n = s // m
    v = ClassificationVerdict(REJECTED, n, m, mode="pfaffian")
    try:
        report, systems = derived_flag_forms(I, base, max_level=n)
    except RankNotConstantError as exc:
        return v._reject(exc.level, "derived_rank_constant", str(exc))
    v.derived_ranks = list(report.generic_ranks)
    v.derived_ranks_at_base = list(report.ranks_at_base)
    for i in range(n + 1):
        want = (n - i) * m
        if i >= len(report.levels) or report.levels[i].generic_rank != want:
            got = report.levels[i].generic_rank if i < len(report.levels) else None
            return v._reject(i, "derived_rank", f"rank {got}, expected {want}")
    for i in range(n):
        Ii = systems[i].basis(base)
        ok = engel_rank_le_one(Ii, base)
        v.engel_rank_one.append(ok)
        if not ok:
            return v._reject(i, "engel_rank", "Engel rank exceeds one")
    for i in range(n):
        Di = kernel(systems[i].basis(base), base)
        C = characteristic_distribution(Di, base)
        want = (n + 1 - i) * m + 1
        got, got_base = N - C.generic_rank, N - C.rank_at(base)
        v.cartan_ranks.append(got)
        v.witnesses[i] = {"kind": "characteristic", "C": C}
        if got != want or got_base != want:
            return v._reject(i, "cartan_rank", f"Cartan system rank {got} (at base {got_base}), expected {want}")
    D = kernel(I, base)
    lie, _ = lie_flag(D, base, max_level=n)
    v.lie_ranks_at_base = list(lie.ranks_at_base)
    regular = all(i < len(lie.levels) and lie.levels[i].rank_at_base == (i + 1) * m + 1
                  for i in range(n + 1))
    v.status = CANONICAL if regular else EXTENDED_KR
    return v


def kr_signature_at_point(word: ProlongationWord, base: Sequence | None = None) -> str:
    """'regular' iff the Lie flag of the generated family has full ranks (i+1)m+1 at ``base``."""
    D = generate_kumpera_ruiz(word)
    n, m = word.spec.n, word.spec.m
    lie, _ = lie_flag(D, base, max_level=n)
    ok = all(i < len(lie.levels) and lie.levels[i].rank_at_base == (i + 1) * m + 1
             for i in range(n + 1))
    return "regular" if ok else "singular"
