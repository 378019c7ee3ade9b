"""
Reduction of a family in iterated Weber form to an extended Kumpera-Ruiz
normal form, and the linear fractional maps used to build the coordinates.

A family on J^k is in Weber form when every generator has the shape
``sum_j nu_j d/dy_j^k + nu_0 V`` with a single lower field
``V = sum_j y_j^k W_j + W_0`` whose coefficients do not involve y^k.  The
lower family ``[W_1, ..., W_m, W_0]`` on J^(k-1) must again be in Weber form,
down to J^0, where any frame is accepted.

The recursion builds, level by level, a map phi^k (given by rational
functions of y) and a matrix mu^k of rational functions with

    J phi^k . zeta_i = sum_j mu^k_ij  kappa^k_j o phi^k,

where kappa^k is the Kumpera-Ruiz family being recovered.  Matrix rows and
columns use index 0 for the drift field and 1..m for the top fields, while
families are listed drift-last as ``[z_1, ..., z_m, z_0]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .errors import InputError, InternalError, ReductionError
from .exterior import Chart, VectorField
from .jets import JetSpec, ProlongationLetter, ProlongationWord, canonical_family, prolong
from .linalg import rational_determinant
from .poly import Polynomial, Rational, as_rational
from .ratfunc import RationalFunction, compose_rational

__all__ = [
    "KRReduction",
    "LevelTrace",
    "kr_reduce",
    "mobius_is_diffeo",
    "mobius_jacobian_at_zero",
    "mobius_map",
]


# -- linear fractional maps -----------------------------------------------------------

def _blocks(M: Sequence[Sequence]) -> tuple[list, list, list, Rational]:
    n = len(M)
    if n < 2 or any(len(r) != n for r in M):
        raise InputError("a square matrix of size at least 2 is required")
    M = [[as_rational(v) for v in row] for row in M]
    A = [row[:-1] for row in M[:-1]]
    b = [row[-1] for row in M[:-1]]
    c = M[-1][:-1]
    d = M[-1][-1]
    return A, b, c, d


def mobius_is_diffeo(M: Sequence[Sequence]) -> bool:
    """Whether x -> (Ax + b)/(cx + d) is a local diffeomorphism at 0, i.e. det M != 0."""
    _, _, _, d = _blocks(M)
    if not d:
        raise InputError("the corner entry d must be nonzero")
    return rational_determinant(M) != 0


def mobius_map(M: Sequence[Sequence]) -> list[RationalFunction]:
    """Components of (Ax + b)/(cx + d) on R^(n-1)."""
    A, b, c, d = _blocks(M)
    if not d:
        raise InputError("the corner entry d must be nonzero")
    k = len(A)
    xs = Polynomial.variables(k)
    den = Polynomial.constant(k, d)
    for j in range(k):
        den = den + xs[j].scale(c[j])
    out = []
    for i in range(k):
        num = Polynomial.constant(k, b[i])
        for j in range(k):
            num = num + xs[j].scale(A[i][j])
        out.append(RationalFunction(num, den))
    return out


def mobius_jacobian_at_zero(M: Sequence[Sequence]) -> list[list[Rational]]:
    """Derivative at 0 of (Ax + b)/(cx + d): (A d - b c) / d^2."""
    A, b, c, d = _blocks(M)
    if not d:
        raise InputError("the corner entry d must be nonzero")
    k = len(A)
    return [[(A[i][j] * d - b[i] * c[j]) / (d * d) for j in range(k)] for i in range(k)]


# -- reduction ----------------------------------------------------------------------

@dataclass
class LevelTrace:
    level: int
    branch: str
    c: tuple
    mu: list = field(repr=False)
    mu_at_base: list = field(default_factory=list)
    note: str | None = None


@dataclass
class KRReduction:
    word: ProlongationWord
    levels: list
    phi: list = field(repr=False)
    base: tuple = ()

    @property
    def mu_chain(self) -> list:
        return [t.mu for t in self.levels]


@dataclass
class _State:
    spec: JetSpec
    phi: list          # RationalFunction components, functions of y on J^k
    mu: list           # (m+1) x (m+1) RationalFunction matrix, drift-first indexing
    kappa: list        # recovered family [k_1..k_m, k_0] on the x-chart of J^k
    letters: list
    trace: list


def _drift_first_index(m: int, pos: int) -> int:
    return 0 if pos == m else pos + 1


def _family_pos(m: int, i: int) -> int:
    return m if i == 0 else i - 1


def _translate(fields: Sequence[VectorField], base: tuple) -> list[VectorField]:
    if not any(base):
        return list(fields)
    n = len(base)
    shift = [Polynomial.variable(n, i) + base[i] for i in range(n)]
    return [VectorField(f.chart, [c.compose(shift) for c in f.components]) for f in fields]


def _check_invertible_at_zero(mu, level: int) -> list[list[Rational]]:
    n = len(mu)
    zero = (mpq(0),) * mu[0][0].nvars
    try:
        at = [[mu[i][j].evaluate(zero) for j in range(n)] for i in range(n)]
    except ZeroDivisionError:
        raise ReductionError(f"mu matrix is not defined at the base point (level {level})", level) from None
    if rational_determinant(at) == 0:
        raise ReductionError(f"mu matrix is singular at the base point (level {level})", level)
    return at


def _reduce_level0(fields: Sequence[VectorField], m: int) -> _State:
    spec = JetSpec(0, m)
    n = spec.dim
    comp = [[RationalFunction(fields[_family_pos(m, i)][j]) for j in range(n)] for i in range(n)]
    at = _check_invertible_at_zero(comp, 0)
    v = at[0]
    r = 0 if v[0] else max(j for j in range(n) if v[j])
    # T = (swap columns 0 and r) followed by a shear clearing row 0 beyond column 0
    P = [[mpq(1) if (i == j and i not in (0, r)) or {i, j} == {0, r} or (i == j == 0 == r) else mpq(0)
          for j in range(n)] for i in range(n)]
    w = [sum(v[k] * P[k][j] for k in range(n)) for j in range(n)]
    E = [[mpq(1) if i == j else mpq(0) for j in range(n)] for i in range(n)]
    for j in range(1, n):
        E[0][j] = -w[j] / w[0]
    T = [[sum(P[i][k] * E[k][j] for k in range(n)) for j in range(n)] for i in range(n)]
    ys = Polynomial.variables(n)
    phi = []
    for j in range(n):
        p = Polynomial.zero(n)
        for k in range(n):
            if T[k][j]:
                p = p + ys[k].scale(T[k][j])
        phi.append(RationalFunction(p))
    mu = [[sum((comp[i][k] * T[k][j] for k in range(n) if T[k][j]), RationalFunction.zero(n))
           for j in range(n)] for i in range(n)]
    chart = spec.chart()
    kappa = [VectorField.coordinate(chart, j) for j in range(1, m + 1)] + [VectorField.coordinate(chart, 0)]
    note = "identity" if r == 0 and not any(w[1:]) else f"swap x0_0 <-> x{r}_0, shear" if r else "shear"
    trace = [LevelTrace(0, "frame", (), mu, _check_invertible_at_zero(mu, 0), note)]
    return _State(spec, phi, mu, kappa, [], trace)


def _weber_split(fields: Sequence[VectorField], spec: JetSpec, top_level: bool):
    """nu matrix (drift-first indexing), the lower field V and the lower family on J^(k-1)."""
    m, k = spec.m, spec.n
    low = spec.lower()
    nlow = low.dim
    top_idx = [spec.index(k, j) for j in range(1, m + 1)]
    lowers = [list(f.components[:nlow]) for f in fields]
    nonzero = [pos for pos in range(m + 1) if any(lowers[pos])]
    if not nonzero:
        raise ReductionError(f"no generator has a component below the top level (level {k})", k)
    if top_level:
        bad = [pos for pos in nonzero if pos != m]
        if bad:
            raise ReductionError(
                f"generator {bad[0]} is not a combination of top-level coordinate fields", k, bad[0])
    zero_pt = (mpq(0),) * spec.dim
    piv = m if m in nonzero else next((p for p in nonzero
                                       if any(c.evaluate(zero_pt) for c in lowers[p])), nonzero[0])
    V = lowers[piv]
    cidx = next((c for c in range(nlow) if V[c] and V[c].evaluate(zero_pt)),
                next(c for c in range(nlow) if V[c]))
    nu = [[None] * (m + 1) for _ in range(m + 1)]
    for pos, f in enumerate(fields):
        i = _drift_first_index(m, pos)
        lw = lowers[pos]
        for a in range(nlow):
            if lw[a] * V[cidx] != V[a] * lw[cidx]:
                raise ReductionError(
                    f"generator {pos} has a lower part not proportional to the drift (level {k})", k, pos)
        nu[i][0] = RationalFunction(lw[cidx], V[cidx]) if lw[cidx] else RationalFunction.zero(spec.dim)
        for j in range(1, m + 1):
            nu[i][j] = RationalFunction(f.components[top_idx[j - 1]])
    # V = sum_j y_j^k W_j + W_0 with coefficients free of y^k
    W = [[None] * nlow for _ in range(m + 1)]
    unit = {tuple(1 if t == j else 0 for t in range(m)): j + 1 for j in range(m)}
    unit[(0,) * m] = 0
    for a in range(nlow):
        parts = V[a].split(top_idx) if V[a] else {}
        for key, p in parts.items():
            if key not in unit:
                raise ReductionError(
                    f"generator {piv} is not affine in the top-level coordinates (level {k})", k, piv)
        for key, j in unit.items():
            p = parts.get(key)
            W[j][a] = p.truncate(nlow) if p is not None else Polynomial.zero(nlow)
    lchart = low.chart()
    lower_family = [VectorField(lchart, W[j]) for j in range(1, m + 1)] + [VectorField(lchart, W[0])]
    Vfield = VectorField(fields[0].chart, V + [Polynomial.zero(spec.dim)] * m)
    return nu, Vfield, lower_family


def _reduce(fields: Sequence[VectorField], spec: JetSpec, top_level: bool, verify: bool) -> _State:
    m, k = spec.m, spec.n
    if k == 0:
        return _reduce_level0(fields, m)
    nu, V, lower_family = _weber_split(fields, spec, top_level)
    st = _reduce(lower_family, spec.lower(), False, verify)
    dim = spec.dim
    zero_pt = (mpq(0),) * dim
    mu1 = [[e.extend(dim) for e in row] for row in st.mu]
    ys = [RationalFunction(Polynomial.variable(dim, spec.index(k, j))) for j in range(1, m + 1)]
    a00 = mu1[0][0].evaluate(zero_pt)
    if a00:
        branch, col = "regular", 0
    else:
        branch, col = "singular", m
        if not mu1[0][m].evaluate(zero_pt):
            raise ReductionError(
                f"singular branch at level {k} needs mu_0m != 0 at the base point", k)
    den = mu1[0][col]
    for i in range(1, m + 1):
        if mu1[i][col]:
            den = den + mu1[i][col] * ys[i - 1]
    d0 = den.evaluate(zero_pt)
    phi_top, c = [], []
    for j in range(1, m + 1):
        src = 0 if (branch == "singular" and j == m) else j
        num = mu1[0][src]
        for i in range(1, m + 1):
            if mu1[i][src]:
                num = num + mu1[i][src] * ys[i - 1]
        cj = mu1[0][src].evaluate(zero_pt) / d0 if src else mpq(0)
        c.append(cj)
        phi_top.append(num / den - cj)
    phi = [p.extend(dim) for p in st.phi] + phi_top
    if k == 1:
        if branch != "regular" or any(c):
            raise InternalError("first-order level did not normalize to the canonical frame")
        letter = None
        kappa = canonical_family(JetSpec(1, m))
    else:
        letter = ProlongationLetter("R" if branch == "regular" else "S", tuple(c))
        kappa = prolong(st.kappa, letter)
    # mu for the Weber family (d/dy_1..d/dy_m, V), then mu = nu . muZ
    muZ = [[RationalFunction.zero(dim)] * (m + 1) for _ in range(m + 1)]
    muZ[0][0] = den
    for j in range(1, m + 1):
        muZ[0][j] = phi_top[j - 1].derivative(V)
        for i in range(1, m + 1):
            muZ[i][j] = phi_top[j - 1].diff(spec.index(k, i))
    mu = [[sum((nu[i][l] * muZ[l][j] for l in range(m + 1) if nu[i][l] and muZ[l][j]),
               RationalFunction.zero(dim)) for j in range(m + 1)] for i in range(m + 1)]
    at = _check_invertible_at_zero(mu, k)
    if verify:
        _verify(fields, phi, mu, kappa, k)
    trace = st.trace + [LevelTrace(k, branch, tuple(c), mu, at)]
    letters = st.letters + ([letter] if letter else [])
    return _State(spec, phi, mu, kappa, letters, trace)


def _verify(fields, phi, mu, kappa, level: int) -> None:
    """J phi . zeta_i == sum_j mu_ij kappa_j o phi, cross-multiplied."""
    m = len(fields) - 1
    dim = len(phi)
    kap = [[compose_rational(c, phi) if not c.is_constant() else RationalFunction.constant(dim, c.constant_term())
            for c in kf.components] for kf in kappa]
    for pos, f in enumerate(fields):
        i = _drift_first_index(m, pos)
        for comp in range(dim):
            lhs = phi[comp].derivative(f)
            rhs = RationalFunction.zero(dim)
            for j in range(m + 1):
                kj = kap[_family_pos(m, j)][comp]
                if mu[i][j] and kj:
                    rhs = rhs + mu[i][j] * kj
            if lhs != rhs:
                raise InternalError(
                    f"pushforward identity fails for generator {pos}, component {comp} (level {level})")


def kr_reduce(family: Sequence[VectorField], base: Sequence | None = None,
              verify: bool = True) -> KRReduction:
    """Recover the prolongation word of a family given in iterated Weber form.

    ``family`` is ``[z_1, ..., z_m, z_0]`` on a jet chart J^n.  Raises
    ``ReductionError`` (with ``level`` and ``generator``) when the input is
    not in Weber form or the construction leaves the theory's hypotheses.
    """
    family = list(family)
    if not family:
        raise InputError("empty family")
    chart: Chart = family[0].chart
    if chart.jet is None:
        raise InputError("kr_reduce needs a jet chart")
    spec = JetSpec(*chart.jet)
    if spec.n < 1:
        raise InputError("kr_reduce needs n >= 1")
    if len(family) != spec.m + 1:
        raise InputError(f"expected {spec.m + 1} generators, got {len(family)}")
    for f in family:
        chart.check(f.chart)
    pt = chart.point(base)
    fields = _translate(family, pt)
    st = _reduce(fields, spec, True, verify)
    word = ProlongationWord(spec, tuple(st.letters))
    return KRReduction(word, st.trace, st.phi, pt)
