"""
Exact linear algebra for matrices with polynomial entries.

Everything here is fraction-free: elimination over Q[x] with exact division
by the previous pivot (Bareiss), so intermediate entries stay polynomials and
are minors of the input.  Ranks over the fraction field Q(x) are therefore
certified, not sampled.
"""
from __future__ import annotations

import random
from math import gcd, lcm
from typing import Sequence

from gmpy2 import mpq, mpz

from .poly import Polynomial, Rational, as_rational, divide_by_gcd

__all__ = [
    "Echelon",
    "RationalSpan",
    "PolyMatrix",
    "determinant",
    "generic_rank",
    "minors_vanish_identically",
    "primitive_vector",
    "rank_at_point",
    "rational_determinant",
    "rational_rank",
]

_PREPASS_POINTS = 2
_PREPASS_SEED = 0x5EED


class PolyMatrix:
    """Rectangular matrix of polynomials sharing one chart dimension."""

    __slots__ = ("rows", "nrows", "ncols", "nvars")

    def __init__(self, rows: Sequence[Sequence[Polynomial]], nvars: int | None = None):
        rows = tuple(tuple(r) for r in rows)
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        if nvars is None:
            if not rows or not rows[0]:
                raise ValueError("nvars required for an empty matrix")
            nvars = rows[0][0].nvars
        for r in rows:
            for p in r:
                if p.nvars != nvars:
                    raise ValueError("all entries must share chart_dim")
        self.rows = rows
        self.nrows = len(rows)
        self.ncols = len(rows[0]) if rows else 0
        self.nvars = nvars

    @classmethod
    def from_values(cls, values: Sequence[Sequence[object]], nvars: int) -> "PolyMatrix":
        return cls([[v if isinstance(v, Polynomial) else Polynomial.constant(nvars, v)
                     for v in row] for row in values], nvars)

    @classmethod
    def identity(cls, n: int, nvars: int) -> "PolyMatrix":
        one, zero = Polynomial.one(nvars), Polynomial.zero(nvars)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)], nvars)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def evaluate(self, point: Sequence) -> list[list[Rational]]:
        if len(point) != self.nvars:
            raise ValueError(
                f"dimension mismatch: point has {len(point)} coordinates, matrix has {self.nvars}")
        pt = tuple(as_rational(v) for v in point)
        return [[p.evaluate(pt) for p in row] for row in self.rows]

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(list(zip(*self.rows)), self.nvars) if self.rows else self

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyMatrix) and self.rows == other.rows and self.nvars == other.nvars

    def __repr__(self) -> str:
        return f"PolyMatrix({self.nrows}x{self.ncols}, nvars={self.nvars})"


# -- rational matrices --------------------------------------------------------

def _integer_rows(values: Sequence[Sequence[object]]) -> list[list[mpz]]:
    out = []
    for row in values:
        row = [as_rational(v) for v in row]
        den = lcm(*(int(v.denominator) for v in row)) if row else 1
        out.append([mpz(v * den) for v in row])
    return out


def rational_rank(values: Sequence[Sequence[object]]) -> int:
    """Rank of a rational matrix by fraction-free (integer Bareiss) elimination."""
    a = _integer_rows(values)
    if not a:
        return 0
    nr, nc = len(a), len(a[0])
    prev = mpz(1)
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, nr):
            x = a[i][c]
            row = a[i]
            for k in range(c + 1, nc):
                row[k] = (p * row[k] - x * a[r][k]) // prev
            row[c] = mpz(0)
        prev = p
        r += 1
        if r == nr:
            break
    return r


def rational_determinant(values: Sequence[Sequence[object]]) -> Rational:
    n = len(values)
    if any(len(r) != n for r in values):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return mpq(1)
    a = [[as_rational(v) for v in row] for row in values]
    det = mpq(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return mpq(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        p = a[c][c]
        det *= p
        for i in range(c + 1, n):
            f = a[i][c] / p
            if f:
                for k in range(c, n):
                    a[i][k] -= f * a[c][k]
    return det


# -- polynomial matrices -------------------------------------------------------

def rank_at_point(M: PolyMatrix, at: Sequence) -> int:
    return rational_rank(M.evaluate(at))


def _random_points(nvars: int, count: int, seed: int = _PREPASS_SEED) -> list[tuple]:
    rng = random.Random(seed + nvars)
    return [tuple(mpq(rng.randint(-997, 997), rng.randint(1, 13)) for _ in range(nvars))
            for _ in range(count)]


def sampled_rank(M: PolyMatrix, points: int = _PREPASS_POINTS) -> int:
    """Lower bound on the generic rank from evaluation at fixed pseudo-random points."""
    if M.nrows == 0 or M.ncols == 0:
        return 0
    return max(rank_at_point(M, p) for p in _random_points(M.nvars, points))


def generic_rank(M: PolyMatrix) -> int:
    """Rank of ``M`` over the fraction field Q(x1, ..., xN).

    Evaluation at random points only ever supplies a lower bound; the answer
    is returned early only when that bound already equals ``min(rows, cols)``.
    Otherwise the rank comes from fraction-free elimination with polynomial
    pivots.
    """
    if M.nrows == 0 or M.ncols == 0:
        return 0
    lower = sampled_rank(M)
    if lower == min(M.nrows, M.ncols):
        return lower
    return Echelon(M.rows, M.ncols, M.nvars, full=False).rank


def minors_vanish_identically(M: PolyMatrix, order: int) -> bool:
    """True iff every ``order x order`` minor of ``M`` is the zero polynomial."""
    if not 1 <= order <= min(M.nrows, M.ncols):
        raise ValueError(f"minor order {order} out of range for a {M.nrows}x{M.ncols} matrix")
    return generic_rank(M) < order


def determinant(M: PolyMatrix) -> Polynomial:
    """Determinant by Bareiss elimination (exact division by previous pivots)."""
    n = M.nrows
    if M.ncols != n:
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return Polynomial.one(M.nvars)
    a = [list(r) for r in M.rows]
    prev = Polynomial.one(M.nvars)
    sign = 1
    for c in range(n):
        cands = [i for i in range(c, n) if a[i][c]]
        if not cands:
            return Polynomial.zero(M.nvars)
        piv = min(cands, key=lambda i: (a[i][c].degree(), len(a[i][c])))
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        p = a[c][c]
        for i in range(c + 1, n):
            x = a[i][c]
            for k in range(c + 1, n):
                a[i][k] = (p * a[i][k] - x * a[c][k]).divexact(prev)
        prev = p
    return prev if sign > 0 else -prev


def primitive_vector(v: Sequence[Polynomial]) -> list[Polynomial]:
    """Strip rational content and any polynomial factor common to all entries.

    The result spans the same line over Q(x); dividing out a common factor
    only shrinks the locus where the vector vanishes.
    """
    nonzero = [p for p in v if p]
    if not nonzero:
        return list(v)
    v = divide_by_gcd(v)
    nonzero = [p for p in v if p]
    nums, dens = [], []
    for p in nonzero:
        for c in p.coefficients():
            nums.append(int(c.numerator))
            dens.append(int(c.denominator))
    scale = mpq(lcm(*dens), gcd(*nums))
    if nonzero[0].leading_term()[1] < 0:
        scale = -scale
    return [p.scale(scale) if p else p for p in v]


class Echelon:
    """Fraction-free reduced echelon form of a family of polynomial row vectors.

    After reduction every surviving row has the common pivot value ``det`` in
    its own pivot column and zeros in all other pivot columns; ``det`` is a
    maximal nonvanishing minor of the input.  Pivots are chosen lowest degree
    first; when ``base`` is given, entries that do not vanish at ``base`` are
    preferred, so ``det(base) != 0`` whenever the rank at ``base`` equals the
    generic rank.

    With ``track=True`` the row operations are recorded so that span
    coordinates with respect to the original rows can be recovered.
    """

    def __init__(self, rows: Sequence[Sequence[Polynomial]], ncols: int, nvars: int,
                 base: Sequence | None = None, track: bool = False, full: bool = True):
        self.ncols = ncols
        self.nvars = nvars
        self.base = None if base is None else tuple(as_rational(v) for v in base)
        self.ninput = len(rows)
        zero, one = Polynomial.zero(nvars), Polynomial.one(nvars)
        width = ncols + (self.ninput if track else 0)
        a = []
        for s, r in enumerate(rows):
            r = list(r)
            if len(r) != ncols:
                raise ValueError("row length mismatch")
            if track:
                r.extend(one if t == s else zero for t in range(self.ninput))
            a.append(r)
        nr = len(a)
        prev = one
        pivots: list[int] = []
        used: set[int] = set()
        r = 0
        while r < nr:
            best = None
            for i in range(r, nr):
                row = a[i]
                for j in range(ncols):
                    if j in used:
                        continue
                    x = row[j]
                    if not x:
                        continue
                    key = (x.degree(), len(x), i, j)
                    if self.base is not None:
                        key = (0 if x.evaluate(self.base) else 1,) + key
                    if best is None or key < best[0]:
                        best = (key, i, j)
            if best is None:
                break
            _, i, j = best
            a[r], a[i] = a[i], a[r]
            prow = a[r]
            p = prow[j]
            const_prev = prev.is_constant()
            inv_prev = 1 / prev.constant_term() if const_prev else None
            targets = range(nr) if full else range(r + 1, nr)
            for i in targets:
                if i == r:
                    continue
                row = a[i]
                x = row[j]
                for k in range(width):
                    y, z = row[k], prow[k]
                    if not x:
                        if not y:
                            continue
                        num = p * y
                    elif not z:
                        if not y:
                            continue
                        num = p * y
                    else:
                        num = p * y - x * z
                    row[k] = num.scale(inv_prev) if const_prev else num.divexact(prev)
                if not full:
                    row[j] = zero
            prev = p
            used.add(j)
            pivots.append(j)
            r += 1
        self.rank = r
        self.pivots = pivots
        self.det = prev
        self.rows = [row[:ncols] for row in a[:r]]
        self.transform = [row[ncols:] for row in a[:r]] if track else None
        self.full = full

    def copy(self) -> "Echelon":
        new = object.__new__(Echelon)
        new.__dict__.update(self.__dict__)
        new.rows = [list(r) for r in self.rows]
        new.pivots = list(self.pivots)
        new.transform = None if self.transform is None else [list(r) for r in self.transform]
        return new

    def add(self, v: Sequence[Polynomial]) -> bool:
        """Append one row; return False (and change nothing) if it is already in the span.

        The residual of ``v`` is exactly the bordered minor Bareiss would have
        produced, so one more elimination step keeps all entries exact.
        """
        if self.transform is not None:
            raise ValueError("incremental rows are not supported with track=True")
        if not self.full:
            raise ValueError("incremental rows need a fully reduced echelon form")
        w = self.residual(v)
        best = None
        for j, x in enumerate(w):
            if not x:
                continue
            key = (x.degree(), len(x), j)
            if self.base is not None:
                key = (0 if x.evaluate(self.base) else 1,) + key
            if best is None or key < best[0]:
                best = (key, j)
        if best is None:
            return False
        j = best[1]
        p = w[j]
        prev = self.det
        const_prev = prev.is_constant()
        inv_prev = 1 / prev.constant_term() if const_prev else None
        for row in self.rows:
            x = row[j]
            for k in range(self.ncols):
                y, z = row[k], w[k]
                if not x or not z:
                    if not y:
                        continue
                    num = p * y
                else:
                    num = p * y - x * z
                row[k] = num.scale(inv_prev) if const_prev else num.divexact(prev)
        self.rows.append(list(w))
        self.pivots.append(j)
        self.det = p
        self.rank += 1
        self.ninput += 1
        return True

    # -- span queries ---------------------------------------------------------
    def residual(self, v: Sequence[Polynomial]) -> list[Polynomial]:
        """``det * v`` minus its projection onto the row span (zero iff ``v`` is in the span)."""
        if not self.full:
            raise ValueError("residuals need a fully reduced echelon form")
        out = [self.det * x for x in v]
        for t, c in enumerate(self.pivots):
            coef = v[c]
            if coef:
                row = self.rows[t]
                for k in range(self.ncols):
                    if row[k]:
                        out[k] = out[k] - coef * row[k]
        return out

    def contains(self, v: Sequence[Polynomial]) -> bool:
        if not self.full:
            raise ValueError("membership needs a fully reduced echelon form")
        if self.rank == 0:
            return not any(v)
        pivset = set(self.pivots)
        coefs = [(v[c], self.rows[t]) for t, c in enumerate(self.pivots) if v[c]]
        for k in range(self.ncols):
            if k in pivset:
                continue
            acc = self.det * v[k]
            for coef, row in coefs:
                if row[k]:
                    acc = acc - coef * row[k]
            if acc:
                return False
        return True

    def coordinates(self, v: Sequence[Polynomial]) -> tuple[Polynomial, list[Polynomial]]:
        """Express ``v`` in the original rows: ``v = sum(num[s] * input[s]) / den``.

        Raises ``ValueError`` if ``v`` is not in the span.
        """
        if self.transform is None:
            raise ValueError("coordinates need track=True")
        if not self.contains(v):
            raise ValueError("vector is not in the span")
        nums = [Polynomial.zero(self.nvars) for _ in range(self.ninput)]
        for t, c in enumerate(self.pivots):
            coef = v[c]
            if coef:
                for s, x in enumerate(self.transform[t]):
                    if x:
                        nums[s] = nums[s] + coef * x
        return self.det, nums

    def kernel(self, simplify: bool = True) -> list[list[Polynomial]]:
        """Polynomial basis (over Q(x)) of the right kernel ``{v : rows . v = 0}``."""
        if not self.full:
            raise ValueError("kernel needs a fully reduced echelon form")
        zero = Polynomial.zero(self.nvars)
        pivset = set(self.pivots)
        out = []
        for f in range(self.ncols):
            if f in pivset:
                continue
            v = [zero] * self.ncols
            v[f] = self.det
            for t, c in enumerate(self.pivots):
                v[c] = -self.rows[t][f]
            out.append(primitive_vector(v) if simplify else v)
        return out


class RationalSpan:
    """Incrementally maintained row space of rational vectors."""

    def __init__(self, ncols: int):
        self.ncols = ncols
        self._rows: list[tuple[int, list]] = []

    @property
    def rank(self) -> int:
        return len(self._rows)

    def _reduce(self, v: Sequence) -> list:
        w = [as_rational(x) for x in v]
        for c, row in self._rows:
            f = w[c]
            if f:
                for k in range(self.ncols):
                    if row[k]:
                        w[k] -= f * row[k]
        return w

    def contains(self, v: Sequence) -> bool:
        return not any(self._reduce(v))

    def add(self, v: Sequence) -> bool:
        w = self._reduce(v)
        c = next((k for k, x in enumerate(w) if x), None)
        if c is None:
            return False
        inv = 1 / w[c]
        w = [x * inv for x in w]
        for _, row in self._rows:
            f = row[c]
            if f:
                for k in range(self.ncols):
                    if w[k]:
                        row[k] -= f * w[k]
        self._rows.append((c, w))
        return True

    def copy(self) -> "RationalSpan":
        new = RationalSpan(self.ncols)
        new._rows = [(c, list(r)) for c, r in self._rows]
        return new
