"""Random verified diffeomorphisms and generator remixes for invariance tests."""
from __future__ import annotations

from gmpy2 import mpq

from pfl.exterior import Chart, DiffeoPair, Distribution, VectorField
from pfl.poly import Polynomial, random_polynomial


def triangular_pair(rng, chart: Chart, nterms: int = 2, max_degree: int = 2, base=None) -> DiffeoPair:
    """phi = P o T o P' with T(x)_k = a_k x_k + p_k(x_0..x_{k-1}) and P, P' coordinate permutations.

    The inverse is built by back substitution, so both directions are polynomial.
    """
    n = chart.dim
    xs = Polynomial.variables(n)
    scales = [mpq(rng.choice([-3, -2, -1, 1, 2, 3]), rng.choice([1, 1, 2])) for _ in range(n)]
    shifts = [random_polynomial(rng, n, nterms, max_degree, support=range(k)) if k else
              Polynomial.constant(n, rng.randint(-2, 2)) for k in range(n)]
    tri = [xs[k].scale(scales[k]) + shifts[k] for k in range(n)]
    inv: list[Polynomial] = []
    for k in range(n):
        # y_k = (x_k - p_k(y_0..y_{k-1})) / a_k
        prev = inv + [xs[j] for j in range(k, n)]
        inv.append((xs[k] - shifts[k].compose(prev)).scale(1 / scales[k]))
    outer = list(range(n))
    inner = list(range(n))
    rng.shuffle(outer)
    rng.shuffle(inner)
    # phi(x) = Q(T(P x)) with (P x)_k = x_inner[k], (Q y)_k = y_outer[k]
    px = [xs[inner[k]] for k in range(n)]
    fwd_t = [p.compose(px) for p in tri]
    forward = [fwd_t[outer[k]] for k in range(n)]
    # inverse: x = P^{-1}(T^{-1}(Q^{-1} y))
    qinv = [None] * n
    for k in range(n):
        qinv[outer[k]] = xs[k]
    t_inv = [p.compose(qinv) for p in inv]
    backward = [None] * n
    for k in range(n):
        backward[inner[k]] = t_inv[k]
    return DiffeoPair(chart, forward, backward, base)


def remix(rng, D: Distribution, polynomial: bool = True) -> Distribution:
    """Generators replaced by (diagonal constants + strictly upper polynomial) combinations, permuted."""
    gens = list(D.generators)
    k = len(gens)
    n = D.chart.dim
    out = []
    for i in range(k):
        f = gens[i].scale(mpq(rng.choice([-2, -1, 1, 2, 3]), rng.choice([1, 2])))
        for j in range(i + 1, k):
            c = (random_polynomial(rng, n, 1, 1) if polynomial
                 else Polynomial.constant(n, rng.randint(-2, 2)))
            if c:
                f = f + gens[j].scale(c)
        out.append(f)
    rng.shuffle(out)
    return Distribution(D.chart, out)


def random_field(rng, chart: Chart, nterms: int = 2, max_degree: int = 2) -> VectorField:
    return VectorField(chart, [random_polynomial(rng, chart.dim, nterms, max_degree) for _ in range(chart.dim)])


def to_sympy(p: Polynomial, syms):
    """Independent conversion used by the sympy oracles."""
    import sympy
    return sum((sympy.Rational(int(c.numerator), int(c.denominator))
                * sympy.Mul(*[x ** e for x, e in zip(syms, exps)]) for exps, c in p.terms()),
               sympy.Integer(0))


def incidence_relations(D: Distribution, n: int) -> dict:
    """Span relations between characteristic distributions C_i and the corank-one B = L_i.

    Uses m >= 2, so r0 = m >= 2 at every level below n and B is defined.
    """
    from pfl.bryant import characteristic_distribution, corank_one_B
    from pfl.flags import derived_flag

    base = D.chart.origin()
    _, fams = derived_flag(D, base, max_level=n)
    C = [characteristic_distribution(fams[i], base) for i in range(n)]
    L = [corank_one_B(fams[i], base) for i in range(n)]
    out = {}
    for i in range(n):
        out[f"C{i} in L{i}"] = L[i].includes(C[i])
        if i + 1 < n:
            out[f"L{i} in L{i + 1}"] = L[i + 1].includes(L[i])
            out[f"L{i} in C{i + 1}"] = C[i + 1].includes(L[i])
            out[f"L{i} = C{i + 1}"] = L[i].same_span(C[i + 1]) and C[i + 1].same_span(L[i])
    return out


def weber_remix(rng, family, bound: int = 3):
    """Constant remix keeping the top fields free of the drift: z_j -> sum A_jk z_k, z_0 -> a z_0 + sum b_k z_k."""
    from pfl.linalg import rational_determinant

    m = len(family) - 1
    while True:
        A = [[mpq(rng.randint(-bound, bound)) for _ in range(m)] for _ in range(m)]
        if rational_determinant(A):
            break
    a = mpq(rng.choice([-2, -1, 1, 2, 3]), rng.choice([1, 2]))
    b = [mpq(rng.randint(-bound, bound)) for _ in range(m)]
    tops = family[:m]
    out = []
    for j in range(m):
        f = VectorField.zero(family[0].chart)
        for k in range(m):
            if A[j][k]:
                f = f + tops[k].scale(A[j][k])
        out.append(f)
    drift = family[m].scale(a)
    for k in range(m):
        if b[k]:
            drift = drift + tops[k].scale(b[k])
    return out + [drift]


def random_word(rng, n: int, m: int, bound: int = 5):
    """Random letters with rational parameters |num|, |den| <= bound."""
    from pfl.jets import JetSpec, ProlongationLetter, ProlongationWord

    letters = []
    for _ in range(n - 1):
        kind = rng.choice("RS")
        c = [mpq(rng.randint(-bound, bound), rng.randint(1, bound)) for _ in range(m)]
        if kind == "S":
            c[-1] = mpq(0)
        letters.append(ProlongationLetter(kind, tuple(c)))
    return ProlongationWord(JetSpec(n, m), tuple(letters))
