import itertools
import random

import pytest
import sympy

from pfl.bryant import (characteristic_by_brackets, characteristic_by_forms, characteristic_distribution,
                        corank_one_B, decide_corank_one_involutive, engel_rank_le_one,
                        engel_relations_check, first_derived, structure_functions, w_space,
                        _complementary_forms)
from pfl.errors import PflError, PreconditionError
from pfl.exterior import (Chart, Distribution, OneForm, PfaffianSystem, VectorField, annihilator,
                          lie_bracket, pushforward)
from pfl.flags import derived_flag, derived_flag_forms
from pfl.jets import JetSpec, canonical_contact_system
from pfl.poly import Polynomial

from corpus import bryant_corpus, non_involutive_B_template
from helpers import remix, to_sympy, triangular_pair


def _coords(chart, idx):
    return Distribution(chart, [VectorField.coordinate(chart, i) for i in idx])


def _form(chart, comps: dict) -> OneForm:
    out = [chart.zero()] * chart.dim
    for i, p in comps.items():
        out[i] = p if isinstance(p, Polynomial) else Polynomial.constant(chart.dim, p)
    return OneForm(chart, out)


# -- characteristic distributions ------------------------------------------------------

def test_characteristic_of_involutive_is_itself():
    R4 = Chart.standard(4)
    x = Polynomial.variables(4)
    D = Distribution(R4, [VectorField.coordinate(R4, 0),
                          VectorField(R4, [0, 1, x[1], 0])])
    assert D.is_involutive()
    C = characteristic_distribution(D)
    assert C.same_span(D) and D.same_span(C)


@pytest.mark.parametrize("n,m", [(2, 2), (2, 3), (3, 2)])
def test_characteristic_of_first_derived_canonical_has_rank_m(n, m):
    D = canonical_contact_system(JetSpec(n, m))
    _, fams = derived_flag(D, max_level=1)
    C1 = characteristic_distribution(fams[1])
    assert C1.generic_rank == m and C1.rank_at(D.chart.origin()) == m


@pytest.mark.parametrize("m", [1, 2, 3])
def test_characteristic_of_first_order_canonical_is_zero(m):
    C0 = characteristic_distribution(canonical_contact_system(JetSpec(1, m)))
    assert C0.generic_rank == 0


# -- structure functions -------------------------------------------------------------

def _sf_j1r2():
    D = canonical_contact_system(JetSpec(1, 2))
    return structure_functions(D, first_derived(D))


def test_structure_table_first_order_two_unit_entries():
    S = _sf_j1r2()
    assert S.d0 == 3 and S.r0 == 2 and S.residual_check
    den = S.denominator
    entries = [S.numerator(i, j, k) for i, j in itertools.combinations(range(3), 2) for k in range(2)]
    nonzero = [e for e in entries if e]
    assert len(nonzero) == 2
    assert all(e.is_constant() and abs(e.constant_term() / den.constant_term()) == 1 for e in nonzero)


def test_structure_table_antisymmetric():
    S = _sf_j1r2()
    for i, j in itertools.permutations(range(3), 2):
        for k in range(2):
            assert S.numerator(j, i, k) == -S.numerator(i, j, k)
            assert S.c(j, i, k)[1] == S.denominator
    assert not S.numerator(1, 1, 0)


def test_structure_functions_need_r0_positive():
    R3 = Chart.standard(3)
    D = _coords(R3, [0, 1])
    with pytest.raises(PreconditionError):
        structure_functions(D, D)


def test_structure_functions_need_inclusion():
    R3 = Chart.standard(3)
    with pytest.raises(PreconditionError):
        structure_functions(_coords(R3, [0]), _coords(R3, [1, 2]))


# -- Engel rank ------------------------------------------------------------------------

def test_engel_relations_small_d0_true():
    assert _sf_j1r2().d0 == 3 and engel_relations_check(_sf_j1r2())


def test_engel_relations_first_order_r3():
    D = canonical_contact_system(JetSpec(1, 3))
    S = structure_functions(D, first_derived(D))
    assert (S.d0, S.r0) == (4, 3)
    assert engel_relations_check(S)


@pytest.mark.parametrize("n,m", [(2, 1), (2, 3), (3, 1), (1, 3)])
def test_engel_canonical_levels_true(n, m):
    I = annihilator(canonical_contact_system(JetSpec(n, m)))
    _, systems = derived_flag_forms(I, max_level=n)
    for Ii in systems[:n]:
        assert engel_rank_le_one(Ii.basis())


def test_engel_darboux_five_is_above_one():
    # dw ^ dw = 2 dx1 dx2 dx3 dx4 does not vanish on the kernel
    R5 = Chart.standard(5)
    x = Polynomial.variables(5)
    w = _form(R5, {4: 1, 1: -x[0], 3: -x[2]})
    assert not engel_rank_le_one(PfaffianSystem(R5, [w]))


def test_engel_rejects_dependent_generators():
    R3 = Chart.standard(3)
    w = _form(R3, {0: 1})
    with pytest.raises(PreconditionError):
        engel_rank_le_one(PfaffianSystem(R3, [w, w.scale(2)]))


def _r7_pair(a, b, c, d):
    """w1 = dz1 - x_a dx_b, w2 = dz2 - x_c dx_d on (x1..x5, z1, z2)."""
    R7 = Chart.standard(7)
    x = Polynomial.variables(7)
    return PfaffianSystem(R7, [_form(R7, {5: 1, b: -x[a]}), _form(R7, {6: 1, d: -x[c]})])


def _sympy_engel_le_one(I: PfaffianSystem) -> bool:
    """Restrict each dw to the kernel frame and expand every 4-form component."""
    n = I.chart.dim
    xs = sympy.symbols(f"x1:{n + 1}")
    W = sympy.Matrix([[to_sympy(c, xs) for c in w.components] for w in I.generators])
    frame = W.nullspace()
    frame = [v * sympy.lcm([sympy.fraction(sympy.together(e))[1] for e in v]) for v in frame]
    two = []
    for row in W.tolist():
        dw = sympy.Matrix(n, n, lambda i, j: sympy.diff(row[j], xs[i]) - sympy.diff(row[i], xs[j]))
        two.append([[sympy.expand((u.T * dw * v)[0]) for v in frame] for u in frame])
    k = len(frame)
    for A, B in itertools.combinations_with_replacement(two, 2):
        for i, j, l, m in itertools.combinations(range(k), 4):
            e = (A[i][j] * B[l][m] - A[i][l] * B[j][m] + A[i][m] * B[j][l]
                 + A[j][l] * B[i][m] - A[j][m] * B[i][l] + A[l][m] * B[i][j])
            if sympy.expand(e) != 0:
                return False
    return True


def test_engel_r7_search_frozen():
    # small search over w1 = dz1 - x_a dx_b, w2 = dz2 - x_c dx_d
    above, cases = [], []
    for a, b in itertools.permutations(range(5), 2):
        for c, d in itertools.permutations(range(5), 2):
            if a < c or (a == c and b <= d):
                cases.append((a, b, c, d))
                if not engel_rank_le_one(_r7_pair(a, b, c, d)):
                    above.append((a, b, c, d))
    # Engel rank exceeds one exactly when dx_a^dx_b and dx_c^dx_d share no index
    assert above == [t for t in cases if not {t[0], t[1]} & {t[2], t[3]}]
    assert len(above) == 60 and above[0] == (0, 1, 2, 3)


def test_engel_r7_frozen_example_sympy():
    I = _r7_pair(0, 1, 2, 3)
    assert not engel_rank_le_one(I)
    assert not _sympy_engel_le_one(I)
    J = _r7_pair(0, 1, 2, 1)
    assert engel_rank_le_one(J) and _sympy_engel_le_one(J)


def test_engel_frame_argument_checked():
    D = canonical_contact_system(JetSpec(1, 3))
    I = annihilator(D)
    assert engel_rank_le_one(I, frame=D)
    with pytest.raises(PreconditionError):
        engel_rank_le_one(I, frame=_coords(D.chart, [0, 1, 2, 3]))


# -- B and the decision procedure ----------------------------------------------------------

@pytest.mark.parametrize("m", [2, 3])
def test_corank_one_B_first_order_is_top_fields(m):
    spec = JetSpec(1, m)
    D = canonical_contact_system(spec)
    B = corank_one_B(D)
    L0 = _coords(D.chart, [spec.index(1, j) for j in range(1, m + 1)])
    assert B.same_span(L0) and L0.same_span(B)
    assert B.is_involutive()


def test_corank_one_B_needs_r0_two():
    D = canonical_contact_system(JetSpec(1, 1))
    with pytest.raises(PreconditionError):
        corank_one_B(D)


@pytest.mark.parametrize("n,m", [(1, 2), (2, 2), (2, 3), (3, 1)])
def test_decide_canonical_levels(n, m):
    D = canonical_contact_system(JetSpec(n, m))
    _, fams = derived_flag(D, max_level=n)
    for i in range(n):
        v = decide_corank_one_involutive(fams[i])
        assert v.exists and v.char_rank_ok and v.engel_rank_one
        if v.r0 >= 2:
            assert v.B_involutive and v.L_witness is not None
        else:
            assert v.L_witness is None


def test_decide_involutive_input_rejected():
    R4 = Chart.standard(4)
    with pytest.raises(PreconditionError):
        decide_corank_one_involutive(_coords(R4, [0, 2]))


def _template_search():
    x2, x3 = Polynomial.variable(6, 1), Polynomial.variable(6, 2)
    monos = [(a, d - a) for d in range(1, 4) for a in range(d + 1)]
    hits = []
    for m1, m2 in itertools.product(monos, repeat=2):
        q1, q2 = x2 ** m1[0] * x3 ** m1[1], x2 ** m2[0] * x3 ** m2[1]
        try:
            v = decide_corank_one_involutive(non_involutive_B_template(q1, q2))
        except PflError:
            continue
        if v.r0 == 2 and v.char_rank_ok and v.engel_rank_one and v.B_involutive is False:
            hits.append((m1, m2))
    return hits


def test_non_involutive_B_search_frozen():
    # exponent pairs (a, b) for q = x2^a x3^b, degrees 1..3
    assert _template_search() == [((1, 1), (2, 0)), ((2, 0), (1, 1))]


def test_non_involutive_B_r6_example():
    x2, x3 = Polynomial.variable(6, 1), Polynomial.variable(6, 2)
    D = non_involutive_B_template(x2 * x2, x2 * x3)
    v = decide_corank_one_involutive(D)
    assert (v.r0, v.char_rank_ok, v.engel_rank_one) == (2, True, True)
    assert v.B_involutive is False and not v.exists and v.L_witness is None
    # B is span(f1, f2, f3); confirm with an independent sympy expansion
    xs = sympy.symbols("x1:7")
    F = [sympy.Matrix([to_sympy(c, xs) for c in f.components]) for f in D.generators]

    def br(a, b):
        return b.jacobian(xs) * a - a.jacobian(xs) * b

    Bsym = F[:3]
    Bspan = sympy.Matrix.hstack(*Bsym)
    Dspan = sympy.Matrix.hstack(*F)
    assert Bspan.rank() == 3 and Dspan.rank() == 4
    for a, b in itertools.combinations(Bsym, 2):
        assert Dspan.row_join(br(a, b)).rank() == 4
    assert Bspan.row_join(br(F[1], F[2])).rank() == 4
    ours = Distribution(D.chart, list(D.generators[:3]))
    assert v.B.same_span(ours) and ours.same_span(v.B)


# -- corpus properties (a slice; the acceptance suite runs the full corpus) -------------

CORPUS = bryant_corpus(40)


@pytest.mark.parametrize("inst", CORPUS, ids=lambda i: f"seed{i.seed}-{i.family}")
def test_corpus_properties(inst):
    D, base = inst.D, inst.base
    S = structure_functions(D, first_derived(D, base), base)
    assert engel_relations_check(S) == engel_rank_le_one(annihilator(D, base), base, frame=D)
    Cf, Cb = characteristic_by_forms(D, base), characteristic_by_brackets(D, base)
    assert Cf.same_span(Cb) and Cb.same_span(Cf) and Cf.rank_at(base) == Cb.rank_at(base)
    v = decide_corank_one_involutive(D, base)
    if v.exists:
        assert v.char_rank_ok
        assert Cf.generic_rank == inst.d0 - inst.r0 - 1
        if v.L_witness is not None:
            assert v.L_witness.includes(v.characteristic)
    if v.B is not None and inst.r0 >= 3:
        assert v.B_involutive


def test_two_term_B_all_pairs():
    seen = 0
    for inst in CORPUS:
        if inst.r0 < 2:
            continue
        v = decide_corank_one_involutive(inst.D, inst.base)
        if v.B is None:
            continue
        for i, j in itertools.combinations(range(inst.r0), 2):
            B2 = corank_one_B(inst.D, inst.base, terms=[i, j], check=False)
            assert B2.same_span(v.B) and v.B.same_span(B2)
        seen += 1
    assert seen >= 3


def test_w_spaces_are_distinct():
    D = canonical_contact_system(JetSpec(1, 3))
    base = D.chart.origin()
    ws = [w_space(D, w, base) for w in _complementary_forms(D, first_derived(D, base), base)]
    assert all(not a.same_span(b) for a, b in itertools.combinations(ws, 2))


def test_verdict_invariant_under_diffeo():
    rng = random.Random(7)
    x2, x3 = Polynomial.variable(6, 1), Polynomial.variable(6, 2)
    for D in (non_involutive_B_template(x2 * x2, x2 * x3), canonical_contact_system(JetSpec(1, 3))):
        v0 = decide_corank_one_involutive(D)
        pair = triangular_pair(rng, D.chart, nterms=1, max_degree=2)
        E = remix(rng, pushforward(D, pair), polynomial=False)
        v1 = decide_corank_one_involutive(E, pair.image(D.chart.origin()))
        assert (v0.exists, v0.r0, v0.char_rank_ok, v0.engel_rank_one, v0.B_involutive) == \
               (v1.exists, v1.r0, v1.char_rank_ok, v1.engel_rank_one, v1.B_involutive)
