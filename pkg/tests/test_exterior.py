import random

import pytest
from hypothesis import given, strategies as st

from pfl.errors import ChartMismatchError, RankNotConstantError, VerificationError
from pfl.exterior import (Chart, DiffeoPair, Distribution, FourForm, OneForm, TwoForm, VectorField,
                          annihilator, exterior_derivative, interior_product, kernel, lie_bracket,
                          pairing, pushforward, wedge_two_forms)
from pfl.flags import derived_flag
from pfl.jets import JetSpec, canonical_contact_system, kumpera_ruiz_family, ProlongationWord
from pfl.poly import Polynomial, random_polynomial

from conftest import poly
from helpers import random_field, triangular_pair

R3 = Chart.standard(3)
R4 = Chart.standard(4)


def vf(chart, *texts):
    return VectorField(chart, [poly(t, chart.dim, chart.names) for t in texts])


def of(chart, *texts):
    return OneForm(chart, [poly(t, chart.dim, chart.names) for t in texts])


def two(chart, entries):
    return TwoForm(chart, {k: Polynomial.constant(chart.dim, v) for k, v in entries.items()})


# -- brackets and pairings ---------------------------------------------------------

def test_bracket_examples_on_first_jets():
    chart = JetSpec(1, 1).chart()  # x0_0, x1_0, x1_1
    top = VectorField.coordinate(chart, 2)
    drift = vf(chart, "1", "x1_1", "0")
    assert lie_bracket(top, drift) == VectorField.coordinate(chart, 1)
    assert lie_bracket(drift, drift).is_zero()


def test_bracket_of_regular_frame_lowers_level():
    spec = JetSpec(3, 2)
    fam = kumpera_ruiz_family(ProlongationWord.canonical(spec))
    chart = spec.chart()
    drift = fam[-1]
    for j in (1, 2):
        top = VectorField.coordinate(chart, spec.index(3, j))
        assert lie_bracket(top, drift) == VectorField.coordinate(chart, spec.index(2, j))


def test_bracket_chart_mismatch():
    with pytest.raises(ChartMismatchError):
        lie_bracket(VectorField.coordinate(R3, 0), VectorField.coordinate(R4, 0))


def test_pairing_examples():
    assert pairing(OneForm.coordinate(R3, 0), VectorField.coordinate(R3, 0)) == Polynomial.one(3)
    assert not pairing(OneForm.coordinate(R3, 0), VectorField.coordinate(R3, 1))
    assert pairing(of(R3, "x2", "0", "0"), vf(R3, "x1", "0", "0")) == poly("x1*x2", 3)


# -- forms ----------------------------------------------------------------------------

def test_exterior_derivative_examples():
    assert exterior_derivative(OneForm.coordinate(R3, 0)).is_zero()
    assert exterior_derivative(of(R3, "0", "x1", "0")) == two(R3, {(0, 1): 1})
    assert exterior_derivative(of(R3, "x2", "0", "0")) == two(R3, {(0, 1): -1})


def test_two_form_antisymmetric_storage():
    w = TwoForm(R3, {(1, 0): Polynomial.one(3)})
    assert w.get(0, 1) == -Polynomial.one(3) and w.get(1, 0) == Polynomial.one(3)


def test_wedge_examples():
    a, b = two(R4, {(0, 1): 1}), two(R4, {(2, 3): 1})
    assert wedge_two_forms(a, b) == FourForm(R4, {(0, 1, 2, 3): Polynomial.one(4)})
    assert wedge_two_forms(a, two(R4, {(0, 2): 1})).is_zero()
    c = two(R4, {(0, 2): 3, (1, 3): -1, (0, 3): 2})
    assert wedge_two_forms(a, c) == wedge_two_forms(c, a)
    # dx1^dx3 ^ dx2^dx4 = -dx1^dx2^dx3^dx4
    assert wedge_two_forms(two(R4, {(0, 2): 1}), two(R4, {(1, 3): 1})) == \
        FourForm(R4, {(0, 1, 2, 3): -Polynomial.one(4)})


def test_interior_product_examples():
    w = two(R3, {(0, 1): 1})
    assert interior_product(VectorField.coordinate(R3, 0), w) == OneForm.coordinate(R3, 1)
    assert interior_product(VectorField.coordinate(R3, 2), w).is_zero()


# -- annihilators -------------------------------------------------------------------

def test_annihilator_examples():
    D = Distribution(R3, [VectorField.coordinate(R3, 0), VectorField.coordinate(R3, 1)])
    I = annihilator(D)
    assert len(I) == 1 and I.same_span(PfaffianSpan(R3, [OneForm.coordinate(R3, 2)]))
    C = canonical_contact_system(JetSpec(1, 1))
    I = annihilator(C)
    expected = of(C.chart, "-x1_1", "1", "0")
    assert I.generic_rank == 1 and I.contains(expected)
    for w in I:
        for f in C:
            assert not pairing(w, f)


def PfaffianSpan(chart, forms):
    from pfl.exterior import PfaffianSystem
    return PfaffianSystem(chart, forms)


def test_annihilator_rejects_rank_drop():
    D = Distribution(R3, [vf(R3, "x1", "0", "0"), VectorField.coordinate(R3, 1)])
    with pytest.raises(RankNotConstantError):
        annihilator(D)
    assert annihilator(D, (1, 0, 0)).generic_rank == 1


def test_annihilator_twice_recovers_span(rng):
    chart = Chart.standard(5)
    for _ in range(5):
        D = Distribution(chart, [random_field(rng, chart, 2, 1) for _ in range(2)])
        base = (1, 2, -1, 3, 1)
        if not D.has_constant_rank(base):
            continue
        back = kernel(annihilator(D, base), base)
        assert back.same_span(D) and D.same_span(back)


# -- properties -----------------------------------------------------------------------

seeds = st.integers(0, 10 ** 6)


@given(seeds)
def test_jacobi(seed):
    rng = random.Random(seed)
    f, g, h = (random_field(rng, R3) for _ in range(3))
    total = lie_bracket(f, lie_bracket(g, h)) + lie_bracket(g, lie_bracket(h, f)) + lie_bracket(h, lie_bracket(f, g))
    assert total.is_zero()


@given(seeds)
def test_d_of_exact_form_vanishes(seed):
    p = random_polynomial(random.Random(seed), 4, 4, 3)
    assert exterior_derivative(OneForm.gradient(p, R4)).is_zero()


@given(seeds)
def test_bracket_form_duality(seed):
    rng = random.Random(seed)
    f, g = random_field(rng, R3), random_field(rng, R3)
    w = OneForm(R3, [random_polynomial(rng, 3, 2, 2) for _ in range(3)])
    lhs = exterior_derivative(w)(f, g)
    rhs = f.apply(w(g)) - g.apply(w(f)) - w(lie_bracket(f, g))
    assert lhs == rhs


@given(seeds)
def test_interior_product_is_first_slot(seed):
    rng = random.Random(seed)
    f, g = random_field(rng, R4), random_field(rng, R4)
    w = TwoForm(R4, {(i, j): random_polynomial(rng, 4, 1, 1) for i in range(4) for j in range(i + 1, 4)})
    assert interior_product(f, w)(g) == w(f, g)
    assert not interior_product(f, w)(f)


# -- pushforward ------------------------------------------------------------------------

def test_pushforward_by_identity():
    D = canonical_contact_system(JetSpec(2, 1))
    E = pushforward(D, DiffeoPair.identity(D.chart))
    assert E.generators == D.generators


def test_pushforward_then_inverse(rng):
    D = canonical_contact_system(JetSpec(1, 2))
    pair = triangular_pair(rng, D.chart)
    back = pushforward(pushforward(D, pair), pair.inverse())
    assert back.same_span(D)


@given(seeds)
def test_pushforward_is_a_bracket_homomorphism(seed):
    rng = random.Random(seed)
    pair = triangular_pair(rng, R3, nterms=1, max_degree=2)
    f, g = random_field(rng, R3, 2, 1), random_field(rng, R3, 2, 1)
    push = pair.push_vector_field
    # brute force: J phi(psi) f(psi) assembled by hand
    def by_hand(h):
        return VectorField(R3, [sum((p.diff(k) * h[k] for k in range(3)), Polynomial.zero(3)).compose(pair.backward)
                                for p in pair.forward])
    assert push(f) == by_hand(f)
    assert push(lie_bracket(f, g)) == lie_bracket(by_hand(f), by_hand(g))


def test_pushforward_preserves_ranks(rng):
    D = canonical_contact_system(JetSpec(2, 2))
    pair = triangular_pair(rng, D.chart)
    E = pushforward(D, pair)
    base = D.chart.origin()
    r1, _ = derived_flag(D, base)
    r2, _ = derived_flag(E, pair.image(base))
    assert r1.generic_ranks == r2.generic_ranks and r1.ranks_at_base == r2.ranks_at_base


def test_broken_inverse_is_rejected():
    x1, x2 = Polynomial.variables(2)
    with pytest.raises(VerificationError) as exc:
        DiffeoPair(Chart.standard(2), [x1 + x2 * x2, x2], [x1 - x2 * x2 + 1, x2])
    assert exc.value.component == 0
