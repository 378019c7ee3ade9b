"""Hypothesis strategies shared by the property tests."""
from gmpy2 import mpq
from hypothesis import strategies as st

from pfl.poly import Polynomial


def polynomials(nvars=3, max_terms=4, max_degree=3, coeffs=5):
    exps = st.lists(st.integers(0, max_degree), min_size=nvars, max_size=nvars).map(tuple)
    coef = st.fractions(min_value=-coeffs, max_value=coeffs, max_denominator=4)
    return st.dictionaries(exps, coef, max_size=max_terms).map(
        lambda d: Polynomial(nvars, {k: mpq(v.numerator, v.denominator) for k, v in d.items()}))


def points(nvars=3, bound=4):
    return st.lists(st.fractions(min_value=-bound, max_value=bound, max_denominator=3),
                    min_size=nvars, max_size=nvars)
