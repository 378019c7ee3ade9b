"""Look for an involutive corank-one subdistribution.

The first system is the canonical one on J^1(R, R^3), where such a subdistribution
exists. The second is a rank-4 system on R^6 that passes the characteristic and
Engel tests, but whose candidate B fails to be involutive.
"""
from pfl import (Chart, Distribution, JetSpec, Polynomial, VectorField, canonical_contact_system,
                 decide_corank_one_involutive)

v = decide_corank_one_involutive(canonical_contact_system(JetSpec(1, 3)))
print("J^1(R, R^3):", "exists" if v.exists else "none", "r0 =", v.r0)
print("  B spanned by", len(v.B.generators), "fields, involutive:", v.B_involutive)

# f1 = d1, f2 = d2, f3 = d3 + x2 d4 + x2^2 d5 + x2 x3 d6, f4 = [f2, f3]
n = 6
R6 = Chart.standard(n)
x = Polynomial.variables(n)
zero, one = Polynomial.zero(n), Polynomial.one(n)
f3 = VectorField(R6, [zero, zero, one, x[1], x[1] * x[1], x[1] * x[2]])
f4 = VectorField(R6, [zero, zero, zero, one, x[1].scale(2), x[2]])
D = Distribution(R6, [VectorField.coordinate(R6, 0), VectorField.coordinate(R6, 1), f3, f4])

v = decide_corank_one_involutive(D)
print("R^6 example: r0 =", v.r0, "char ok", v.char_rank_ok, "Engel ok", v.engel_rank_one)
print("  B involutive:", v.B_involutive, "-> exists:", v.exists)
