"""The linear fractional map attached to an invertible matrix M = [[A, b], [c, d]].

Its Jacobian at the origin satisfies det J * d^(2k) = det(A d - b c) for a k x k block A.
"""
import random

from gmpy2 import mpq

from pfl import mobius_is_diffeo
from pfl.linalg import rational_determinant
from pfl.reduction import mobius_jacobian_at_zero

rng = random.Random(3)
k = 3
hits = 0
for trial in range(20):
    M = [[rng.randint(-4, 4) for _ in range(k + 1)] for _ in range(k + 1)]
    d = M[k][k]
    if not d:
        continue
    J = mobius_jacobian_at_zero(M)
    core = [[M[i][j] * d - M[i][k] * M[k][j] for j in range(k)] for i in range(k)]
    lhs = rational_determinant(J) * mpq(d) ** (2 * k)
    hits += lhs == rational_determinant(core)
    print(f"det M = {rational_determinant(M)!s:>5}  diffeo: {mobius_is_diffeo(M)}")
print("relation held on", hits, "matrices")
