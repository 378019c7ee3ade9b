"""Classify the canonical contact system on J^2(R, R^2) and its singular prolongation S(0,0).

Run with: python3 demos/01_classify_contact.py
"""
from pfl import (JetSpec, ProlongationWord, classify_contact, canonical_contact_system,
                 generate_kumpera_ruiz, lie_flag)

spec = JetSpec(2, 2)
print(f"J^{spec.n}(R, R^{spec.m}): dim {spec.dim}, rank {spec.m + 1}")

D = canonical_contact_system(spec)
v = classify_contact(D)
print("canonical:", v.status, "derived ranks", v.derived_ranks)

# same derived flag, but the Lie flag at the origin grows more slowly
word = ProlongationWord.parse("S(0,0)", spec)
S = generate_kumpera_ruiz(word)
v = classify_contact(S)
print("S(0,0) at 0:", v.status, "derived", v.derived_ranks, "lie at base", v.lie_ranks_at_base)
print("lie flag ranks:", [lvl.rank_at_base for lvl in lie_flag(S, prune=False)[0].levels])

# away from the singular locus the system is canonical again
p = [0] * spec.dim
p[-1] = 1
print("S(0,0) at x_2^2 = 1:", classify_contact(S, p).status)
