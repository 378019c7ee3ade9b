"""Generate a Kumpera-Ruiz system from a word, hide it behind a constant frame change,
then recover the word by reduction."""

from gmpy2 import mpq

from pfl import JetSpec, ProlongationWord, generate_kumpera_ruiz, kr_reduce

spec = JetSpec(3, 2)
word = ProlongationWord.parse("R(1,2) S(3,0)", spec)
fam = generate_kumpera_ruiz(word)

m = spec.m
top, drift = fam[:m], fam[m]
# z_0 -> 2 z_0 + z_1 - z_2, z_1 <-> z_2
mixed = [top[1], top[0], drift.scale(mpq(2)) + top[0] - top[1]]

red = kr_reduce(mixed)
print("input word:    ", word)
print("recovered word:", red.word)
print("branches:      ", [t.branch for t in red.levels])
assert red.word == word
