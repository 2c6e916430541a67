"""Word problem in BS(2,3): the commutator c survives, its image under psi dies.

Run: python3 demos/word_problem.py
"""

from gforge.certificates import replay
from gforge.constructions import C_WORD, S_GROUP, psi, sigma_preimage, qn, to_s
from gforge.solvers import britton_nf
from gforge.words import free_reduce, parse_word

nf, _ = britton_nf(S_GROUP, C_WORD)
print(f"c          = {C_WORD}")
print(f"Britton nf = {nf}   (non-empty, so c != 1)")

img = psi()(C_WORD)
nf, cert = britton_nf(S_GROUP, img)
print(f"psi(c)     = {img}")
print(f"Britton nf = {nf or '1'} after {len(cert)} steps")
assert not replay(cert, img, S_GROUP)
print("certificate replays to the empty word")

# preimages of a under q_n halve the exponent 2^n once per level
for n in range(5):
    w = sigma_preimage(n)
    image = to_s(qn(n)(w), 1)
    diff = free_reduce(image.concat(parse_word("a^-1")))
    print(f"n={n}: |w_n| = {len(w):3d}, q_n(w_n) a^-1 trivial: {not britton_nf(S_GROUP, diff)[0]}")
