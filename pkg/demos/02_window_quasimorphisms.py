r"""
Window quasimorphisms and homogenization
========================================

psi_c sums a bounded function c over consecutive windows of syllable
exponents.  With c_m(i_1, ..., i_m) = sgn(|i_1| - |i_m|) it is invariant
under inverting either generator, so its homogenization vanishes on
palindromes, primitive elements and the commutator.
"""

import random

from autonorm.qmorph import SnakeQM, cm, defect_scan, homogenize, independence_matrix, w_m, word_sampler
from autonorm.words import format_word, parse_word, power, random_palindrome, random_primitive

bst = parse_word("a^4 b^3 a^2 b")
q = cm(2)
print("psi_c2 on powers of", format_word(bst))
for n in range(1, 6):
    print(f"  n={n}: {q(power(bst, n))}")
r = homogenize(q, bst)
print(f"homogenized: {r.value} (exact={r.exact}, detected after n={r.n_used})")

print("\nsampled defects against the bound 3(m+1)")
for m in (2, 3, 4):
    print(f"  m={m}: {defect_scan(cm(m), word_sampler(m, 30, 200), 3000, seed=m)} <= {3 * (m + 1)}")

rng = random.Random(1)
samples = [random_palindrome(rng, 15, 80) for _ in range(200)] + [random_primitive(rng, 15) for _ in range(50)]
print("\nhomogenized psi_c3 vanishes on 250 palindromes and primitives:",
      all(homogenize(cm(3), w).value == 0 for w in samples))

xi = SnakeQM()
print("\nsnake quasimorphism on [a,b]^n:", [xi(power(parse_word("a b A B"), n)) for n in range(1, 6)])

print("\nhomogenized psi_c(3i) on w_(3j):")
print(independence_matrix(4).astype(int))
print("w_3 =", format_word(w_m(3)))
