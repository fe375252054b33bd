r"""
Words, primitivity and palindromes
==================================

Reduced words in F2 are stored as syllables.  A primitive element can be
written as a product of two palindromes; when the reduced word does not split
that way on its own, the factors come from a cocycle on Nielsen moves.
"""

import random

from autonorm.words import (
    compose_moves,
    format_word,
    is_palindrome,
    is_primitive,
    palindrome_factor,
    palindrome_factor_cocycle,
    parse_word,
    random_primitive,
)

w = parse_word("a b a^2 b a b")
ok, moves = is_primitive(w)
print(f"{format_word(w)} primitive: {ok}")
print("witness moves:", [m.kind + ("^-1" if m.inverse else "") for m in moves])
print("witness(a) =", format_word(compose_moves(moves).image_a))

print("\nfactorizations u * v, both palindromes")
rng = random.Random(0)
for _ in range(6):
    p = random_primitive(rng, 8)
    u, v = palindrome_factor(p)
    cu, cv = palindrome_factor_cocycle(p)
    assert is_palindrome(u) and is_palindrome(v) and u * v == p
    print(f"  {format_word(p):<30} = ({format_word(u) or '1'}) ({format_word(v) or '1'})")
    print(f"  {'':<30}   cocycle: ({format_word(cu) or '1'}) ({format_word(cv) or '1'})")

print("\n[a,b] is not primitive:", not is_primitive(parse_word("a b A B"))[0])
