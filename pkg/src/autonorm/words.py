"""Reduced words in the free group F2 = <a, b>.

A reduced word is stored as a run of syllables.  Since F2 has only two
generators, consecutive syllables of a reduced word always alternate between
``a`` and ``b``, so a word is fully described by the generator of its first
syllable and the tuple of signed syllable exponents.

Text grammar: tokens ``a``, ``b``, ``A`` (= a^-1), ``B`` (= b^-1), each with an
optional ``^<int>`` exponent; whitespace is ignored.  The empty string (or
``1``) is the identity.
"""

from __future__ import annotations

import math
import random
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

GENERATORS = "ab"
_LETTER_CODE = {"a": (0, 1), "A": (0, -1), "b": (1, 1), "B": (1, -1)}
_TOKEN = re.compile(r"([aAbB])(?:\^\s*([+-]?\d+))?")


class WordSyntaxError(ValueError):
    """Raised on malformed word text."""


class NotPrimitiveError(ValueError):
    """Raised when an operation requires a primitive element."""


@dataclass(frozen=True)
class Syllable:
    generator: str
    exponent: int

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ValueError(f"unknown generator {self.generator!r}")
        if self.exponent == 0:
            raise ValueError("syllable exponent must be nonzero")


@dataclass(frozen=True)
class Word:
    """A freely reduced word.

    ``start`` is the generator index (0 for a, 1 for b) of the first syllable,
    ``exps`` the nonzero syllable exponents.  The identity has ``exps == ()``
    and ``start == 0``.
    """

    start: int = 0
    exps: tuple[int, ...] = ()

    def __post_init__(self):
        if any(e == 0 for e in self.exps):
            raise ValueError("syllable exponents must be nonzero")
        if not self.exps and self.start != 0:
            object.__setattr__(self, "start", 0)

    # construction -----------------------------------------------------

    @classmethod
    def identity(cls) -> "Word":
        return cls()

    @classmethod
    def generator(cls, g: str, exponent: int = 1) -> "Word":
        if exponent == 0:
            return cls()
        return cls(GENERATORS.index(g), (exponent,))

    @classmethod
    def parse(cls, text: str) -> "Word":
        return parse_word(text)

    @classmethod
    def from_syllables(cls, syllables: Iterable[tuple[int, int]]) -> "Word":
        """Reduce a sequence of (generator index, exponent) pairs."""
        return _from_runs(syllables)

    # views -------------------------------------------------------------

    def gen(self, i: int) -> int:
        return self.start ^ (i & 1)

    @property
    def syllables(self) -> tuple[Syllable, ...]:
        return tuple(Syllable(GENERATORS[self.gen(i)], e) for i, e in enumerate(self.exps))

    def runs(self) -> list[tuple[int, int]]:
        return [(self.gen(i), e) for i, e in enumerate(self.exps)]

    def letters(self) -> str:
        """Expanded letter string, e.g. ``"aaBa"``."""
        out = []
        for g, e in self.runs():
            ch = GENERATORS[g]
            out.append((ch if e > 0 else ch.upper()) * abs(e))
        return "".join(out)

    def __len__(self) -> int:
        return sum(abs(e) for e in self.exps)

    @property
    def num_syllables(self) -> int:
        return len(self.exps)

    def is_identity(self) -> bool:
        return not self.exps

    def __str__(self) -> str:
        return format_word(self)

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r})"

    # group operations -------------------------------------------------

    def __mul__(self, other: "Word") -> "Word":
        return concat(self, other)

    def __pow__(self, n: int) -> "Word":
        return power(self, n)

    def inverse(self) -> "Word":
        return invert(self)


# text -----------------------------------------------------------------


def parse_word(text: str) -> Word:
    stripped = "".join(text.split())
    if stripped in ("", "1"):
        return Word()
    pos = 0
    runs = []
    while pos < len(stripped):
        m = _TOKEN.match(stripped, pos)
        if m is None:
            raise WordSyntaxError(f"cannot parse word {text!r} at position {pos}: {stripped[pos:]!r}")
        g, sign = _LETTER_CODE[m.group(1)]
        k = int(m.group(2)) if m.group(2) is not None else 1
        runs.append((g, sign * k))
        pos = m.end()
    return _from_runs(runs)


def format_word(w: Word) -> str:
    parts = []
    for g, e in w.runs():
        ch = GENERATORS[g] if e > 0 else GENERATORS[g].upper()
        parts.append(ch if abs(e) == 1 else f"{ch}^{abs(e)}")
    return " ".join(parts)


# reduction -------------------------------------------------------------


def _from_runs(runs: Iterable[tuple[int, int]]) -> Word:
    gens: list[int] = []
    exps: list[int] = []
    for g, e in runs:
        if e == 0:
            continue
        if gens and gens[-1] == g:
            s = exps[-1] + e
            if s == 0:
                gens.pop()
                exps.pop()
            else:
                exps[-1] = s
        else:
            gens.append(g)
            exps.append(e)
    if not exps:
        return Word()
    return Word(gens[0], tuple(exps))


def normalize(raw: Sequence) -> Word:
    """Freely reduce a sequence of signed letters.

    Letters may be given as strings (``"a"``, ``"A"``, ``"b^-1"``) or as
    ``(generator, exponent)`` pairs with generator ``"a"``/``"b"`` or 0/1.
    """
    runs = []
    for item in raw:
        if isinstance(item, str):
            w = parse_word(item)
            runs.extend(w.runs())
        else:
            g, e = item
            if isinstance(g, str):
                g = GENERATORS.index(g)
            runs.append((g, e))
    return _from_runs(runs)


def _join(a: Word, b: Word) -> Word:
    if not a.exps:
        return b
    if not b.exps:
        return a
    ea = list(a.exps)
    eb = list(b.exps)
    last_gen = a.gen(len(ea) - 1)
    first_gen = b.start
    lo = 0
    while ea and lo < len(eb) and last_gen == first_gen:
        s = ea[-1] + eb[lo]
        if s != 0:
            ea[-1] = s
            lo += 1
            break
        ea.pop()
        lo += 1
        # both neighbours now carry the other generator
        last_gen ^= 1
        first_gen ^= 1
    rest = eb[lo:]
    if not ea:
        if not rest:
            return Word()
        return Word(b.gen(lo), tuple(rest))
    return Word(a.start, tuple(ea) + tuple(rest))


def concat(u: Word, v: Word) -> Word:
    return _join(u, v)


def invert(w: Word) -> Word:
    if not w.exps:
        return w
    k = len(w.exps)
    return Word(w.gen(k - 1), tuple(-e for e in reversed(w.exps)))


def cyclic_decompose(w: Word) -> tuple[Word, Word]:
    """Split ``w = u * t * u^-1`` with ``t`` cyclically reduced."""
    exps = list(w.exps)
    i, j = 0, len(exps) - 1
    prefix: list[tuple[int, int]] = []
    while j > i and (j - i) % 2 == 0:
        g = w.gen(i)
        e1, ek = exps[i], exps[j]
        if e1 + ek == 0:
            prefix.append((g, e1))
            i += 1
            j -= 1
            continue
        if (e1 > 0) != (ek > 0):
            c = e1 if abs(e1) < abs(ek) else -ek
            prefix.append((g, c))
            exps[i] -= c
            exps[j] += c
            if exps[i] == 0:
                i += 1
            if exps[j] == 0:
                j -= 1
        break
    if j < i:
        core = Word()
    else:
        core = Word(w.gen(i), tuple(exps[i : j + 1]))
    return _from_runs(prefix), core


def cyclic_reduce(w: Word) -> Word:
    return cyclic_decompose(w)[1]


def _core_power(t: Word, n: int) -> Word:
    """n-th power (n >= 1) of a cyclically reduced word."""
    e = t.exps
    if len(e) == 1:
        return Word(t.start, (e[0] * n,))
    if t.start == t.gen(len(e) - 1):
        # first and last syllables share a generator (and sign): they merge
        middle = list(e[1:-1]) + [e[-1] + e[0]]
        exps = [e[0]] + middle * (n - 1) + list(e[1:])
        return Word(t.start, tuple(exps))
    return Word(t.start, e * n)


def power(w: Word, n: int) -> Word:
    if n == 0 or not w.exps:
        return Word()
    if n < 0:
        return power(invert(w), -n)
    u, t = cyclic_decompose(w)
    return _join(_join(u, _core_power(t, n)), invert(u))


def commutator(u: Word, v: Word) -> Word:
    return u * v * invert(u) * invert(v)


A = Word(0, (1,))
B = Word(1, (1,))


# palindromes and the Klein action ---------------------------------------


def is_palindrome(w: Word) -> bool:
    # the letter string reads the same backwards iff the syllable runs do
    k = len(w.exps)
    if k == 0:
        return True
    if w.start != w.gen(k - 1):
        return False
    return w.exps == tuple(reversed(w.exps))


@dataclass(frozen=True)
class KleinElement:
    flip_a: bool = False
    flip_b: bool = False

    def __mul__(self, other: "KleinElement") -> "KleinElement":
        return KleinElement(self.flip_a != other.flip_a, self.flip_b != other.flip_b)

    @staticmethod
    def all() -> tuple["KleinElement", ...]:
        return (IDENTITY, SIGMA_A, SIGMA_B, SIGMA)

    def __str__(self) -> str:
        return {(False, False): "id", (True, False): "sigma_a", (False, True): "sigma_b", (True, True): "sigma"}[
            (self.flip_a, self.flip_b)
        ]


IDENTITY = KleinElement()
SIGMA_A = KleinElement(True, False)
SIGMA_B = KleinElement(False, True)
SIGMA = KleinElement(True, True)


def klein_act(g: KleinElement, w: Word) -> Word:
    flips = (g.flip_a, g.flip_b)
    if not w.exps or not any(flips):
        return w
    return Word(w.start, tuple(-e if flips[w.gen(i)] else e for i, e in enumerate(w.exps)))


def abelianize(w: Word) -> tuple[int, int]:
    sums = [0, 0]
    for i, e in enumerate(w.exps):
        sums[w.gen(i)] += e
    return sums[0], sums[1]


# automorphisms ------------------------------------------------------------


@dataclass(frozen=True)
class Automorphism:
    """An endomorphism of F2 given by the images of a and b."""

    image_a: Word
    image_b: Word

    @classmethod
    def identity(cls) -> "Automorphism":
        return cls(A, B)

    def __call__(self, w: Word) -> Word:
        images = (self.image_a, self.image_b)
        out = Word()
        for g, e in w.runs():
            out = _join(out, power(images[g], e))
        return out

    def __mul__(self, other: "Automorphism") -> "Automorphism":
        # composition: (self * other)(w) = self(other(w))
        return Automorphism(self(other.image_a), self(other.image_b))

    @classmethod
    def inner(cls, g: Word) -> "Automorphism":
        """x -> g x g^-1."""
        gi = invert(g)
        return cls(g * A * gi, g * B * gi)


_MOVE_KINDS = ("invert_a", "invert_b", "swap_ab", "right_multiply_a_by_b", "right_multiply_b_by_a")


@dataclass(frozen=True)
class NielsenMove:
    """Elementary automorphism of F2.

    ``right_multiply_a_by_b`` sends a to ab (a to ab^-1 when ``inverse``),
    ``right_multiply_b_by_a`` sends b to ba (b to ba^-1 when ``inverse``).  The
    other three kinds are involutions and ignore the flag.
    """

    kind: str
    inverse: bool = False

    def __post_init__(self):
        if self.kind not in _MOVE_KINDS:
            raise ValueError(f"unknown Nielsen move {self.kind!r}")

    @property
    def automorphism(self) -> Automorphism:
        s = -1 if self.inverse else 1
        if self.kind == "invert_a":
            return Automorphism(invert(A), B)
        if self.kind == "invert_b":
            return Automorphism(A, invert(B))
        if self.kind == "swap_ab":
            return Automorphism(B, A)
        if self.kind == "right_multiply_a_by_b":
            return Automorphism(Word(0, (1, s)), B)
        return Automorphism(A, Word(1, (1, s)))

    def inverted(self) -> "NielsenMove":
        if self.kind.startswith("right_multiply"):
            return NielsenMove(self.kind, not self.inverse)
        return self

    def __call__(self, w: Word) -> Word:
        return self.automorphism(w)


ALL_MOVES = tuple(
    [NielsenMove("invert_a"), NielsenMove("invert_b"), NielsenMove("swap_ab")]
    + [NielsenMove(k, inv) for k in _MOVE_KINDS[3:] for inv in (False, True)]
)
# length-reducing candidates, in fixed tie-breaking order
_TRANSVECTIONS = tuple(m for m in ALL_MOVES if m.kind.startswith("right_multiply"))


def compose_moves(moves: Sequence[NielsenMove]) -> Automorphism:
    """The automorphism ``moves[0] o moves[1] o ... o moves[-1]``."""
    phi = Automorphism.identity()
    for m in moves:
        phi = phi * m.automorphism
    return phi


def is_primitive(w: Word) -> tuple[bool, tuple[NielsenMove, ...] | None]:
    """Decide primitivity by Whitehead reduction of the cyclic word.

    Returns ``(True, moves)`` where ``compose_moves(moves)(a)`` is conjugate to
    ``w``, or ``(False, None)``.
    """
    ea, eb = abelianize(w)
    if math.gcd(abs(ea), abs(eb)) != 1:
        return False, None
    t = cyclic_reduce(w)
    applied: list[NielsenMove] = []
    while len(t) > 1:
        for m in _TRANSVECTIONS:
            cand = cyclic_reduce(m(t))
            if len(cand) < len(t):
                t = cand
                applied.append(m)
                break
        else:
            return False, None
    # t is now a single letter x^{+-1}; rho maps a to it
    g, e = t.runs()[0]
    rho = {
        (0, 1): [],
        (0, -1): [NielsenMove("invert_a")],
        (1, 1): [NielsenMove("swap_ab")],
        (1, -1): [NielsenMove("invert_b"), NielsenMove("swap_ab")],
    }[(g, e)]
    # applied[k-1] o ... o applied[0] sends w to a conjugate of x; invert it
    witness = [m.inverted() for m in applied] + rho
    return True, tuple(witness)


# two-palindrome factorization -----------------------------------------------

# p(theta) is defined by sigma o theta o sigma o theta^-1 = conjugation by p(theta)
_MOVE_COCYCLE = {
    NielsenMove("invert_a"): Word(),
    NielsenMove("invert_b"): Word(),
    NielsenMove("swap_ab"): Word(),
    NielsenMove("right_multiply_a_by_b"): B,
    NielsenMove("right_multiply_a_by_b", True): invert(B),
    NielsenMove("right_multiply_b_by_a"): A,
    NielsenMove("right_multiply_b_by_a", True): invert(A),
}


def move_cocycle(m: NielsenMove) -> Word:
    return _MOVE_COCYCLE[m]


def cocycle(moves: Sequence[NielsenMove]) -> Word:
    """p(moves[0] o ... o moves[-1]) via p(theta xi) = p(theta) theta(p(xi))."""
    p = Word()
    phi = Automorphism.identity()
    for m in moves:
        p = p * phi(_MOVE_COCYCLE[m])
        phi = phi * m.automorphism
    return p


def conjugator(w: Word, v: Word) -> Word | None:
    """Some g with ``g v g^-1 == w``, or None if w and v are not conjugate."""
    uw, tw = cyclic_decompose(w)
    uv, tv = cyclic_decompose(v)
    sw, sv = tw.letters(), tv.letters()
    if len(sw) != len(sv):
        return None
    if not sw:
        return Word()
    r = (sv + sv).find(sw)
    if r < 0:
        return None
    x = parse_word(sv[:r]) if r else Word()
    # tw = x^-1 tv x
    return uw * invert(x) * invert(uv)


def _z_function(s: str) -> list[int]:
    n = len(s)
    z = [0] * n
    if n:
        z[0] = n
    lo = hi = 0
    for i in range(1, n):
        if i < hi:
            z[i] = min(hi - i, z[i - lo])
        while i + z[i] < n and s[z[i]] == s[i + z[i]]:
            z[i] += 1
        if i + z[i] > hi:
            lo, hi = i, i + z[i]
    return z


def _palindromic_prefixes(s: str) -> list[bool]:
    """out[k] tells whether s[:k] reads the same both ways (k = 0..len(s))."""
    n = len(s)
    z = _z_function(s + "#" + s[::-1])
    return [True] + [z[2 * n + 1 - k] >= k for k in range(1, n + 1)]


def palindrome_split(w: Word) -> tuple[Word, Word] | None:
    """Split the letters of ``w`` as u v, both palindromes, longest u first."""
    s = w.letters()
    pre = _palindromic_prefixes(s)
    suf = _palindromic_prefixes(s[::-1])
    n = len(s)
    for k in range(n, -1, -1):
        if pre[k] and suf[n - k]:
            return parse_word(s[:k]), parse_word(s[k:])
    return None


def palindrome_factor(w: Word) -> tuple[Word, Word]:
    """Write a primitive ``w`` as ``u * v`` with ``u`` and ``v`` palindromes.

    A split of the reduced word itself is preferred; otherwise the factors
    come from the cocycle construction.
    """
    ok, moves = is_primitive(w)
    if not ok:
        raise NotPrimitiveError(f"{format_word(w)!r} is not primitive")
    return palindrome_split(w) or _cocycle_factor(w, moves)


def palindrome_factor_cocycle(w: Word) -> tuple[Word, Word]:
    """The two-palindrome factorization read off the cocycle of a witness."""
    ok, moves = is_primitive(w)
    if not ok:
        raise NotPrimitiveError(f"{format_word(w)!r} is not primitive")
    return _cocycle_factor(w, moves)


def _cocycle_factor(w: Word, moves) -> tuple[Word, Word]:
    theta = compose_moves(moves)
    g = conjugator(w, theta.image_a)
    # Theta = I_g o theta o swap has Theta(b) = w, and with tau: a -> ab
    # (p(tau) = b) the cocycle gives w = p(Theta)^-1 p(Theta tau)
    p = klein_act(SIGMA, g) * invert(g) * g * cocycle(moves) * invert(g)
    return invert(p), p * w


# random words ------------------------------------------------------------------


def random_word(rng: random.Random, mean_length: float = 10.0, max_length: int | None = None) -> Word:
    """Random reduced word with geometric length distribution.

    Each letter is uniform among the three letters that do not cancel the
    previous one.
    """
    q = 1.0 / (mean_length + 1.0)
    n = 0
    while rng.random() >= q:
        n += 1
        if max_length is not None and n >= max_length:
            break
    codes = []
    prev = None
    for _ in range(n):
        c = rng.randrange(4) if prev is None else rng.choice([x for x in range(4) if x != prev ^ 1])
        codes.append(c)
        prev = c
    return _from_runs((c >> 1, 1 if c % 2 == 0 else -1) for c in codes)


def random_palindrome(rng: random.Random, mean_length: float = 10.0, max_length: int | None = None) -> Word:
    half = random_word(rng, mean_length / 2, None if max_length is None else max_length // 2)
    letters = half.letters()
    mid = ""
    if rng.random() < 0.5:
        choices = [c for c in "aAbB" if not letters or c != letters[-1].swapcase()]
        mid = rng.choice(choices)
    return parse_word(letters + mid + letters[::-1])


def random_moves(rng: random.Random, max_moves: int = 20) -> tuple[NielsenMove, ...]:
    n = rng.randint(0, max_moves)
    return tuple(rng.choice(ALL_MOVES) for _ in range(n))


def random_primitive(rng: random.Random, max_moves: int = 20) -> Word:
    return compose_moves(random_moves(rng, max_moves)).image_a
