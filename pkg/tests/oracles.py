"""Slow, independent reference implementations used to cross-check the library."""

from itertools import groupby

INV = {"a": "A", "A": "a", "b": "B", "B": "b"}
HEADING = {"a": (1, 0), "A": (-1, 0), "b": (0, 1), "B": (0, -1)}


def naive_reduce(letters: str) -> str:
    """Cancel adjacent inverse pairs by repeated scanning until none is left."""
    s = letters
    changed = True
    while changed:
        changed = False
        for i in range(len(s) - 1):
            if s[i + 1] == INV[s[i]]:
                s = s[:i] + s[i + 2 :]
                changed = True
                break
    return s


def syllable_exponents(letters: str) -> list[int]:
    out = []
    for ch, grp in groupby(letters, key=str.lower):
        n = 0
        for x in grp:
            n += 1 if x.islower() else -1
        out.append(n)
    return out


def naive_window_sum(c, m: int, letters: str) -> int:
    e = syllable_exponents(naive_reduce(letters))
    return sum(c(tuple(e[i : i + m])) for i in range(len(e) - m + 1))


def c_m(window) -> int:
    d = abs(window[0]) - abs(window[-1])
    return (d > 0) - (d < 0)


def naive_snake(letters: str) -> int:
    """Walk the lattice path letter by letter and count signed quarter turns."""
    s = naive_reduce(letters)
    total = 0
    for x, y in zip(s, s[1:]):
        (p, q), (r, t) = HEADING[x], HEADING[y]
        total += p * t - q * r
    return total


def periodic_slope(c, m: int, exps: list[int]) -> int:
    """Slope of n -> psi_c(t^n) for a word whose powers repeat ``exps`` verbatim."""
    k = len(exps)
    return sum(c(tuple(exps[(i + j) % k] for j in range(m))) for i in range(k))


def w_m_exps(m: int) -> list[int]:
    return list(range(2 * m, 0, -1))
