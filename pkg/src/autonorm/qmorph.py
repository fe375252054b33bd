"""Quasimorphisms on F2: window (syllable) quasimorphisms, the snake
quasimorphism, homogenization and empirical defect / invariance checks."""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .words import (
    KleinElement,
    Word,
    concat,
    cyclic_reduce,
    invert,
    klein_act,
    power,
    random_word,
)


class QuasimorphismSpecError(ValueError):
    pass


@dataclass(frozen=True)
class WindowQuasimorphism:
    """Bounded window function ``c`` on m-tuples of syllable exponents.

    ``c`` receives a 2-D integer array of windows (one window per row) and
    returns one integer per row.
    """

    m: int
    bound: int
    c: Callable[[np.ndarray], np.ndarray]
    name: str = "c"

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("window size m must be at least 2")
        if self.bound <= 0:
            raise ValueError("bound must be positive")

    def values(self, windows: np.ndarray) -> np.ndarray:
        return np.asarray(self.c(windows), dtype=np.int64)


def make_cm(m: int) -> WindowQuasimorphism:
    """c_m(i_1, ..., i_m) = sgn(|i_1| - |i_m|)."""
    if m < 2:
        raise ValueError("c_m needs m >= 2")

    def c(windows):
        windows = np.abs(windows)
        return np.sign(windows[:, 0] - windows[:, -1])

    return WindowQuasimorphism(m, 1, c, name=f"c_{m}")


def table_window(m: int, table: dict[tuple[int, ...], int], default: int = 0) -> WindowQuasimorphism:
    """Window function given by a finite table of tuples (0 elsewhere).

    The table is completed by antisymmetry; conflicting entries raise.
    """
    full = dict(table)
    for key, val in table.items():
        mirror = tuple(-i for i in reversed(key))
        if full.get(mirror, -val) != -val:
            raise ValueError(f"table violates antisymmetry at {key}")
        full[mirror] = -val
    if default != 0:
        raise ValueError("antisymmetry forces the default value to be 0")
    bound = max([abs(v) for v in full.values()] + [1])

    def c(windows):
        return np.array([full.get(tuple(int(i) for i in row), 0) for row in windows], dtype=np.int64)

    return WindowQuasimorphism(m, bound, c, name="table")


def window_eval(q: WindowQuasimorphism, w: Word) -> int:
    return _window_sum(q, w.exps)


def _window_sum(q: WindowQuasimorphism, exps) -> int:
    if len(exps) < q.m:
        return 0
    arr = np.asarray(exps, dtype=np.int64)
    return int(q.values(sliding_window_view(arr, q.m)).sum())


def snake_eval(w: Word) -> int:
    """Left turns minus right turns of the lattice path drawn by ``w``.

    ``a^e`` is a horizontal segment of length |e| (direction sgn e), ``b^e``
    a vertical one.  Every syllable junction is a quarter turn, left exactly
    when the cross product of consecutive directions is positive.
    """
    if len(w.exps) < 2:
        return 0
    e = np.sign(np.asarray(w.exps, dtype=np.int64))
    turns = e[:-1] * e[1:]
    # a-to-b junction: cross((s1,0),(0,s2)) = s1 s2; b-to-a: -s1 s2
    orient = np.where((np.arange(len(turns)) + w.start) % 2 == 0, 1, -1)
    return int((orient * turns).sum())


# quasimorphism objects ----------------------------------------------------------


class Quasimorphism:
    """A real-valued function on F2 with a declared defect bound."""

    spec: str = ""
    defect: float = 0.0
    klein_invariant: bool = False
    integer_valued: bool = True

    def __call__(self, w: Word) -> float:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.spec}>"


class WindowQM(Quasimorphism):
    def __init__(self, window: WindowQuasimorphism, spec: str | None = None, klein_invariant: bool = False):
        self.window = window
        self.spec = spec or window.name
        self.defect = 3 * (window.m + 1) * window.bound
        self.klein_invariant = klein_invariant

    def __call__(self, w: Word) -> int:
        return window_eval(self.window, w)


class SnakeQM(Quasimorphism):
    spec = "snake"
    # |xi(s) - xi(st) + xi(t)| <= 3: one turn per junction of three reduced products
    defect = 3.0

    def __call__(self, w: Word) -> int:
        return snake_eval(w)


class HomogenizedQM(Quasimorphism):
    integer_valued = False

    def __init__(self, inner: Quasimorphism, n_max: int = 32, tol: float = 0.0):
        self.inner = inner
        self.n_max = n_max
        self.tol = tol
        self.spec = f"homog({inner.spec})"
        # homogenization at most doubles the defect
        self.defect = 2 * inner.defect
        self.klein_invariant = inner.klein_invariant
        self._cache: dict[Word, float] = {}

    def __call__(self, w: Word) -> float:
        hit = self._cache.get(w)
        if hit is None:
            hit = periodic_homogenization(self.inner, w)
            if hit is None:
                hit = homogenize(self.inner, w, self.n_max, self.tol).value
            if len(self._cache) < 200_000:
                self._cache[w] = hit
        return hit


def cm(m: int) -> WindowQM:
    return WindowQM(make_cm(m), spec=f"cm:{m}", klein_invariant=True)


def parse_qm(spec: str) -> Quasimorphism:
    """Parse ``cm:<m>``, ``snake`` or ``homog(<spec>)``."""
    s = spec.strip()
    m = re.fullmatch(r"homog\((.*)\)", s)
    if m:
        return HomogenizedQM(parse_qm(m.group(1)))
    m = re.fullmatch(r"cm:(\d+)", s)
    if m:
        k = int(m.group(1))
        if k < 2:
            raise QuasimorphismSpecError(f"cm:<m> needs m >= 2, got {spec!r}")
        return cm(k)
    if s == "snake":
        return SnakeQM()
    raise QuasimorphismSpecError(f"unknown quasimorphism spec {spec!r}")


BUILTIN_KLEIN_INVARIANT = ("homog(cm:2)", "homog(cm:3)", "homog(cm:4)")


# homogenization -----------------------------------------------------------------


@dataclass(frozen=True)
class HomogenizationResult:
    value: float
    exact: bool
    n_used: int
    residual: float
    fraction: Fraction | None = field(default=None, compare=False)

    def to_json(self) -> dict:
        d = {"value": self.value, "exact": self.exact, "n_used": self.n_used, "residual": self.residual}
        if self.fraction is not None:
            d["fraction"] = str(self.fraction)
        return d


def homogenize(q: Quasimorphism, w: Word, n_max: int = 32, tol: float = 0.0) -> HomogenizationResult:
    """lim q(w^n)/n by eventual-affine detection.

    The homogenization is conjugation invariant, so powers of the cyclically
    reduced core of ``w`` are used.  When the second differences of
    n -> q(t^n) vanish (within ``tol``) over the trailing detection window the
    slope is exact; otherwise q(t^n_max)/n_max is returned with residual
    defect/n_max.
    """
    if n_max < 8:
        raise ValueError("n_max must be at least 8")
    t = cyclic_reduce(w)
    if t.is_identity():
        return HomogenizationResult(0.0, True, 0, 0.0, Fraction(0))
    window = max(4, n_max // 4)
    vals = [q(power(t, n)) for n in range(1, n_max + 1)]
    tail = np.asarray(vals[-window:], dtype=float)
    second = np.diff(tail, 2)
    if np.all(np.abs(second) <= tol):
        slope = vals[-1] - vals[-2]
        if isinstance(slope, (int, np.integer)):
            frac = Fraction(int(slope))
        else:
            frac = Fraction(slope).limit_denominator(window)
        return HomogenizationResult(float(slope), True, n_max, 0.0, frac)
    return HomogenizationResult(vals[-1] / n_max, False, n_max, q.defect / n_max, None)


def cyclic_syllables(w: Word) -> tuple[int, tuple[int, ...]]:
    """Start generator and exponents of a conjugate of ``w`` whose powers are
    plain repetitions of the syllable sequence.

    A single syllable comes back unchanged; otherwise the count is even.
    """
    t = cyclic_reduce(w)
    exps = t.exps
    if len(exps) >= 3 and len(exps) % 2 == 1:
        exps = (exps[-1] + exps[0],) + exps[1:-1]
    return t.start, exps


def periodic_homogenization(q: Quasimorphism, w: Word) -> float | None:
    """Closed form of the homogenization for window and snake quasimorphisms.

    On t^n the window sum counts every cyclic window of t once per period, so
    the slope is the sum over cyclic windows.  Returns None for other types.
    """
    if not isinstance(q, (WindowQM, SnakeQM)):
        return None
    start, exps = cyclic_syllables(w)
    k = len(exps)
    if k < 2:
        return 0.0
    e = np.asarray(exps, dtype=np.int64)
    if isinstance(q, SnakeQM):
        sg = np.sign(e)
        orient = np.where((np.arange(k) + start) % 2 == 0, 1, -1)
        return float((orient * sg * np.roll(sg, -1)).sum())
    m = q.window.m
    idx = (np.arange(k)[:, None] + np.arange(m)[None, :]) % k
    return float(q.window.values(e[idx]).sum())


# empirical checks -----------------------------------------------------------------


def word_sampler(seed: int, mean_length: float = 20.0, max_length: int = 200) -> Callable[[], Word]:
    rng = random.Random(seed)
    return lambda: random_word(rng, mean_length, max_length)


def defect_pair(q: Quasimorphism, s: Word, t: Word) -> float:
    return abs(q(s) - q(concat(s, t)) + q(t))


def defect_scan(q: Quasimorphism, sampler: Callable[[], Word], trials: int, seed: int = 0) -> float:
    """Largest |q(s) - q(st) + q(t)| over sampled pairs.

    Half of the pairs are built so that ``t`` starts by cancelling a random
    suffix of ``s``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(trials):
        s, t = sampler(), sampler()
        if rng.random() < 0.5 and s.num_syllables:
            letters = s.letters()
            k = rng.randint(1, len(letters))
            t = concat(invert(Word.parse(letters[-k:])), t)
        worst = max(worst, defect_pair(q, s, t))
    return worst


@dataclass
class InvarianceReport:
    invariant: bool
    per_element: dict[str, bool]
    counterexample: Word | None = None

    def __bool__(self) -> bool:
        return self.invariant


def check_klein_invariance(
    q: Quasimorphism,
    sampler: Callable[[], Word],
    trials: int,
    elements: tuple[KleinElement, ...] | None = None,
) -> InvarianceReport:
    elements = elements or KleinElement.all()
    per = {str(g): True for g in elements}
    bad = None
    for _ in range(trials):
        w = sampler()
        base = q(w)
        for g in elements:
            if per[str(g)] and q(klein_act(g, w)) != base:
                per[str(g)] = False
                bad = bad or w
    return InvarianceReport(all(per.values()), per, bad)


def w_m(m: int) -> Word:
    """a^{2m} b^{2m-1} ... a^2 b."""
    return Word(0, tuple(range(2 * m, 0, -1)))


def independence_matrix(k: int, n_max: int = 32) -> np.ndarray:
    """a_ij = homogenized psi_{c_{3i}} evaluated on w_{3j}."""
    out = np.zeros((k, k))
    for i in range(1, k + 1):
        q = cm(3 * i)
        for j in range(1, k + 1):
            out[i - 1, j - 1] = homogenize(q, w_m(3 * j), n_max).value
    return out
