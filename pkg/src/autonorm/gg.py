"""Monte Carlo estimation of the Gambaudo-Ghys quasimorphism G(psi o pi) on
torus maps, the region oracle for eggbeaters and autonomous-norm bounds.

Samples are pairs (x, y) drawn uniformly from T^2 x T^2.  Randomness comes
from Philox streams keyed by the seed, one stream per fixed-size chunk of
sample indices, so results do not depend on how chunks are scheduled.

Braid extraction here is the batched form of ``winding``: every letter of a
shear word moves both points linearly in time, hence contributes exactly one
straight segment to the difference loop; ODE flows contribute one segment per
integrator step.
"""

from __future__ import annotations

import math
import os
import secrets
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

from .flows import HamiltonianFlow, MapWord, Shear, TorusMap, eggbeater
from .qmorph import HomogenizedQM, Quasimorphism
from .winding import BasepointConfig, braid_of_map, crossing_events, geodesic_displacement, word_from_codes
from .words import Word, parse_word

SHORTCUT = "fixed_point_shortcut"
DEFAULT_POWER = 4
MAX_ATTEMPTS = 10
CHUNK = 2048
THREADS_ENV = "AUTONORM_THREADS"

_ST_USED, _ST_NONFIXED, _ST_REJECTED = 0, 1, 2


class GGSoundnessError(RuntimeError):
    """The estimate cannot be trusted (nonfixed cap exceeded, resampling exhausted)."""


@dataclass(frozen=True)
class GGConfig:
    samples: int = 100_000
    seed: int | None = None
    delta: float = 1e-6
    eta: float = 1e-9
    power: int | None = None
    nonfixed_cap: float = 0.05
    basepoints: BasepointConfig = field(default_factory=BasepointConfig)

    def __post_init__(self):
        if self.samples < 100:
            raise ValueError("gg_estimate needs at least 100 samples")
        if self.power is not None and self.power < 1:
            raise ValueError("power must be a positive integer")
        if self.seed is not None and not 0 <= self.seed < 2**128:
            raise ValueError("seed must lie in [0, 2^128)")
        if self.delta <= 0 or self.eta <= 0:
            raise ValueError("delta and eta must be positive")


@dataclass(frozen=True)
class GGEstimate:
    value: float
    stderr: float
    samples_used: int
    samples_rejected_punct: int
    samples_nonfixed: int
    mode: str
    seed: int
    requested: int
    bias_bound: float = 0.0
    max_abs_integrand: float = 0.0

    def __post_init__(self):
        if self.samples_used < 1:
            raise ValueError("an estimate needs at least one used sample")
        if self.stderr < 0:
            raise ValueError("stderr must be nonnegative")

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "stderr": self.stderr,
            "samples": self.samples_used,
            "rejected": self.samples_rejected_punct,
            "nonfixed": self.samples_nonfixed,
            "mode": self.mode,
            "seed": self.seed,
            "requested": self.requested,
            "bias_bound": self.bias_bound,
        }


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def fresh_seed() -> int:
    return secrets.randbits(63)


def _stream(seed: int, chunk: int, attempt: int) -> np.random.Generator:
    key = [seed & 0xFFFFFFFFFFFFFFFF, seed >> 64]
    return np.random.Generator(np.random.Philox(key=key, counter=[0, 0, attempt, chunk]))


def _is_shear_word(m: TorusMap) -> bool:
    return all(isinstance(a, Shear) for a, _ in m.letters())


def _atoms(m: TorusMap, p: int) -> list[tuple[TorusMap, int]]:
    letters = m.letters()
    if p == 1:
        return letters
    return MapWord(((m, p),)).letters()


# batched braid extraction -------------------------------------------------------------


class _LoopBatch:
    """Difference loops of M sample pairs, fed segment by segment."""

    def __init__(self, M: int, delta: float):
        self.M = M
        self.delta = delta
        self.owner = np.arange(M)
        self.min_dist = np.full(M, np.inf)
        self.events: list[tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]] = []
        self.nseg = 0

    def vertex(self, V) -> None:
        self.min_dist = np.minimum(self.min_dist, np.hypot(*(V - np.round(V)).T))

    def segment(self, P, Q) -> None:
        ev = crossing_events(P, Q, self.owner, delta=self.delta)
        if len(ev.owner):
            np.minimum.at(self.min_dist, ev.owner, ev.clearance)
            self.events.append((ev.owner, np.full(len(ev.owner), self.nseg), ev.param, ev.code))
        self.vertex(Q)
        self.nseg += 1

    def codes(self) -> list[bytes]:
        if not self.events:
            return [b""] * self.M
        owner, order, t, code = (np.concatenate(x) for x in zip(*self.events))
        idx = np.lexsort((t, order, owner))
        owner, code = owner[idx], code[idx].astype(np.uint8)
        bounds = np.searchsorted(owner, np.arange(self.M + 1))
        raw = code.tobytes()
        return [raw[bounds[i] : bounds[i + 1]] for i in range(self.M)]


def _batch_codes(atoms, X, Y, bp: BasepointConfig) -> tuple[list[bytes], np.ndarray]:
    """Crossing codes of the difference loops for the pairs (X[i], Y[i]).

    Returns the codes and a boolean mask of rejected pairs.
    """
    M = len(X)
    z1, z2 = np.asarray(bp.z1, dtype=float), np.asarray(bp.z2, dtype=float)
    tx, a1 = geodesic_displacement(z1, X, bp.delta)
    ty, a2 = geodesic_displacement(z2, Y, bp.delta)
    batch = _LoopBatch(M, bp.delta)
    base = np.tile(bp.base_difference, (M, 1))
    batch.vertex(base)
    D = base + tx - ty
    batch.segment(base, D)
    x, y = X.copy(), Y.copy()
    for atom, e in atoms:
        if isinstance(atom, Shear):
            nx, ny = atom.lift(x, e), atom.lift(y, e)
            D2 = D + (nx - x) - (ny - y)
            batch.segment(D, D2)
            D, x, y = D2, nx, ny
        elif isinstance(atom, HamiltonianFlow):
            state = {"D": D}

            def step(i, old, new, state=state):
                D2 = state["D"] + (new[:M] - old[:M]) - (new[M:] - old[M:])
                batch.segment(state["D"], D2)
                state["D"] = D2

            xy = atom.integrate(np.vstack([x, y]), e * atom.t_final, step)
            D, x, y = state["D"], xy[:M], xy[M:]
        else:
            raise TypeError(f"no batched braid extraction for {type(atom).__name__}")
    ux, a3 = geodesic_displacement(x, z1, bp.delta)
    uy, a4 = geodesic_displacement(y, z2, bp.delta)
    batch.segment(D, D + ux - uy)
    rejected = a1 | a2 | a3 | a4 | (batch.min_dist < bp.delta)
    return batch.codes(), rejected


def batch_free_words(m: TorusMap, X, Y, bp: BasepointConfig = BasepointConfig(), power: int = 1) -> list[Word | None]:
    """Free parts of gamma(m^power, x, y) for many pairs; None marks a rejection."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    codes, rej = _batch_codes(_atoms(m, power), X, Y, bp)
    return [None if r else word_from_codes(c) for c, r in zip(codes, rej)]


# the estimator ------------------------------------------------------------------------


class _Sampler:
    def __init__(self, m: TorusMap, qs, cfg: GGConfig, seed: int, power: int | None):
        self.m = m
        self.qs = qs
        self.cfg = cfg
        self.seed = seed
        self.power = power
        self.atoms = _atoms(m, power or 1)
        self.bp = BasepointConfig(cfg.basepoints.z1, cfg.basepoints.z2, cfg.delta)
        self.cache: dict[bytes, tuple[float, ...]] = {}

    def integrand(self, code: bytes) -> tuple[float, ...]:
        hit = self.cache.get(code)
        if hit is None:
            w = word_from_codes(code)
            div = self.power or 1
            hit = tuple(float(q(w)) / div for q in self.qs)
            self.cache[code] = hit
        return hit

    def evaluate(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        M = len(pts)
        X, Y = pts[:, :2], pts[:, 2:]
        status = np.full(M, _ST_USED, dtype=np.int8)
        vals = np.zeros((M, len(self.qs)))
        live = np.arange(M)
        if self.power is None:
            XY = np.vstack([X, Y])
            d = self.m.lift(XY) - XY
            moved = np.abs(d - np.round(d)).max(axis=1) > self.cfg.eta
            nonfixed = moved[:M] | moved[M:]
            status[nonfixed] = _ST_NONFIXED
            live = np.flatnonzero(~nonfixed)
        if len(live):
            codes, rej = _batch_codes(self.atoms, X[live], Y[live], self.bp)
            status[live[rej]] = _ST_REJECTED
            for i, c, r in zip(live, codes, rej):
                if not r:
                    vals[i] = self.integrand(c)
        return vals, status

    def chunk(self, c: int, n: int):
        pts = _stream(self.seed, c, 0).random((n, 4))
        vals = np.zeros((n, len(self.qs)))
        status = np.zeros(n, dtype=np.int8)
        todo = np.arange(n)
        rejected = 0
        for attempt in range(MAX_ATTEMPTS + 1):
            if attempt:
                pts[todo] = _stream(self.seed, c, attempt).random((len(todo), 4))
            v, st = self.evaluate(pts[todo])
            vals[todo], status[todo] = v, st
            bad = st == _ST_REJECTED
            rejected += int(bad.sum())
            todo = todo[bad]
            if not len(todo):
                return vals, status, rejected
        raise GGSoundnessError(f"chunk {c}: samples still rejected after {MAX_ATTEMPTS} resampling rounds")


def gg_estimate_many(qs, m: TorusMap, cfg: GGConfig = GGConfig(), threads: int | None = None) -> list[GGEstimate]:
    """One estimate per quasimorphism in ``qs``, all from the same samples.

    Mode: with ``cfg.power`` unset, shear words use the fixed-point shortcut
    and other maps direct_power(DEFAULT_POWER).
    """
    qs = list(qs)
    if not qs:
        raise ValueError("need at least one quasimorphism")
    power = cfg.power
    if power is None and not _is_shear_word(m):
        power = DEFAULT_POWER
    if power is None:
        for q in qs:
            if not isinstance(q, HomogenizedQM):
                raise ValueError(f"shortcut mode needs a homogenized quasimorphism, got {q.spec!r}")
    seed = fresh_seed() if cfg.seed is None else int(cfg.seed)
    sampler = _Sampler(m, qs, cfg, seed, power)
    N = cfg.samples
    sizes = [min(CHUNK, N - c) for c in range(0, N, CHUNK)]
    threads = threads or default_threads()
    jobs = list(enumerate(sizes))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda j: sampler.chunk(*j), jobs))
    else:
        parts = [sampler.chunk(*j) for j in jobs]
    vals = np.concatenate([p[0] for p in parts])
    status = np.concatenate([p[1] for p in parts])
    rejected = sum(p[2] for p in parts)
    nonfixed = int((status == _ST_NONFIXED).sum())
    used = N - nonfixed
    if nonfixed / N > cfg.nonfixed_cap:
        raise GGSoundnessError(
            f"{nonfixed} of {N} samples are not fixed by the map (cap {cfg.nonfixed_cap:g}); "
            "use direct_power mode (--power)"
        )
    if used < 1:
        raise GGSoundnessError("no usable samples")
    mode = SHORTCUT if power is None else f"direct_power({power})"
    out = []
    for j in range(len(qs)):
        col = vals[:, j]
        top = float(np.abs(col).max())
        stderr = float(col.std(ddof=1) / math.sqrt(N))
        out.append(
            GGEstimate(
                value=float(col.mean()),
                stderr=stderr,
                samples_used=used,
                samples_rejected_punct=rejected,
                samples_nonfixed=nonfixed,
                mode=mode,
                seed=seed,
                requested=N,
                bias_bound=nonfixed / N * top,
                max_abs_integrand=top,
            )
        )
    return out


def gg_estimate(q: Quasimorphism, m: TorusMap, cfg: GGConfig = GGConfig(), threads: int | None = None) -> GGEstimate:
    """Estimate G(q o pi)(m).

    Nonfixed samples in shortcut mode contribute 0 to the mean; their effect is
    bounded by ``bias_bound``.
    """
    return gg_estimate_many([q], m, cfg, threads)[0]


# region oracle -----------------------------------------------------------------------

# strips: x in (1/4 - s, 1/4 + s) is moved by v, y in (3/4 - s, 3/4 + s) by h
_X_PARTS = {"-": lambda s: (0.25 - s, s), "+": lambda s: (0.25, s), "o": lambda s: (0.25 + s, 1 - 2 * s)}
_Y_PARTS = {"-": lambda s: (0.75 - s, s), "+": lambda s: (0.75, s), "o": lambda s: (0.75 + s, 1 - 2 * s)}
_WIDTH = {"-": Polynomial([0, 1]), "+": Polynomial([0, 1]), "o": Polynomial([1, -2])}
# two generic interior positions per cell, as fractions of the cell sides
_REPS = ((0.37, 0.59), (0.71, 0.23))


@dataclass(frozen=True)
class Cell:
    """Product of an x-part and a y-part; parts are '-', '+' (strip halves) or 'o'."""

    xpart: str
    ypart: str

    @property
    def region(self) -> str:
        inx, iny = self.xpart != "o", self.ypart != "o"
        return {(True, True): "S1", (False, False): "S2", (True, False): "S3", (False, True): "S4"}[(inx, iny)]

    @property
    def name(self) -> str:
        return self.region if self.region == "S2" else f"{self.region}{self.xpart if self.xpart != 'o' else ''}{self.ypart if self.ypart != 'o' else ''}"

    def volume(self) -> Polynomial:
        return _WIDTH[self.xpart] * _WIDTH[self.ypart]

    def representative(self, s: float, which: int = 0) -> np.ndarray:
        (x0, wx), (y0, wy) = _X_PARTS[self.xpart](s), _Y_PARTS[self.ypart](s)
        fx, fy = _REPS[which]
        return np.mod([x0 + fx * wx, y0 + fy * wy], 1.0)


CELLS = tuple(Cell(a, b) for a in "-+o" for b in "-+o")


@dataclass(frozen=True)
class RegionPair:
    first: Cell
    second: Cell
    word: Word
    q_value: float
    volume: Polynomial = field(compare=False)
    contribution: float = 0.0


@dataclass(frozen=True)
class RegionPrediction:
    word_spec: Word
    s: float
    q_spec: str
    pairs: tuple[RegionPair, ...]
    total: float

    def total_volume(self) -> Polynomial:
        return sum((p.volume for p in self.pairs), Polynomial([0]))

    def by_region(self) -> dict[tuple[str, str], float]:
        out: dict[tuple[str, str], float] = {}
        for p in self.pairs:
            key = (p.first.region, p.second.region)
            out[key] = out.get(key, 0.0) + p.contribution
        return out

    def to_json(self) -> dict:
        return {
            "word": str(self.word_spec),
            "s": self.s,
            "qm": self.q_spec,
            "total": self.total,
            "regions": {f"{a}x{b}": v for (a, b), v in sorted(self.by_region().items())},
            "pairs": [
                {
                    "first": p.first.name,
                    "second": p.second.name,
                    "word": str(p.word),
                    "q": p.q_value,
                    "volume": [float(c) for c in p.volume.coef],
                    "contribution": p.contribution,
                }
                for p in self.pairs
            ],
        }


def region_oracle(word_spec: Word | str, s: float, q: Quasimorphism) -> RegionPrediction:
    """Semi-analytic value of G(q o pi) on the eggbeater w(v, h).

    Off the thin ramps of the profile the eggbeater moves points by whole
    turns, so the braid class only depends on the pair of cells containing
    (x, y).  Each ordered cell pair is evaluated once on plateau
    representatives and weighted by its exact volume.
    """
    if isinstance(word_spec, str):
        word_spec = parse_word(word_spec)
    g = eggbeater(word_spec, s, 1e-4 * s)
    pairs = []
    total = 0.0
    for c1 in CELLS:
        for c2 in CELLS:
            x = c1.representative(s, 0)
            y = c2.representative(s, 1 if c1 == c2 else 0)
            w = braid_of_map(g, x, y).free
            val = float(q(w))
            vol = c1.volume() * c2.volume()
            contrib = val * float(vol(s))
            total += contrib
            pairs.append(RegionPair(c1, c2, w, val, vol, contrib))
    return RegionPrediction(word_spec, float(s), q.spec, tuple(pairs), total)


# norm bound ---------------------------------------------------------------------------


def aut_norm_lower_bound(psi_value: float, defect: float) -> int:
    """Autonomous-norm lower bound from a quasimorphism vanishing on autonomous maps."""
    if not defect > 0:
        raise ValueError("defect must be positive")
    if psi_value == 0:
        return 0
    return int(math.floor(abs(psi_value) / defect)) + 1
