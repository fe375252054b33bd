"""Pure braids from pairs of trajectories on the torus.

The free part is read off the difference loop x - y on the punctured torus
T^2 minus {0}.  The two circles {x = 0} and {y = 0} pass through the puncture
and cut the punctured torus into an open square, so the ordered sequence of
cut crossings of a loop is a complete invariant of its homotopy class:
crossing {x = 0} in the +x direction reads ``a`` (``A`` backwards), crossing
{y = 0} in the +y direction reads ``b`` (``B`` backwards).

All paths are handled as lifted polylines in R^2; segments are straight, so
crossings are solved in closed form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .braid import PureBraidT2
from .flows import TorusMap, Trajectory
from .words import Word, _from_runs

DEFAULT_DELTA = 1e-6

# crossing codes: a, A, b, B
_CODE_RUN = ((0, 1), (0, -1), (1, 1), (1, -1))


class BraidRejected(Exception):
    """A sample pair lies (numerically) in the measure-zero bad set.

    ``reason`` is ``"puncture"`` or ``"ambiguous"``.
    """

    def __init__(self, reason: str, message: str = ""):
        super().__init__(message or reason)
        self.reason = reason


@dataclass(frozen=True)
class BasepointConfig:
    z1: tuple[float, float] = (0.25, 0.75)
    z2: tuple[float, float] = (0.75, 0.25)
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        d = np.subtract(self.z1, self.z2)
        d -= np.round(d)
        if np.hypot(*d) <= self.delta:
            raise ValueError("basepoints must be distinct")

    @property
    def base_difference(self) -> np.ndarray:
        return np.subtract(self.z1, self.z2)


def geodesic_displacement(src, dst, delta: float = DEFAULT_DELTA) -> tuple[np.ndarray, np.ndarray]:
    """Shortest flat displacement from ``src`` to ``dst`` (arrays (..., 2)).

    Returns the displacement and a boolean mask of ambiguous entries (some
    component within ``delta`` of +-1/2).
    """
    d = np.asarray(dst, dtype=float) - np.asarray(src, dtype=float)
    d = d - np.round(d)
    ambiguous = np.any(np.abs(np.abs(d) - 0.5) < delta, axis=-1)
    return d, ambiguous


@dataclass(frozen=True)
class PuncturedLoop:
    """Closed lifted polyline of the difference x - y, based at z1 - z2."""

    vertices: np.ndarray
    delta: float = DEFAULT_DELTA

    def min_puncture_distance(self) -> float:
        P, Q = self.vertices[:-1], self.vertices[1:]
        return float(_segment_lattice_distance(P, Q).min()) if len(P) else np.inf


def _segment_lattice_distance(P, Q) -> np.ndarray:
    """Distance from each segment to the nearest lattice point it passes.

    Exact for segments shorter than 1/2 in each coordinate; for longer
    segments it checks the lattice points next to every cut crossing.
    """
    out = np.full(len(P), np.inf)
    for V in (P, Q):
        out = np.minimum(out, np.hypot(*(V - np.round(V)).T))
    ev = crossing_events(P, Q, np.arange(len(P)), delta=0.0)
    if len(ev.owner):
        np.minimum.at(out, ev.segment, ev.clearance)
    return out


@dataclass
class CrossingEvents:
    owner: np.ndarray
    segment: np.ndarray
    param: np.ndarray
    code: np.ndarray
    clearance: np.ndarray


def crossing_events(P, Q, owner, order=None, delta: float = DEFAULT_DELTA) -> CrossingEvents:
    """All cut crossings of the straight segments P[i] -> Q[i].

    Events come back sorted by (owner, order, parameter).  ``clearance`` is
    the distance from the crossing to the puncture along the cut.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    owner = np.asarray(owner)
    order = np.arange(len(P)) if order is None else np.asarray(order)
    parts = []
    for axis in (0, 1):
        p, q = P[:, axis], Q[:, axis]
        lo = np.floor(p)
        cnt = (np.floor(q) - lo).astype(np.int64)
        n = np.abs(cnt)
        total = int(n.sum())
        if total == 0:
            continue
        seg = np.repeat(np.arange(len(p)), n)
        j = np.arange(total) - np.repeat(np.cumsum(n) - n, n)
        up = cnt[seg] > 0
        level = np.where(up, lo[seg] + 1 + j, lo[seg] - j)
        t = (level - p[seg]) / (q[seg] - p[seg])
        o = 1 - axis
        other = P[seg, o] + t * (Q[seg, o] - P[seg, o])
        clearance = np.abs(other - np.round(other))
        code = 2 * axis + (~up).astype(np.int8)
        parts.append((seg, t, code, clearance))
    if not parts:
        z = np.zeros(0, dtype=np.int64)
        return CrossingEvents(z, z, np.zeros(0), np.zeros(0, dtype=np.int8), np.zeros(0))
    seg = np.concatenate([x[0] for x in parts])
    t = np.concatenate([x[1] for x in parts])
    code = np.concatenate([x[2] for x in parts]).astype(np.int8)
    clr = np.concatenate([x[3] for x in parts])
    idx = np.lexsort((t, order[seg], owner[seg]))
    seg = seg[idx]
    return CrossingEvents(owner[seg], seg, t[idx], code[idx], clr[idx])


def word_from_codes(codes) -> Word:
    return _from_runs(_CODE_RUN[c] for c in codes)


def difference_loop(trajX: Trajectory, trajY: Trajectory, bp: BasepointConfig = BasepointConfig()) -> PuncturedLoop:
    if len(trajX) != len(trajY) or not np.allclose(trajX.t, trajY.t):
        raise ValueError("trajectories must share the time grid")
    LX, LY = trajX.lifted(), trajY.lifted()
    z1, z2 = np.asarray(bp.z1, dtype=float), np.asarray(bp.z2, dtype=float)
    tx, amb1 = geodesic_displacement(z1, LX[0], bp.delta)
    ty, amb2 = geodesic_displacement(z2, LY[0], bp.delta)
    ux, amb3 = geodesic_displacement(LX[-1], z1, bp.delta)
    uy, amb4 = geodesic_displacement(LY[-1], z2, bp.delta)
    if amb1 or amb2 or amb3 or amb4:
        raise BraidRejected("ambiguous", "geodesic tail is ambiguous (near-antipodal endpoint)")
    base = bp.base_difference
    start = base + tx - ty
    flow = start + (LX - LX[0]) - (LY - LY[0])
    end = flow[-1] + ux - uy
    verts = np.vstack([base, flow, end])
    loop = PuncturedLoop(verts, bp.delta)
    if loop.min_puncture_distance() < bp.delta:
        raise BraidRejected("puncture", "difference loop passes too close to the puncture")
    return loop


def extract_free_word(loop: PuncturedLoop) -> Word:
    P, Q = loop.vertices[:-1], loop.vertices[1:]
    ev = crossing_events(P, Q, np.zeros(len(P), dtype=np.int64), delta=loop.delta)
    if np.any(ev.clearance < loop.delta):
        raise BraidRejected("puncture", "cut crossing too close to the puncture")
    return word_from_codes(ev.code.tolist())


def extract_winding(loop) -> tuple[int, int]:
    """Winding vector of a closed torus path (Trajectory or lifted array)."""
    L = loop.lifted() if isinstance(loop, Trajectory) else np.asarray(loop, dtype=float)
    d = L[-1] - L[0]
    r = np.round(d)
    if np.abs(d - r).max() > 1e-6:
        raise ValueError("path is not closed on the torus")
    return int(r[0]), int(r[1])


def braid_from_paths(trajX: Trajectory, trajY: Trajectory, bp: BasepointConfig = BasepointConfig()) -> PureBraidT2:
    free = extract_free_word(difference_loop(trajX, trajY, bp))
    LY = trajY.lifted()
    z2 = np.asarray(bp.z2, dtype=float)
    ty, _ = geodesic_displacement(z2, LY[0], bp.delta)
    uy, _ = geodesic_displacement(LY[-1], z2, bp.delta)
    lattice = extract_winding(np.vstack([z2, z2 + ty + (LY - LY[0]), z2 + ty + (LY[-1] - LY[0]) + uy]))
    return PureBraidT2(free, lattice)


def braid_of_map(m: TorusMap, x, y, bp: BasepointConfig = BasepointConfig(), substeps: int = 1) -> PureBraidT2:
    """gamma(m, x, y) from traced trajectories of both points."""
    tx = m.trace(np.asarray(x, dtype=float), substeps)
    ty = m.trace(np.asarray(y, dtype=float), substeps)
    return braid_from_paths(tx, ty, bp)


# synthetic generator motions ---------------------------------------------------------


def generator_motions(bp: BasepointConfig = BasepointConfig(), n: int = 64) -> dict[str, tuple[Trajectory, Trajectory]]:
    """Trajectory pairs realising a1, a2, b1, b2 and the full twist sigma^2."""
    s = np.linspace(0.0, 1.0, n + 1)
    z1 = np.asarray(bp.z1, dtype=float)
    z2 = np.asarray(bp.z2, dtype=float)
    still1 = np.tile(z1, (n + 1, 1))
    still2 = np.tile(z2, (n + 1, 1))
    ex, ey = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    out = {
        "a1": (z1 + s[:, None] * ex, still2),
        "a2": (still1, z2 + s[:, None] * ex),
        "b1": (z1 + s[:, None] * ey, still2),
        "b2": (still1, z2 + s[:, None] * ey),
    }
    # both points rotate once counterclockwise about their midpoint
    c = (z1 + z2) / 2
    ang = 2 * np.pi * s
    rot = np.stack([np.cos(ang), -np.sin(ang), np.sin(ang), np.cos(ang)], axis=-1).reshape(-1, 2, 2)
    out["sigma2"] = (c + rot @ (z1 - c), c + rot @ (z2 - c))
    return {k: (Trajectory(s, X), Trajectory(s, Y)) for k, (X, Y) in out.items()}
