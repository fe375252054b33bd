"""Area-preserving maps of the torus R^2/Z^2.

Hamiltonian vector fields use the convention X_H = (dH/dy, -dH/dx).  With
V(x, y) = F(x) and H(x, y) = F(1 - y) the time-t maps are the shears

    v_t(x, y) = (x, y - t F'(x)),      h_t(x, y) = (x - t F'(1 - y), y).

Maps are immutable descriptors.  ``apply`` works on arrays of points of shape
(..., 2); ``lift`` returns the unwrapped endpoint of the isotopy, which is
what braid extraction needs.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .words import Word, parse_word

# largest displacement between consecutive trajectory samples produced by trace
_TRACE_STEP = 0.25


class MapSpecError(ValueError):
    pass


class IntegrationError(RuntimeError):
    pass


def _smoothstep(u):
    return u * u * (3.0 - 2.0 * u)


def _smoothstep_integral(u):
    return u**3 - 0.5 * u**4


@dataclass(frozen=True)
class ShearProfile:
    """C^1 profile F supported near 1/4 with F' = 1 then F' = -1.

    F' ramps between 0, 1, -1 and 0 with smoothstep blends of width eps (2 eps
    across 1/4), so F' is C^1 and F is symmetric about 1/4.
    """

    s: float
    eps: float

    @property
    def breakpoints(self) -> tuple[float, ...]:
        c, s, e = 0.25, self.s, self.eps
        return (c - s - e, c - s, c - e, c + e, c + s, c + s + e)

    def dF(self, x):
        x = np.mod(np.asarray(x, dtype=float), 1.0)
        p0, p1, p2, p3, p4, p5 = self.breakpoints
        e = self.eps
        out = np.zeros_like(x)
        m = (x > p0) & (x < p1)
        out[m] = _smoothstep((x[m] - p0) / e)
        out[(x >= p1) & (x <= p2)] = 1.0
        m = (x > p2) & (x < p3)
        out[m] = 1.0 - 2.0 * _smoothstep((x[m] - p2) / (2 * e))
        out[(x >= p3) & (x <= p4)] = -1.0
        m = (x > p4) & (x < p5)
        out[m] = -1.0 + _smoothstep((x[m] - p4) / e)
        return out

    def F(self, x):
        x = np.mod(np.asarray(x, dtype=float), 1.0)
        p0, p1, p2, p3, p4, p5 = self.breakpoints
        e = self.eps
        top = self.s - e / 2
        out = np.zeros_like(x)
        m = (x > p0) & (x < p1)
        out[m] = e * _smoothstep_integral((x[m] - p0) / e)
        m = (x >= p1) & (x <= p2)
        out[m] = e / 2 + (x[m] - p1)
        m = (x > p2) & (x < p3)
        out[m] = top + (x[m] - p2) - 4 * e * _smoothstep_integral((x[m] - p2) / (2 * e))
        m = (x >= p3) & (x <= p4)
        out[m] = top - (x[m] - p3)
        m = (x > p4) & (x < p5)
        out[m] = e / 2 - (x[m] - p4) + e * _smoothstep_integral((x[m] - p4) / e)
        return out


def make_profile(s: float, eps: float) -> ShearProfile:
    if not 0 < s < 0.25:
        raise ValueError(f"s must lie in (0, 1/4), got {s}")
    if not 0 < eps < 1e-3 * s:
        raise ValueError(f"eps must lie in (0, 1e-3 s), got {eps}")
    return ShearProfile(float(s), float(eps))


@dataclass(frozen=True)
class Trajectory:
    """Samples (t, point mod 1) of an isotopy applied to one point."""

    t: np.ndarray
    xy: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        xy = np.mod(np.asarray(self.xy, dtype=float), 1.0)
        if t.ndim != 1 or xy.shape != (len(t), 2):
            raise ValueError("trajectory needs t of shape (n,) and xy of shape (n, 2)")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "xy", xy)

    def __len__(self) -> int:
        return len(self.t)

    def steps(self) -> np.ndarray:
        """Shortest torus displacement between consecutive samples."""
        d = np.diff(self.xy, axis=0)
        return d - np.round(d)

    def max_step(self) -> float:
        if len(self) < 2:
            return 0.0
        return float(np.abs(self.steps()).max())

    def lifted(self) -> np.ndarray:
        """Continuous lift to R^2 starting at the first sample."""
        if len(self) == 0:
            return self.xy.copy()
        if self.max_step() >= 0.5:
            raise ValueError("trajectory steps must be shorter than 1/2 to be lifted")
        return np.vstack([self.xy[:1], self.xy[:1] + np.cumsum(self.steps(), axis=0)])

    @classmethod
    def from_lifted(cls, t, lifted) -> "Trajectory":
        return cls(np.asarray(t, dtype=float), np.asarray(lifted, dtype=float))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "x", "y"])
            for ti, (x, y) in zip(self.t, self.xy):
                w.writerow([repr(float(ti)), repr(float(x)), repr(float(y))])

    @classmethod
    def from_csv(cls, path) -> "Trajectory":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        if not rows or [c.strip() for c in rows[0]] != ["t", "x", "y"]:
            raise ValueError(f"{path}: expected header t,x,y")
        data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
        if data.size == 0:
            raise ValueError(f"{path}: no samples")
        return cls(data[:, 0], data[:, 1:3])


# maps ------------------------------------------------------------------------------


class TorusMap:
    """Base class; subclasses implement ``lift`` and ``trace_lifted``."""

    autonomous = False

    def lift(self, pts) -> np.ndarray:
        """Unwrapped endpoint of the isotopy started at ``pts``."""
        raise NotImplementedError

    def apply(self, pts) -> np.ndarray:
        return np.mod(self.lift(pts), 1.0)

    def trace_lifted(self, p, substeps: int = 1) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def trace(self, p, substeps: int = 1) -> Trajectory:
        t, pts = self.trace_lifted(np.asarray(p, dtype=float), substeps)
        traj = Trajectory(t, pts)
        if traj.max_step() >= 0.5:
            raise IntegrationError("trajectory refinement failed: step displacement >= 1/2")
        return traj

    def letters(self) -> list[tuple["TorusMap", int]]:
        """Atomic factors with exponents, in the order they are applied."""
        return [(self, 1)]

    def power(self, k: int) -> "TorusMap":
        return MapWord(((self, k),))

    def inverse(self) -> "TorusMap":
        return self.power(-1)


@dataclass(frozen=True)
class Shear(TorusMap):
    direction: str
    profile: ShearProfile
    t0: float = 1.0

    autonomous = True

    def __post_init__(self):
        if self.direction not in ("v", "h"):
            raise ValueError("shear direction must be 'v' or 'h'")

    def velocity(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        vel = np.zeros_like(pts)
        if self.direction == "v":
            vel[..., 1] = -self.profile.dF(pts[..., 0])
        else:
            vel[..., 0] = -self.profile.dF(1.0 - pts[..., 1])
        return vel

    def lift(self, pts, k: int = 1) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return pts + (k * self.t0) * self.velocity(pts)

    def trace_lifted(self, p, substeps: int = 1, k: int = 1):
        p = np.asarray(p, dtype=float)
        vel = (k * self.t0) * self.velocity(p)
        # |F'| <= 1, so the grid depends only on the exponent and is shared by all points
        n = max(int(substeps), math.ceil(abs(k) * self.t0 / _TRACE_STEP), 1)
        s = np.linspace(0.0, 1.0, n + 1)
        return s * abs(k) * self.t0, p + s[:, None] * vel


@dataclass(frozen=True)
class HamiltonianFlow(TorusMap):
    """Time-``t_final`` map of an autonomous Hamiltonian flow, integrated by
    classical fixed-step RK4."""

    name: str
    vector_field: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    hamiltonian: Callable[[np.ndarray], np.ndarray] = field(compare=False)
    t_final: float = 1.0
    dt: float = 2e-3
    max_speed: float = 1.0

    autonomous = True

    def _nsteps(self, T: float) -> int:
        dt = min(self.dt, 0.05 / max(self.max_speed, 1e-12))
        return max(1, math.ceil(abs(T) / dt - 1e-9))

    def integrate(self, pts, T: float, callback=None) -> np.ndarray:
        """RK4 over time T (may be negative); ``callback(i, prev, new)`` per step."""
        x = np.array(pts, dtype=float)
        n = self._nsteps(T)
        h = T / n
        f = self.vector_field
        for i in range(n):
            k1 = f(x)
            k2 = f(x + 0.5 * h * k1)
            k3 = f(x + 0.5 * h * k2)
            k4 = f(x + h * k3)
            new = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(new)):
                raise IntegrationError(f"{self.name}: non-finite state at step {i}")
            if callback is not None:
                callback(i, x, new)
            x = new
        return x

    def lift(self, pts, k: int = 1) -> np.ndarray:
        return self.integrate(pts, k * self.t_final)

    def trace_lifted(self, p, substeps: int = 1, k: int = 1):
        T = k * self.t_final
        out = [np.array(p, dtype=float)]
        self.integrate(p, T, lambda i, old, new: out.append(new.copy()))
        n = len(out) - 1
        t = np.linspace(0.0, abs(T), n + 1)
        return t, np.array(out)


@dataclass(frozen=True)
class MapWord(TorusMap):
    """Product of maps; ``factors[0]`` is applied last (right-to-left)."""

    factors: tuple[tuple[TorusMap, int], ...] = ()

    def letters(self) -> list[tuple[TorusMap, int]]:
        out: list[tuple[TorusMap, int]] = []
        for m, k in reversed(self.factors):
            if k == 0:
                continue
            inner = m.letters()
            if k < 0:
                inner = [(a, -e) for a, e in reversed(inner)]
            for _ in range(abs(k)):
                for a, e in inner:
                    if out and out[-1][0] == a:
                        e2 = out[-1][1] + e
                        out.pop()
                        if e2:
                            out.append((a, e2))
                    else:
                        out.append((a, e))
        return out

    @property
    def autonomous(self) -> bool:
        atoms = {a for a, _ in self.letters()}
        return len(atoms) <= 1

    def lift(self, pts) -> np.ndarray:
        x = np.asarray(pts, dtype=float)
        for a, e in self.letters():
            x = a.lift(x, e)
        return x

    def trace_lifted(self, p, substeps: int = 1):
        ts = [np.zeros(1)]
        ps = [np.asarray(p, dtype=float)[None, :]]
        t_end = 0.0
        cur = np.asarray(p, dtype=float)
        for a, e in self.letters():
            t, pts = a.trace_lifted(cur, substeps, k=e)
            ts.append(t_end + t[1:])
            ps.append(pts[1:])
            t_end += t[-1]
            cur = pts[-1]
        return np.concatenate(ts), np.vstack(ps)


def identity_map() -> MapWord:
    return MapWord(())


def trace(m: TorusMap, p, substeps: int = 1) -> Trajectory:
    return m.trace(p, substeps)


def apply(m: TorusMap, p) -> np.ndarray:
    return m.apply(p)


def shear_v(s: float, eps: float, t0: float = 1.0) -> Shear:
    return Shear("v", make_profile(s, eps), t0)


def shear_h(s: float, eps: float, t0: float = 1.0) -> Shear:
    return Shear("h", make_profile(s, eps), t0)


def eggbeater(word_spec: Word | str, s: float, eps: float, t0: float = 1.0) -> MapWord:
    """w(v, h): a-syllables become powers of v, b-syllables powers of h."""
    if isinstance(word_spec, str):
        word_spec = parse_word(word_spec)
    prof = make_profile(s, eps)
    v, h = Shear("v", prof, t0), Shear("h", prof, t0)
    return MapWord(tuple((v if g == 0 else h, e) for g, e in word_spec.runs()))


# built-in Hamiltonians ----------------------------------------------------------------


def _cellular_field(p):
    x, y = 2 * np.pi * p[..., 0], 2 * np.pi * p[..., 1]
    return np.stack([np.sin(x) * np.cos(y), -np.cos(x) * np.sin(y)], axis=-1)


def _cellular_h(p):
    return np.sin(2 * np.pi * p[..., 0]) * np.sin(2 * np.pi * p[..., 1]) / (2 * np.pi)


def _still_field(p):
    return np.zeros_like(np.asarray(p, dtype=float))


def _still_h(p):
    return np.zeros(np.shape(p)[:-1])


BUILTIN_FLOWS = {
    # H = sin(2 pi x) sin(2 pi y) / (2 pi)
    "cellular": (_cellular_field, _cellular_h, 1.0),
    "still": (_still_field, _still_h, 0.0),
}


def ode_flow(name: str, t_final: float = 1.0, dt: float = 1e-2) -> HamiltonianFlow:
    try:
        f, h, speed = BUILTIN_FLOWS[name]
    except KeyError:
        raise MapSpecError(f"unknown built-in flow {name!r}; choose from {sorted(BUILTIN_FLOWS)}") from None
    return HamiltonianFlow(name, f, h, t_final, dt, max_speed=max(speed, 1e-12))


def parse_map(spec: str) -> TorusMap:
    """``eggbeater:<word>:<s>:<eps>``, ``shear-v:<s>:<eps>``,
    ``shear-h:<s>:<eps>`` or ``ode:<builtin-name>``."""
    kind, _, rest = spec.partition(":")
    try:
        if kind == "eggbeater":
            word, s, eps = rest.rsplit(":", 2)
            return eggbeater(parse_word(word), float(s), float(eps))
        if kind in ("shear-v", "shear-h"):
            s, eps = rest.split(":")
            return (shear_v if kind == "shear-v" else shear_h)(float(s), float(eps))
        if kind == "ode":
            return ode_flow(rest)
    except MapSpecError:
        raise
    except ValueError as exc:
        raise MapSpecError(f"bad map spec {spec!r}: {exc}") from None
    raise MapSpecError(f"unknown map spec {spec!r}")
