"""The pure braid group P2(T^2) in the coordinates F2 x Z^2.

The isomorphism comes from the diffeomorphism (x, y) -> (x - y, y) of the
ordered configuration space onto (T^2 minus a point) x T^2: the free factor is
the class of the difference loop, the lattice factor the winding of the
second strand.  The lattice factor is the centre.
"""

from __future__ import annotations

from dataclasses import dataclass

from .words import SIGMA, A, B, Word, commutator, invert, klein_act, parse_word


@dataclass(frozen=True)
class PureBraidT2:
    free: Word = Word()
    lattice: tuple[int, int] = (0, 0)

    def __mul__(self, other: "PureBraidT2") -> "PureBraidT2":
        return pb_mul(self, other)

    def __pow__(self, n: int) -> "PureBraidT2":
        return PureBraidT2(self.free**n, (self.lattice[0] * n, self.lattice[1] * n))

    def inverse(self) -> "PureBraidT2":
        return PureBraidT2(invert(self.free), (-self.lattice[0], -self.lattice[1]))

    def is_identity(self) -> bool:
        return self.free.is_identity() and self.lattice == (0, 0)

    def is_central(self) -> bool:
        return self.free.is_identity()

    def to_json(self) -> dict:
        return {"free": str(self.free), "lattice": [int(self.lattice[0]), int(self.lattice[1])]}

    @classmethod
    def from_json(cls, d: dict) -> "PureBraidT2":
        m, n = d["lattice"]
        return cls(parse_word(d["free"]), (int(m), int(n)))


def pb_mul(p: PureBraidT2, q: PureBraidT2) -> PureBraidT2:
    return PureBraidT2(p.free * q.free, (p.lattice[0] + q.lattice[0], p.lattice[1] + q.lattice[1]))


def pb_project(p: PureBraidT2) -> Word:
    return p.free


def sigma_act_free(w: Word) -> Word:
    """Conjugation by the half twist, descended to F2: invert both generators."""
    return klein_act(SIGMA, w)


# generators: strand 1 or 2 goes once around the horizontal / vertical circle
a1 = PureBraidT2(A, (0, 0))
a2 = PureBraidT2(invert(A), (1, 0))
b1 = PureBraidT2(B, (0, 0))
b2 = PureBraidT2(invert(B), (0, 1))
sigma2 = PureBraidT2(commutator(A, B), (0, 0))

GENERATORS = {"a1": a1, "a2": a2, "b1": b1, "b2": b2, "sigma2": sigma2}


def extends_to_full_braid(q, sampler, trials: int) -> bool:
    """Check q o sigma = q on sampled words (the extension criterion)."""
    for _ in range(trials):
        w = sampler()
        if q(sigma_act_free(w)) != q(w):
            return False
    return True
