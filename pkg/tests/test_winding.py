import numpy as np
import pytest

from autonorm.braid import GENERATORS, PureBraidT2
from autonorm.flows import Trajectory, eggbeater
from autonorm.winding import (
    BasepointConfig,
    BraidRejected,
    PuncturedLoop,
    braid_from_paths,
    braid_of_map,
    crossing_events,
    difference_loop,
    extract_free_word,
    extract_winding,
    generator_motions,
    geodesic_displacement,
)
from autonorm.words import Word, cyclic_reduce, invert, parse_word

W = parse_word
S, EPS = 0.1, 5e-5


def _rotations(w: Word) -> set[str]:
    s = cyclic_reduce(w).letters()
    return {s[i:] + s[:i] for i in range(len(s))}


def _line(p, q, n=64):
    s = np.linspace(0, 1, n + 1)[:, None]
    return np.asarray(p, float) + s * (np.subtract(q, p))


def _traj(pts):
    return Trajectory(np.linspace(0, 1, len(pts)), pts)


# generator calibration


@pytest.mark.parametrize("name", ["a1", "a2", "b1", "b2"])
def test_generator_motions_exact(name):
    X, Y = generator_motions()[name]
    assert braid_from_paths(X, Y) == GENERATORS[name]


def test_exchange_up_to_rotation():
    X, Y = generator_motions()["sigma2"]
    b = braid_from_paths(X, Y)
    target = GENERATORS["sigma2"].free
    assert b.lattice == (0, 0)
    assert _rotations(b.free) & (_rotations(target) | _rotations(invert(target)))


# loop and word examples


def test_parallel_motion_gives_trivial_loop():
    bp = BasepointConfig()
    path = _line((0, 0), (1, 0))
    X, Y = _traj(path + bp.z1), _traj(path + bp.z2)
    loop = difference_loop(X, Y, bp)
    assert np.allclose(loop.vertices, bp.base_difference)
    assert extract_free_word(loop) == Word()
    assert braid_from_paths(X, Y) == PureBraidT2(Word(), (1, 0)) == GENERATORS["a1"] * GENERATORS["a2"]


def test_vertical_and_horizontal_circles():
    vert = PuncturedLoop(_line((0.5, 0.5), (0.5, 1.5)))
    assert extract_free_word(vert) == W("b")
    horiz = PuncturedLoop(_line((0.5, 0.5), (1.5, 0.5)))
    assert extract_free_word(horiz) == W("a")
    assert extract_free_word(PuncturedLoop(np.tile([0.5, 0.5], (5, 1)))) == Word()


def test_vertical_unit_loop_difference():
    bp = BasepointConfig()
    X = _traj(_line(bp.z1, np.add(bp.z1, (0, 1))))
    Y = _traj(np.tile(bp.z2, (65, 1)))
    loop = difference_loop(X, Y, bp)
    assert np.allclose(loop.vertices[:, 0], 0.5 - 1.0)
    assert np.allclose(np.mod(loop.vertices[-1] - loop.vertices[0], 1.0), 0)


def test_small_loop_around_puncture_is_commutator():
    r = 0.05
    ang = np.linspace(np.pi / 4, np.pi / 4 + 2 * np.pi, 200)
    circle = np.stack([r * np.cos(ang), r * np.sin(ang)], axis=1)
    verts = np.vstack([_line((0.5, 0.5), circle[0], 8), circle, _line(circle[-1], (0.5, 0.5), 8)])
    w = extract_free_word(PuncturedLoop(verts))
    ab = W("a b A B")
    assert _rotations(w) & (_rotations(ab) | _rotations(invert(ab)))


def test_winding_examples():
    t = np.linspace(0, 1, 33)[:, None]
    assert extract_winding(_traj(t * [1, 0] + 0.3)) == (1, 0)
    assert extract_winding(_traj(np.tile([0.2, 0.3], (10, 1)))) == (0, 0)
    assert extract_winding(_traj(t * [1, 1] + 0.1)) == (1, 1)
    with pytest.raises(ValueError):
        extract_winding(np.array([[0, 0], [0.3, 0]]))


def test_crossing_order_within_segment():
    ev = crossing_events(np.array([[0.5, 0.5]]), np.array([[2.5, 1.5]]), np.array([0]))
    assert ev.code.tolist() == [0, 2, 0]
    assert np.all(np.diff(ev.param) > 0)


# rejections


def test_ambiguous_tail_rejected():
    bp = BasepointConfig()
    X = _traj(np.tile(np.add(bp.z1, (0.5, 0.0)), (3, 1)))
    Y = _traj(np.tile(bp.z2, (3, 1)))
    with pytest.raises(BraidRejected) as exc:
        braid_from_paths(X, Y, bp)
    assert exc.value.reason == "ambiguous"
    _, amb = geodesic_displacement([0, 0], [0.5, 0.1])
    assert amb


def test_puncture_rejected():
    X = _traj(np.tile([0.25, 0.7], (65, 1)))
    Y = _traj(_line((0.75, 0.7), (-0.25, 0.7)))
    with pytest.raises(BraidRejected) as exc:
        braid_from_paths(X, Y)
    assert exc.value.reason == "puncture"


def test_time_grids_must_match():
    X = _traj(np.tile([0.25, 0.7], (5, 1)))
    Y = _traj(np.tile([0.75, 0.2], (6, 1)))
    with pytest.raises(ValueError):
        difference_loop(X, Y, BasepointConfig())


def test_basepoints_distinct():
    with pytest.raises(ValueError):
        BasepointConfig((0.2, 0.2), (1.2, 0.2))


# dynamics


def _random_pairs(n, seed):
    rng = np.random.default_rng(seed)
    return rng.random((n, 2)), rng.random((n, 2))


def test_refinement_invariance():
    g = eggbeater("a^4 b^3 a^2 b", S, EPS)
    X, Y = _random_pairs(40, 0)
    for x, y in zip(X, Y):
        try:
            coarse = braid_of_map(g, x, y, substeps=1)
        except BraidRejected:
            continue
        assert braid_of_map(g, x, y, substeps=8) == coarse


def test_concatenation():
    g = eggbeater("a^4 b^3", S, EPS)
    g2 = eggbeater("a^2 b", S, EPS)
    both = eggbeater("a^2 b a^4 b^3", S, EPS)  # g first, then g2
    X, Y = _random_pairs(60, 1)
    checked = 0
    for x, y in zip(X, Y):
        try:
            whole = braid_of_map(both, x, y)
            first = braid_of_map(g, x, y)
            second = braid_of_map(g2, g.apply(x), g.apply(y))
        except BraidRejected:
            continue
        assert whole == first * second
        checked += 1
    assert checked > 40


def test_fixed_point_power_law():
    g = eggbeater("a^4 b^3 a^2 b", S, EPS)
    pts = [(0.2, 0.7), (0.31, 0.78), (0.6, 0.1), (0.22, 0.4), (0.9, 0.72)]
    for x in pts:
        for y in pts:
            if x == y:
                continue
            assert np.allclose(g.apply(np.array(x)), x)
            b = braid_of_map(g, x, y)
            for p in range(1, 9):
                assert braid_of_map(g.power(p), x, y) == b**p
