import numpy as np
import pytest

from autonorm.flows import (
    MapSpecError,
    MapWord,
    Shear,
    Trajectory,
    eggbeater,
    identity_map,
    make_profile,
    ode_flow,
    parse_map,
    shear_h,
    shear_v,
)

S, EPS = 0.1, 5e-5


def test_profile_validation():
    with pytest.raises(ValueError):
        make_profile(0.3, 1e-6)
    with pytest.raises(ValueError):
        make_profile(0.1, 1e-3)


def test_profile_shape():
    p = make_profile(S, EPS)
    x = np.linspace(0, 1, 20001)
    d = p.dF(x)
    assert np.abs(d).max() <= 1
    assert p.dF(np.array([0.2]))[0] == 1 and p.dF(np.array([0.3]))[0] == -1
    assert p.dF(np.array([0.6, 0.1]))[0] == 0
    # F is an antiderivative of F', also across the ramps
    bp = np.array(p.breakpoints)
    xs = np.concatenate([np.random.default_rng(0).random(2000), (bp[:, None] + np.linspace(-2, 2, 41) * EPS).ravel()])
    h = 1e-9
    num = (p.F(xs + h) - p.F(xs - h)) / (2 * h)
    assert np.abs(num - p.dF(xs)).max() < 1e-4
    assert p.F(np.array([0.0]))[0] == 0 and p.F(np.array([0.5]))[0] == 0


def test_shears_are_area_preserving_and_fix_plateaus():
    v, h = shear_v(S, EPS), shear_h(S, EPS)
    pts = np.array([[0.2, 0.5], [0.3, 0.1], [0.7, 0.7], [0.6, 0.2]])
    assert np.allclose(v.apply(pts), pts)
    assert np.allclose(h.apply(pts), pts)
    lifted = v.lift(pts)
    assert np.allclose(lifted - pts, [[0, -1], [0, 1], [0, 0], [0, 0]])
    # a shear is a graph map with unit Jacobian determinant
    q = np.array([[0.25 - S - EPS / 2, 0.4]])
    e = 1e-7
    J = (v.lift(q + [e, 0]) - v.lift(q - [e, 0])) / (2 * e)
    assert abs(J[0, 0] - 1) < 1e-6


def test_eggbeater_letters():
    g = eggbeater("a^4 b^3 a^2 b", S, EPS)
    letters = g.letters()
    assert sum(abs(e) for _, e in letters) == 10
    assert [a.direction for a, _ in letters] == ["h", "v", "h", "v"]
    assert [e for _, e in letters] == [1, 2, 3, 4]
    assert not g.autonomous
    assert shear_v(S, EPS).autonomous


def test_outside_strips_fixed_by_eggbeater():
    g = eggbeater("a^4 b^3 a^2 b", S, EPS)
    rng = np.random.default_rng(0)
    pts = rng.random((2000, 2))
    out = (np.abs(pts[:, 0] - 0.25) > S + EPS) & (np.abs(pts[:, 1] - 0.75) > S + EPS)
    assert np.array_equal(g.lift(pts[out]), pts[out])


def test_power_and_inverse():
    g = eggbeater("a^2 b", S, EPS)
    pts = np.random.default_rng(1).random((50, 2))
    assert np.allclose(g.power(3).lift(pts), g.lift(g.lift(g.lift(pts))))
    assert np.allclose(g.inverse().lift(g.lift(pts)), pts)
    assert np.array_equal(identity_map().lift(pts), pts)


def test_trace_steps_and_endpoint():
    g = eggbeater("a^4 b^3 a^2 b", S, EPS)
    p = np.array([0.27, 0.74])
    tr = g.trace(p)
    assert tr.max_step() <= 0.25 + 1e-12
    assert np.allclose(tr.lifted()[-1], g.lift(p))
    assert np.all(np.diff(tr.t) > 0)


def test_trajectory_csv_round_trip(tmp_path):
    tr = eggbeater("a b", S, EPS).trace(np.array([0.2, 0.7]))
    path = tmp_path / "x.csv"
    tr.to_csv(path)
    assert path.read_text().splitlines()[0] == "t,x,y"
    back = Trajectory.from_csv(path)
    assert np.array_equal(back.t, tr.t) and np.array_equal(back.xy, tr.xy)
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    with pytest.raises(ValueError):
        Trajectory.from_csv(bad)


def test_trajectory_rejects_big_steps():
    tr = Trajectory(np.arange(3.0), np.array([[0.0, 0.0], [0.5, 0.0], [0.0, 0.0]]))
    with pytest.raises(ValueError):
        tr.lifted()


def test_ode_flow_conserves_hamiltonian():
    f = ode_flow("cellular")
    pts = np.random.default_rng(2).random((200, 2))
    H0 = f.hamiltonian(pts)
    H1 = f.hamiltonian(f.lift(pts, 3))
    assert np.abs(H1 - H0).max() < 1e-8
    assert f.autonomous
    with pytest.raises(MapSpecError):
        ode_flow("nope")


def test_ode_time_reversal():
    f = ode_flow("cellular")
    pts = np.random.default_rng(3).random((100, 2))
    assert np.abs(f.lift(f.lift(pts, 2), -2) - pts).max() < 1e-6


def test_parse_map():
    assert isinstance(parse_map("shear-v:0.1:5e-5"), Shear)
    assert parse_map("shear-h:0.1:5e-5").direction == "h"
    assert isinstance(parse_map("eggbeater:a^4 b^3 a^2 b:0.1:5e-5"), MapWord)
    assert parse_map("ode:cellular").name == "cellular"
    for bad in ["nope", "shear-v:0.1", "eggbeater:x:0.1:5e-5", "shear-v:0.4:1e-6", "ode:zzz"]:
        with pytest.raises(MapSpecError):
            parse_map(bad)
