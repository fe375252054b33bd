from hypothesis import given
from hypothesis import strategies as st

from autonorm.braid import GENERATORS, PureBraidT2, a1, a2, b1, b2, extends_to_full_braid, pb_mul, pb_project, sigma2, sigma_act_free
from autonorm.qmorph import SnakeQM, cm, word_sampler
from autonorm.words import A, B, Word, commutator, invert, parse_word

from oracles import naive_reduce

W = parse_word
braids = st.tuples(
    st.text(alphabet="aAbB", max_size=20).map(lambda s: W(naive_reduce(s))),
    st.tuples(st.integers(-5, 5), st.integers(-5, 5)),
).map(lambda t: PureBraidT2(*t))


def test_generator_table():
    assert a1 == PureBraidT2(A, (0, 0))
    assert a2 == PureBraidT2(invert(A), (1, 0))
    assert b1 == PureBraidT2(B, (0, 0))
    assert b2 == PureBraidT2(invert(B), (0, 1))
    assert sigma2 == PureBraidT2(commutator(A, B), (0, 0))
    assert set(GENERATORS) == {"a1", "a2", "b1", "b2", "sigma2"}


def test_products():
    assert pb_mul(a1, a2) == PureBraidT2(Word(), (1, 0))
    assert b1 * b2 == PureBraidT2(Word(), (0, 1))
    assert (a1 * a2).is_central()
    assert (sigma2 * sigma2.inverse()).is_identity()
    assert pb_project(sigma2) == commutator(A, B)
    assert pb_project(a1 * a2).is_identity()
    assert pb_project(b1) == B


def test_sigma_action():
    assert sigma_act_free(W("a b")) == W("A B")
    assert sigma_act_free(W("a b a")) == W("A B A")
    assert sigma_act_free(commutator(A, B)) == W("A B a b")


@given(braids, braids, braids)
def test_group_laws(p, q, r):
    assert (p * q) * r == p * (q * r)
    assert (p * p.inverse()).is_identity()
    assert pb_project(p * q) == pb_project(p) * pb_project(q)
    assert p ** 3 == p * p * p


@given(braids)
def test_json_round_trip(p):
    assert PureBraidT2.from_json(p.to_json()) == p


def test_centre_is_lattice():
    z = PureBraidT2(Word(), (2, -1))
    for g in GENERATORS.values():
        assert z * g == g * z
    assert a1 * b1 != b1 * a1


def test_extension_criterion():
    assert extends_to_full_braid(cm(2), word_sampler(0, 15, 60), 200)
    assert extends_to_full_braid(SnakeQM(), word_sampler(1, 15, 60), 200)
