import random

import pytest
from hypothesis import given, settings, strategies as st

from slwords.errors import BadIndex, InvalidGroupSpec, ParseError
from slwords.residues import GroupSpec, ModMatrix, random_sl
from slwords.words import (
    GeneratingSet,
    commutator_word,
    evaluate,
    format_word,
    free_reduce,
    group_commutator,
    inverse_word,
    parse_word,
)

SPEC = GroupSpec(5, 2, 3)


def make_set(seed=0, size=3, spec=SPEC):
    rng = random.Random(seed)
    return GeneratingSet(spec, [random_sl(spec.m, spec.p, spec.n, rng) for _ in range(size)])


words = st.lists(st.sampled_from([-3, -2, -1, 1, 2, 3]), max_size=40).map(tuple)


def test_evaluate_against_oracle(oracle):
    S = make_set()
    gens = [g.rows for g in S.gens]
    rng = random.Random(1)
    for _ in range(50):
        w = tuple(rng.choice([-3, -2, -1, 1, 2, 3]) for _ in range(rng.randint(0, 30)))
        assert evaluate(w, S).rows == oracle.eval(w, gens, 125)


@settings(max_examples=200, deadline=None)
@given(words, words)
def test_evaluate_is_a_homomorphism(u, v):
    S = make_set()
    assert evaluate(u + v, S) == evaluate(u, S) @ evaluate(v, S)
    assert evaluate(inverse_word(u), S) == evaluate(u, S).inv()


@settings(max_examples=200, deadline=None)
@given(words)
def test_free_reduce(w):
    S = make_set()
    r = free_reduce(w)
    assert evaluate(r, S) == evaluate(w, S)
    assert all(a != -b for a, b in zip(r, r[1:]))
    assert free_reduce(r) == r
    assert free_reduce(w + inverse_word(w)) == ()


@settings(max_examples=100, deadline=None)
@given(words, words)
def test_commutator_word(u, v):
    S = make_set()
    c = commutator_word(u, v)
    assert len(c) == 2 * (len(u) + len(v))
    assert evaluate(c, S) == group_commutator(evaluate(u, S), evaluate(v, S))


def test_evaluate_at_lower_level():
    S = make_set()
    w = (1, -2, 3, 3)
    assert evaluate(w, S, 1) == evaluate(w, S).project(1)
    with pytest.raises(ValueError):
        evaluate(w, S, 4)


def test_bad_letters():
    S = make_set()
    with pytest.raises(BadIndex):
        evaluate((1, 4), S)
    with pytest.raises(BadIndex):
        evaluate((0,), S)


def test_generating_set_validation():
    with pytest.raises(InvalidGroupSpec):
        GeneratingSet(SPEC, [[[2, 0], [0, 1]]])
    with pytest.raises(InvalidGroupSpec):
        GeneratingSet(SPEC, [])
    with pytest.raises(InvalidGroupSpec):
        GeneratingSet(SPEC, [ModMatrix.identity(3, 5, 3)])


def test_parse_and_format_round_trip():
    assert parse_word("1,-2,1,1") == (1, -2, 1, 1)
    assert format_word((1, -2, 1, 1)) == "1,-2,1,1"
    assert parse_word("") == ()
    assert parse_word(format_word(())) == ()
    for bad in ("1,,2", "a", "1,0"):
        with pytest.raises(ParseError):
            parse_word(bad)


def test_big_modulus_falls_back_to_python_ints():
    spec = GroupSpec(3, 2, 40)
    S = make_set(2, 2, spec)
    w = (1, 2, -1, 2, 2, -1)
    acc = ModMatrix.identity(2, 3, 40)
    for x in w:
        acc = acc @ S.letter(x)
    assert evaluate(w, S) == acc
