import itertools
import random

import pytest

from slwords.errors import InvalidGroupSpec, NotGenerating
from slwords.lab import random_generating_set
from slwords.lie import LieElement
from slwords.logexp import trunc_exp, trunc_log
from slwords.residues import GroupSpec, ModMatrix, random_sl
from slwords.synth import SynthConfig, Synthesizer, first_order_lift, lie_datum, realize_level, synthesize, verify
from slwords.words import GeneratingSet, commutator_word, evaluate, free_reduce

STD = [[[1, 1], [0, 1]], [[1, 0], [1, 1]]]


@pytest.fixture(scope="module")
def syn_m2():
    return Synthesizer(GeneratingSet(GroupSpec(3, 2, 8), STD))


def test_identity_and_generators(syn_m2):
    S = syn_m2.S
    assert syn_m2.synthesize(ModMatrix.identity(2, 3, 8)) == ()
    for i, g in enumerate(S.gens, 1):
        w = syn_m2.synthesize(g)
        assert evaluate(w, S) == g
        assert w == (i,)  # the base table stores geodesics and g = generator


def test_random_targets_verify(syn_m2):
    rng = random.Random(0)
    for _ in range(100):
        t = random_sl(2, 3, 8, rng)
        res = syn_m2.synthesize_detailed(t)
        assert evaluate(res.word, syn_m2.S) == t
        assert res.raw_length >= len(res.word)
        assert list(res.levels) == sorted(set(res.levels))
        assert syn_m2.verify(t, res.word).ok


def test_deterministic():
    S = GeneratingSet(GroupSpec(3, 2, 6), STD)
    t = random_sl(2, 3, 6, random.Random(5))
    assert synthesize(t, S) == synthesize(t, S) == Synthesizer(S).synthesize(t)


def test_depth1_congruence_exhaustive_p3():
    """Every class I + 3^l A of Gamma_l/Gamma_(l+1), l = 2..3, realised exactly."""
    S = GeneratingSet(GroupSpec(3, 2, 4), STD)
    syn = Synthesizer(S)
    for level in (2, 3):
        for u, v, w in itertools.product(range(3), repeat=3):
            A = LieElement([[u, v], [w, -u]], 3, 1)
            d = first_order_lift(A.rows, level, 3)
            word = syn.realize_level(d, level)
            assert evaluate(word, S, level + 1) == d


def test_commutator_length_law():
    """A class at level l > N0 costs exactly 2(|w1| + |w2|) before free reduction."""
    S = GeneratingSet(GroupSpec(3, 2, 6), STD)
    syn = Synthesizer(S)
    A = ((1, 2), (0, 2))
    word, _ = syn._realize(4, A)
    from slwords.lie import solve_bracket_sl2

    A1, A2 = solve_bracket_sl2(LieElement(A, 3, 1))
    w1, _ = syn._realize(2, A1.rows)
    w2, _ = syn._realize(2, A2.rows)
    assert word == commutator_word(w1, w2)
    assert len(word) == 2 * (len(w1) + len(w2))


def test_product_of_classes_absorbs():
    # (I + p^l X)(I + p^l Y) = I + p^l (X + Y) mod p^(l+1)
    p, l = 3, 2
    X = first_order_lift(((1, 2), (0, 2)), l, p).lift(l + 1)
    Y = first_order_lift(((2, 0), (1, 1)), l, p).lift(l + 1)
    assert X @ Y == first_order_lift(((0, 2), (1, 0)), l, p)


def test_residual_matches_log_class():
    """The Lie datum of a level-l element equals log(delta)/p^l mod p."""
    rng = random.Random(2)
    for _ in range(50):
        g = random_sl(2, 3, 6, rng) ** 24
        level = g.congruence_level()
        if level >= 6:
            continue
        L = trunc_log(g, 6)
        datum = lie_datum(g.rows, level, 3)
        assert datum == tuple(tuple((x // 3**level) % 3 for x in r) for r in L.rows)
        assert trunc_exp(L, 6) == g


@pytest.mark.parametrize("p,m,n", [(3, 2, 10), (5, 2, 5), (3, 3, 5), (7, 2, 4)])
def test_random_sets_end_to_end(p, m, n):
    rng = random.Random(p + m + n)
    S, syn = random_generating_set(GroupSpec(p, m, n), 2, rng)
    for _ in range(10):
        t = random_sl(m, p, n, rng)
        w = syn.synthesize(t)
        assert evaluate(w, S) == t
        assert free_reduce(w) == w


def test_larger_n0():
    S = GeneratingSet(GroupSpec(3, 2, 7), STD)
    syn = Synthesizer(S, SynthConfig(n0=2))
    assert syn.table.full_level == 3
    rng = random.Random(1)
    for _ in range(20):
        t = random_sl(2, 3, 7, rng)
        assert evaluate(syn.synthesize(t), S) == t


def test_realize_level_checks():
    S = GeneratingSet(GroupSpec(3, 2, 4), STD)
    with pytest.raises(ValueError):
        realize_level(ModMatrix([[1, 1], [0, 1]], 3, 4), 2, S)
    with pytest.raises(ValueError):
        realize_level(ModMatrix.identity(2, 3, 4), 4, S)


def test_input_validation():
    S = GeneratingSet(GroupSpec(3, 2, 4), STD)
    syn = Synthesizer(S)
    with pytest.raises(InvalidGroupSpec):
        syn.synthesize(ModMatrix([[2, 0], [0, 1]], 3, 4))
    with pytest.raises(InvalidGroupSpec):
        syn.synthesize(ModMatrix.identity(2, 5, 4))
    with pytest.raises(InvalidGroupSpec):
        SynthConfig(n0=0)


def test_not_generating():
    S = GeneratingSet(GroupSpec(3, 2, 4), [STD[0]])
    with pytest.raises(NotGenerating):
        Synthesizer(S)


def test_verify_detects_wrong_word():
    S = GeneratingSet(GroupSpec(3, 2, 4), STD)
    t = ModMatrix(STD[0], 3, 4)
    assert verify(t, (1,), S).ok
    r = verify(t, (2, 1, -1), S)
    assert not r.ok and r.raw_length == 3 and r.reduced_length == 1


def test_cache_dir_reuse(tmp_path):
    S = GeneratingSet(GroupSpec(3, 2, 5), STD)
    cfg = SynthConfig(cache_dir=tmp_path)
    t = random_sl(2, 3, 5, random.Random(3))
    w1 = Synthesizer(S, cfg).synthesize(t)
    assert list(tmp_path.iterdir())
    w2 = Synthesizer(S, cfg).synthesize(t)
    assert w1 == w2
