import random

import pytest
from hypothesis import given, settings, strategies as st

from slwords.errors import InvalidGroupSpec, NotAUnit, Singular
from slwords.residues import (
    GroupSpec,
    ModMatrix,
    ResidueInt,
    congruence_level,
    group_order,
    int_valuation,
    random_sl,
)


@pytest.mark.parametrize("m,q,p,n", [(2, 3, 3, 1), (2, 9, 3, 2), (2, 5, 5, 1), (3, 3, 3, 1)])
def test_group_order_matches_brute_force(oracle, m, q, p, n):
    assert group_order(GroupSpec(p, m, n)) == oracle.sl_count(m, q)


def test_group_order_known_values():
    assert group_order(GroupSpec(3, 2, 1)) == 24
    assert group_order(GroupSpec(3, 2, 2)) == 648
    assert group_order(GroupSpec(5, 2, 1)) == 120
    assert group_order(GroupSpec(3, 3, 1)) == 5616


@pytest.mark.parametrize("p,m", [(2, 2), (4, 2), (9, 2), (3, 4), (3, 5), (5, 7), (1, 2)])
def test_group_spec_rejects(p, m):
    with pytest.raises(InvalidGroupSpec):
        GroupSpec(p, m, 2)


@pytest.mark.parametrize("p,m", [(3, 2), (5, 2), (3, 3), (5, 5), (7, 4)])
def test_group_spec_accepts(p, m):
    assert GroupSpec(p, m, 1).modulus == p


def test_group_spec_rejects_bad_exponents():
    with pytest.raises(InvalidGroupSpec):
        GroupSpec(3, 2, 0)
    with pytest.raises(InvalidGroupSpec):
        GroupSpec(3, 2, 4, W=3)


def test_residue_arithmetic_and_inverse():
    x = ResidueInt(7, 3, 3)
    assert x + 20 == 0
    assert x * x == 49 % 27
    assert (x**-1) * x == 1
    with pytest.raises(NotAUnit):
        ResidueInt(6, 3, 3) ** -1


def test_valuation_conventions():
    assert int_valuation(0, 3, 5) == 5
    assert int_valuation(18, 3, 5) == 2
    assert int_valuation(243, 3, 5) == 5


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from([(3, 2), (5, 2), (3, 3), (5, 4)]), st.integers(1, 6))
def test_inverse_and_det(seed, pm, W):
    p, m = pm
    g = random_sl(m, p, W, random.Random(seed))
    assert g.det() == 1
    eye = ModMatrix.identity(m, p, W)
    assert g @ g.inv() == eye and g.inv() @ g == eye


def test_inverse_of_singular_raises():
    with pytest.raises(Singular):
        ModMatrix([[3, 0], [0, 1]], 3, 2).inv()
    with pytest.raises(Singular):
        ModMatrix([[3, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]], 3, 2).inv()


def test_congruence_level_and_projection():
    g = ModMatrix([[1 + 9, 27], [0, 1]], 3, 4)
    assert congruence_level(g) == 2
    assert g.project(2).is_identity()
    assert not g.project(3).is_identity()
    assert ModMatrix.identity(2, 3, 4).congruence_level() == 4


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6))
def test_projection_is_a_homomorphism(seed):
    rng = random.Random(seed)
    a, b = random_sl(3, 3, 5, rng), random_sl(3, 3, 5, rng)
    for k in (1, 2, 4):
        assert (a @ b).project(k) == a.project(k) @ b.project(k)


def test_matrix_shape_checks():
    with pytest.raises(ValueError):
        ModMatrix([[1, 2, 3], [4, 5]], 3, 1)
    with pytest.raises(ValueError):
        ModMatrix([[1, 2], [3, 4]], 3, 1) @ ModMatrix.identity(3, 3, 1)


def test_random_sl_is_roughly_uniform():
    rng = random.Random(0)
    counts = {}
    for _ in range(24 * 200):
        g = random_sl(2, 3, 1, rng)
        counts[g.rows] = counts.get(g.rows, 0) + 1
    assert len(counts) == 24
    assert min(counts.values()) > 120 and max(counts.values()) < 300
