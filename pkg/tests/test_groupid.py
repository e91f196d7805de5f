from itertools import permutations

import pytest
from hypothesis import given, strategies as st

from rp2series import rp2
from rp2series.groupid import (FiniteGroup, TooLarge, closure, conjugacy_classes, derived_length,
                               derived_subgroup, fingerprint, perm_inv, perm_mul, perm_order)

S4 = FiniteGroup([(1, 0, 2, 3), (1, 2, 3, 0)])
perm5 = st.permutations(range(5)).map(tuple)


def test_s4_structure():
    assert S4.order() == 24
    assert len(derived_subgroup(S4)) == 12
    assert derived_length(S4) == 3
    assert sorted(len(c) for c in conjugacy_classes(S4)) == [1, 3, 6, 6, 8]
    fp = fingerprint(S4)
    assert fp.order == 24 and fp.center_order == 1 and fp.abelianization == (2,)


def test_closure_limit():
    with pytest.raises(TooLarge):
        closure([(1, 0, 2, 3, 4, 5, 6), (1, 2, 3, 4, 5, 6, 0)], tuple(range(7)), limit=100)


@given(perm5, perm5, perm5)
def test_perm_arithmetic(a, b, c):
    assert perm_mul(perm_mul(a, b), c) == perm_mul(a, perm_mul(b, c))
    assert perm_mul(a, perm_inv(a)) == tuple(range(5))
    k = perm_order(a)
    x = tuple(range(5))
    for _ in range(k):
        x = perm_mul(x, a)
    assert x == tuple(range(5))


@pytest.mark.parametrize("name", ["Q8", "Q16", "D12", "Dic12", "A4", "L"])
def test_models_identify_as_themselves(name):
    m = rp2.identification_models()[name]
    g = rp2.regular_representation(m.presentation)
    assert g.order() == m.order
    assert rp2.identify_group(g).name == name


def test_order_12_groups_are_distinguished():
    names = set()
    for name in ("D12", "Dic12", "A4"):
        g = rp2.regular_representation(rp2.model_group(name))
        names.add(fingerprint(g))
    assert len(names) == 3


def test_unknown_group_is_not_identified():
    # Z12 has order 12 but matches none of the models
    z12 = FiniteGroup([tuple((i + 1) % 12 for i in range(12))])
    assert rp2.identify_group(z12) is None
    # no registered model has order 24
    assert rp2.identify_group(S4) is None


def test_all_of_s3():
    s3 = FiniteGroup([(1, 0, 2), (1, 2, 0)])
    assert set(s3.elements()) == set(permutations(range(3)))
