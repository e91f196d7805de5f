import json

import pytest
from hypothesis import given, settings, strategies as st

from rp2series.cosets import (CacheError, CosetTable, EnumerationExceeded, EnumerationLimits, InvalidTransversal,
                              NotAHomomorphism, NotInSubgroup, kernel_coset_table, load_cached, order_of,
                              ordered_transversal, rewrite_to_subgroup, schreier_data, schreier_transversal,
                              todd_coxeter, validate_transversal)
from rp2series.presentation import GroupHom, parse_presentation


def pres(text):
    return parse_presentation(text)


KNOWN = [
    ("gens: a b\nrel: a^2\nrel: b^3\nrel: a b a b\n", 6),
    ("gens: x y\nrel: x^4\nrel: x^2 y^-2\nrel: y x y^-1 x\n", 8),
    ("gens: a b\nrel: a^2\nrel: b^3\nrel: a b a b a b\n", 12),
    ("gens: a b\nrel: a^2\nrel: b^3\nrel: a b a b a b a b\n", 24),
    ("gens: a b\nrel: a^2\nrel: b^3\nrel: a b a b a b a b a b\n", 60),
    ("gens: a b c\nrel: a^2\nrel: b^2\nrel: c^2\nrel: a b a b\nrel: b c b c b c\nrel: a c a c a c\n", 24),
    ("gens: a\nrel: a^7\n", 7),
    ("gens: a b\nrel: a b a^-1 b^-1\nrel: a^3\nrel: b^5\n", 15),
]


@pytest.mark.parametrize("text,order", KNOWN)
def test_known_orders(text, order):
    p = pres(text)
    t = todd_coxeter(p)
    assert t.n_cosets == order
    assert t.is_complete() and t.check_consistency(p.relators)


def test_subgroup_index():
    p = pres(KNOWN[3][0])  # S4
    b = p.word("b")
    t = todd_coxeter(p, [b])
    assert t.n_cosets == 8
    assert t.act(0, b) == 0
    assert todd_coxeter(p, [p.word("a"), b]).n_cosets == 1


def test_limit():
    p = pres("gens: a b\nrel: a^2\n")
    with pytest.raises(EnumerationExceeded):
        todd_coxeter(p, limits=EnumerationLimits(max_cosets=50))
    with pytest.raises(EnumerationExceeded):
        todd_coxeter(pres(KNOWN[4][0]), limits=EnumerationLimits(max_deductions=10))
    assert order_of(pres(KNOWN[0][0])) == 6


def test_standardized_and_deterministic():
    p = pres(KNOWN[4][0])
    a, b = todd_coxeter(p), todd_coxeter(p)
    assert a.key() == b.key() == a.standardize().key()


def test_cache_round_trip(tmp_path):
    p = pres(KNOWN[2][0])
    t = todd_coxeter(p, cache_dir=str(tmp_path))
    files = list(tmp_path.rglob("*.json"))
    assert len(files) == 1
    again = load_cached(str(tmp_path), p, ())
    assert again is not None and again.key() == t.key()
    data = json.loads(files[0].read_text())
    data["schema_version"] = 99
    with pytest.raises(CacheError):
        CosetTable.from_json(data)


def test_transversal_validation():
    p = pres(KNOWN[0][0])
    t = todd_coxeter(p)
    words = schreier_transversal(t)
    assert validate_transversal(t, words).accepted
    assert not validate_transversal(t, words[:-1]).accepted
    # appending a relator gives a different word in an already used coset
    dup = words[:-1] + [words[1] * p.word("a b a b")]
    with pytest.raises(InvalidTransversal):
        ordered_transversal(t, dup)


class Sign:
    identity = 0
    mul = staticmethod(lambda a, b: a ^ b)
    inv = staticmethod(lambda a: a)


def test_kernel_table():
    p = pres(KNOWN[3][0])
    t = kernel_coset_table(p, GroupHom(p, Sign, [1, 0]))
    assert t.n_cosets == 2
    with pytest.raises(NotAHomomorphism):
        kernel_coset_table(p, GroupHom(p, Sign, [0, 1]))


def test_rewrite():
    p = pres(KNOWN[0][0])
    t = todd_coxeter(p, [p.word("b")])
    sd = schreier_data(t, schreier_transversal(t))
    assert rewrite_to_subgroup(sd, p.word("b")).letters
    with pytest.raises(NotInSubgroup):
        rewrite_to_subgroup(sd, p.word("a"))


@given(st.integers(2, 6), st.integers(2, 4), st.data())
@settings(max_examples=40, deadline=None)
def test_relators_act_trivially(n, k, data):
    """Random relators on top of a finite dihedral group: the table must respect all of them."""
    base = [f"a^{n}", "b^2", "b a b a"]
    extra = data.draw(st.lists(st.lists(st.sampled_from(["a", "a^-1", "b"]), min_size=1, max_size=6),
                               max_size=k))
    text = "gens: a b\n" + "".join(f"rel: {r}\n" for r in base + [" ".join(e) for e in extra])
    p = pres(text)
    t = todd_coxeter(p)
    assert t.n_cosets <= 2 * n
    assert (2 * n) % t.n_cosets == 0
    assert t.is_complete() and t.check_consistency(p.relators)
