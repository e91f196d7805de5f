import pytest
from hypothesis import given, settings, strategies as st

from rp2series.cosets import todd_coxeter
from rp2series.presentation import (GroupHom, OracleUnavailable, Presentation, abelian_invariants,
                                    abelianization_map, check_homomorphism, parse_presentation, tietze_simplify)
from rp2series.words import ParseError

Q8 = "gens: x y\nrel: x^4\nrel: x^2 y^-2\nrel: y x y^-1 x\n"


def test_parse_round_trip():
    p = parse_presentation(Q8)
    assert p.generators == ("x", "y")
    assert parse_presentation(p.to_text()).to_text() == p.to_text()
    assert p.digest() == parse_presentation(p.to_text()).digest()


@pytest.mark.parametrize("text", ["rel: x\n", "gens: x\nfoo: x\n", "gens: x x\n", "gens: x\nrel: y\n"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_presentation(text)


def test_relators_are_cyclically_reduced():
    p = Presentation(["a", "b"], [[1, 2, -1], [1, -1]])
    assert [str(r) for r in p.relators] == ["b"]


def test_abelianization_map():
    p = parse_presentation(Q8)
    m = abelianization_map(p)
    assert m.invariants.as_pair() == (0, [2, 2])
    # the images respect every relator
    for r in p.relators:
        v = [0] * len(m.moduli)
        for x in r.letters:
            img = m.images[abs(x) - 1]
            v = [a + (1 if x > 0 else -1) * b for a, b in zip(v, img)]
        assert all(a % q == 0 if q else a == 0 for a, q in zip(v, m.moduli))


class Z:
    identity = 0
    mul = staticmethod(lambda a, b: (a + b) % 4)
    inv = staticmethod(lambda a: -a % 4)


def test_homomorphism_check():
    p = parse_presentation(Q8)
    assert check_homomorphism(GroupHom(p, Z, {"x": 1, "y": 1})) == [2]
    assert check_homomorphism(GroupHom(p, Z, [2, 2])) == []
    with pytest.raises(ValueError):
        GroupHom(p, Z, [1])
    with pytest.raises(OracleUnavailable):
        check_homomorphism(GroupHom(p, p, p.gens()))


def test_tietze_keeps_group_and_dictionary():
    p = parse_presentation("gens: a b c\nrel: c^-1 a b\nrel: a^3\nrel: b^2\nrel: a b a^-1 b^-1\n")
    tz = tietze_simplify(p)
    q = tz.presentation
    assert len(q.alphabet) < len(p.alphabet)
    assert todd_coxeter(q).n_cosets == todd_coxeter(p).n_cosets == 6
    assert abelian_invariants(q) == abelian_invariants(p)
    # old generators expressed in the new ones still satisfy the old relators
    for r in p.relators:
        img = r.substitute(tz.dictionary, q.alphabet)
        t = todd_coxeter(q)
        assert all(t.act(c, img) == c for c in range(t.n_cosets))


triangle = st.sampled_from([(2, 2, 3), (2, 3, 3), (2, 3, 4), (2, 3, 5), (2, 2, 5), (3, 3, 2)])


@given(triangle, st.integers(0, 3))
@settings(max_examples=30, deadline=None)
def test_tietze_on_redundant_triangle_groups(lmn, extra):
    l, m, n = lmn
    rels = [f"a^{l}", f"b^{m}", " ".join(["a b"] * n)]
    gens = ["a", "b"] + [f"t{i}" for i in range(extra)]
    rels += [f"t{i}^-1 a b^{i + 1}" for i in range(extra)]
    p = parse_presentation("gens: " + " ".join(gens) + "\n" + "".join(f"rel: {r}\n" for r in rels))
    q = tietze_simplify(p).presentation
    assert todd_coxeter(q).n_cosets == todd_coxeter(p).n_cosets
    assert abelian_invariants(q) == abelian_invariants(p)
