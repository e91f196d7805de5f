import pytest
from hypothesis import given, strategies as st

from rp2series.words import (Alphabet, AlphabetMismatch, ParseError, UnmappedGenerator, Word, cyclic_canonical,
                             cyclic_reduce, free_reduce, is_rotation, parse_word)

A = Alphabet(["a", "b", "c"])
letters = st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), max_size=20)


def w(s):
    return parse_word(s, A)


def test_parse_and_print():
    assert str(w("a b^-1 c^3")) == "a b^-1 c^3"
    assert w("a a^-1").is_identity()
    assert str(w("1")) == "1"
    assert w("a*b") == w("a b")


def test_parse_errors():
    with pytest.raises(ParseError):
        w("d")
    with pytest.raises(ParseError):
        w("a ^")


def test_alphabet_rejects_duplicates():
    with pytest.raises(ValueError):
        Alphabet(["a", "a"])


def test_mismatch():
    with pytest.raises(AlphabetMismatch):
        w("a") * parse_word("a", Alphabet(["a"]))


def test_commutator_and_conjugate():
    a, b = w("a"), w("b")
    assert str(a.commutator(b)) == "a b a^-1 b^-1"
    assert str(a.conjugate(b)) == "b a b^-1"


def test_substitute():
    B = Alphabet(["x", "y"])
    img = {"a": parse_word("x y", B), "b": parse_word("y^-1", B)}
    assert str(w("a b a^-1").substitute(img)) == "x y^-1 x^-1"
    with pytest.raises(UnmappedGenerator):
        w("c").substitute(img)


def test_cyclic_helpers():
    assert cyclic_reduce((1, 2, -1)) == (2,)
    assert is_rotation((1, 2, 3), (3, 1, 2))
    assert not is_rotation((1, 2, 3), (1, 3, 2))
    assert cyclic_canonical((2, 1)) == cyclic_canonical((1, 2)) == cyclic_canonical((-2, -1))


@given(letters)
def test_free_reduce_is_idempotent(xs):
    r = free_reduce(xs)
    assert free_reduce(r) == r
    assert all(a != -b for a, b in zip(r, r[1:]))


@given(letters, letters, letters)
def test_group_axioms(x, y, z):
    a, b, c = Word(A, x), Word(A, y), Word(A, z)
    assert (a * b) * c == a * (b * c)
    assert (a * a.inverse()).is_identity()
    assert (a * b).inverse() == b.inverse() * a.inverse()


@given(letters)
def test_print_parse_round_trip(x):
    a = Word(A, x)
    assert w(str(a)) == a


@given(letters, st.integers(-4, 4))
def test_power(x, k):
    a = Word(A, x)
    expected = Word.identity(A)
    for _ in range(abs(k)):
        expected = expected * (a if k > 0 else a.inverse())
    assert a ** k == expected


@given(letters)
def test_cyclically_reduce_decomposition(x):
    a = Word(A, x)
    core, conj = a.cyclically_reduce()
    assert conj * core * conj.inverse() == a
    assert cyclic_canonical(core.letters) == cyclic_canonical(a.letters)
