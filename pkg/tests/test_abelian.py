import pytest
from hypothesis import given, settings, strategies as st

from rp2series.abelian import (AbelianInvariants, abelian_invariants_of_matrix, determinant, matmul,
                               smith_normal_form)

small = st.integers(-9, 9)


def matrices(max_dim=4):
    return st.integers(1, max_dim).flatmap(
        lambda r: st.integers(1, max_dim).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


def test_known_forms():
    assert smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]]).diagonal[:3] == [2, 6, 12]
    assert abelian_invariants_of_matrix([[2, 0], [0, 3]], 2).as_pair() == (0, [6])
    assert abelian_invariants_of_matrix([[2, 0], [0, 2]], 3).as_pair() == (1, [2, 2])
    assert abelian_invariants_of_matrix([], 2).as_pair() == (2, [])


def test_sparse_input_matches_dense():
    dense = [[4, 6, 0], [0, 2, 2], [2, 0, 6]]
    sparse = [{j: v for j, v in enumerate(r) if v} for r in dense]
    assert abelian_invariants_of_matrix(dense, 3) == abelian_invariants_of_matrix(sparse, 3)


def test_invariants_validation():
    with pytest.raises(ValueError):
        AbelianInvariants(0, (4, 2))
    with pytest.raises(ValueError):
        AbelianInvariants(0, (1,))
    inv = AbelianInvariants(2, (2, 4))
    assert str(inv) == "Z^2 + Z2 + Z4"
    assert inv.order is None and AbelianInvariants(0, (2, 4)).order == 8
    assert AbelianInvariants(0).is_trivial


def test_left_false_skips_u():
    r = smith_normal_form([[2, 1], [1, 2]], left=False)
    assert r.U is None and r.V is not None


@given(matrices())
@settings(max_examples=100)
def test_witnesses(m):
    r = smith_normal_form(m)
    D = matmul(matmul(r.U, m), r.V)
    rows, cols = len(m), len(m[0])
    for i in range(rows):
        for j in range(cols):
            want = r.diagonal[i] if i == j and i < len(r.diagonal) else 0
            assert D[i][j] == want
    assert abs(determinant(r.U)) == 1 and abs(determinant(r.V)) == 1
    nz = [d for d in r.diagonal if d]
    assert all(d > 0 for d in nz)
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
    assert r.rank == len(nz)


@given(matrices(3), st.data())
@settings(max_examples=100)
def test_unimodular_invariance(m, data):
    rows, cols = len(m), len(m[0])

    def unimodular(n):
        u = [[int(i == j) for j in range(n)] for i in range(n)]
        for _ in range(data.draw(st.integers(0, 6))):
            i, j = data.draw(st.integers(0, n - 1)), data.draw(st.integers(0, n - 1))
            if i != j:
                c = data.draw(st.integers(-3, 3))
                u[i] = [a + c * b for a, b in zip(u[i], u[j])]
        return u

    P, Q = unimodular(rows), unimodular(cols)
    a = abelian_invariants_of_matrix(m, cols)
    b = abelian_invariants_of_matrix(matmul(matmul(P, m), Q), cols)
    assert a == b


@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3))
def test_determinant_matches_diagonal(m):
    r = smith_normal_form(m, witnesses=False)
    prod = 1
    for d in r.diagonal[:3]:
        prod *= d
    assert abs(determinant(m)) == abs(prod)
