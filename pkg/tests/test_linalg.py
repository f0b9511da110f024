import itertools
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from braceworks.linalg import (GF, QQ, Inconsistent, Mod, SparseMatrix, image_basis, kernel_basis,
                               nullity, quotient_dim, rank, solve)

small = st.integers(-3, 3)


def matrices(max_r=5, max_c=5):
    return st.integers(1, max_r).flatmap(
        lambda r: st.integers(1, max_c).flatmap(
            lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


@given(matrices())
def test_rank_matches_sympy(rows):
    assert rank(SparseMatrix.from_dense(rows)) == sympy.Matrix(rows).rank()


@given(matrices())
def test_kernel_vectors_are_killed(rows):
    M = SparseMatrix.from_dense(rows)
    ker = kernel_basis(M)
    assert len(ker) == M.ncols - rank(M) == nullity(M)
    for v in ker:
        assert all(x == 0 for x in M.apply_dense(v))


@given(matrices(), st.lists(small, min_size=5, max_size=5))
def test_solve_consistent_systems(rows, x):
    M = SparseMatrix.from_dense(rows)
    x = x[:M.ncols]
    b = M.apply_dense(x)
    y = solve(M, b)
    assert M.apply_dense(y) == b


def test_solve_reports_inconsistency():
    M = SparseMatrix.from_dense([[1, 1], [2, 2]])
    with pytest.raises(Inconsistent):
        solve(M, [1, 3])


@pytest.mark.parametrize("p", [2, 3, 5])
@given(data=st.data())
def test_kernel_size_mod_p_by_enumeration(p, data):
    r = data.draw(st.integers(1, 3))
    c = data.draw(st.integers(1, 3))
    rows = data.draw(st.lists(st.lists(st.integers(0, p - 1), min_size=c, max_size=c), min_size=r, max_size=r))
    M = SparseMatrix.from_dense(rows, GF(p))
    count = sum(1 for v in itertools.product(range(p), repeat=c)
                if all(sum(a * b for a, b in zip(row, v)) % p == 0 for row in rows))
    assert count == p ** nullity(M)


def test_rank_depends_on_characteristic():
    rows = [[1, 1], [1, -1]]
    assert rank(SparseMatrix.from_dense(rows)) == 2
    assert rank(SparseMatrix.from_dense(rows, GF(2))) == 1


def test_exact_fractions():
    M = SparseMatrix.from_dense([[2, 0], [0, 3]])
    assert solve(M, [1, 1]) == [Fraction(1, 2), Fraction(1, 3)]


def test_mod_arithmetic():
    a = Mod(3, 5)
    assert a * a.inverse() == 1
    assert a + 4 == Mod(2, 5)
    assert Mod(Fraction(1, 2), 5) * 2 == 1


def test_field_parse_and_format():
    assert QQ.parse("3/6") == Fraction(1, 2)
    assert QQ.fmt(Fraction(-2, 4)) == "-1/2"
    assert GF(3).fmt(GF(3).parse("5")) == "2"
    with pytest.raises(ValueError):
        GF(4)


@given(matrices())
def test_image_and_quotient(rows):
    M = SparseMatrix.from_dense(rows)
    im = image_basis(M)
    assert len(im) == rank(M)
    cols = list(M.columns().values())
    assert quotient_dim(im, cols) == 0


@given(matrices(3, 4), matrices(4, 3))
def test_matmul_matches_sympy(a, b):
    A = SparseMatrix.from_dense(a)
    B = SparseMatrix.from_dense(b, ncols=None)
    if A.ncols != B.nrows:
        return
    assert (A @ B).to_dense() == (sympy.Matrix(a) * sympy.Matrix(b)).tolist()
