import random

import pytest
from hypothesis import given, strategies as st

from braceworks.complexes import (ChainMap, Complex, NotNullhomotopic, cohomology_dim, cone,
                                  find_nullhomotopy, hom_complex, identity_map, induced_rank,
                                  is_quasi_iso, tensor_complex, zero_map)
from braceworks.graded import GradedMap
from braceworks.linalg import SparseMatrix, kernel_basis, rank


def random_complex(rng, dims):
    """d_q built to satisfy d_{q+1} d_q = 0: rows of d_{q+1} lie in the left kernel of d_q."""
    mats = {}
    qs = sorted(dims)
    prev = None
    for q in qs[:-1]:
        n, m = dims[q], dims[q + 1]
        if prev is None or prev.nrows == 0:
            rows = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(m)]
        else:
            left = kernel_basis(prev.transpose())
            rows = []
            for _ in range(m):
                v = [0] * n
                for k in left:
                    c = rng.randint(-1, 1)
                    v = [a + c * b for a, b in zip(v, k)]
                rows.append(v)
        mats[q] = SparseMatrix.from_dense(rows, ncols=n) if m else SparseMatrix(0, n)
        prev = mats[q]
    return Complex.from_matrices(dims, mats)


@given(st.integers(0, 10 ** 6), st.lists(st.integers(0, 3), min_size=2, max_size=4))
def test_euler_characteristic(seed, ds):
    rng = random.Random(seed)
    dims = {q: d for q, d in enumerate(ds)}
    C = random_complex(rng, dims)
    chi = sum((-1) ** q * d for q, d in dims.items())
    assert sum((-1) ** q * cohomology_dim(C, q) for q in dims) == chi


@given(st.integers(0, 10 ** 6), st.lists(st.integers(0, 3), min_size=2, max_size=4))
def test_identity_is_quasi_iso_and_cone_acyclic(seed, ds):
    C = random_complex(random.Random(seed), {q: d for q, d in enumerate(ds)})
    f = identity_map(C)
    assert all(is_quasi_iso(f, range(-1, len(ds) + 1)).values())
    K = cone(f)
    assert all(cohomology_dim(K, q) == 0 for q in range(-2, len(ds) + 1))


def test_two_term_complex():
    C = Complex.from_matrices({0: 2, 1: 2}, {0: SparseMatrix.from_dense([[1, 0], [0, 0]])})
    assert [cohomology_dim(C, q) for q in (0, 1)] == [1, 1]


def test_zero_map_of_acyclic_complex_is_nullhomotopic():
    C = Complex.from_matrices({0: 1, 1: 1}, {0: SparseMatrix.from_dense([[1]])})
    h = find_nullhomotopy(identity_map(C))
    assert h.degree == -1


def test_identity_of_non_acyclic_is_not_nullhomotopic():
    C = Complex.from_matrices({0: 1}, {})
    with pytest.raises(NotNullhomotopic):
        find_nullhomotopy(identity_map(C))


def test_induced_rank():
    C = Complex.from_matrices({0: 2}, {})
    z = zero_map(C, C)
    assert induced_rank(z, 0) == 0
    assert induced_rank(identity_map(C), 0) == 2


def test_hom_complex_of_acyclic_is_acyclic():
    C = Complex.from_matrices({0: 1, 1: 1}, {0: SparseMatrix.from_dense([[1]])})
    D = Complex.from_matrices({0: 2}, {})
    H = hom_complex(C, D)
    assert all(cohomology_dim(H, q) == 0 for q in range(-2, 3))


def test_kunneth_on_small_complexes():
    C = Complex.from_matrices({0: 2, 1: 1}, {0: SparseMatrix.from_dense([[1, 0]])})
    D = Complex.from_matrices({0: 1, 1: 2}, {0: SparseMatrix.from_dense([[0], [0]])})
    T = tensor_complex(C, D)
    hc = {q: cohomology_dim(C, q) for q in (0, 1)}
    hd = {q: cohomology_dim(D, q) for q in (0, 1)}
    for n in range(0, 3):
        expected = sum(hc[i] * hd[n - i] for i in range(0, 2) if 0 <= n - i <= 1)
        assert cohomology_dim(T, n) == expected


def test_non_chain_map_rejected():
    C = Complex.from_matrices({0: 1, 1: 1}, {0: SparseMatrix.from_dense([[1]])})
    D = Complex.from_matrices({0: 1, 1: 1}, {})
    f = GradedMap(C.underlying, D.underlying, 0, {0: SparseMatrix.identity(1), 1: SparseMatrix.identity(1)})
    with pytest.raises(ValueError):
        ChainMap(C, D, f)
