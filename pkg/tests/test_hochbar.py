import random

import pytest

from braceworks.bimod import ChainWorld, bundled_names, dual_numbers, load_algebra
from braceworks.binfty import TruncationWindow
from braceworks.complexes import cohomology_dim
from braceworks.hochbar import (BarResolution, build_bar, cohochschild, counit_check, dual_bar_check,
                                dual_coalgebra, hochschild, hochschild_direct, periodic_oracle,
                                projection_p, random_hoch_cochain, sample_cochain, sigma)

QQ_NAMES = [n for n in bundled_names() if "_f" not in n]


@pytest.mark.parametrize("name", bundled_names())
def test_line_complex_matches_direct_hochschild(name):
    A = load_algebra(name)
    H = hochschild(A, TruncationWindow(4))
    rep = H.report()
    direct = hochschild_direct(A, 4)
    for q in H.trusted:
        assert rep[q] == cohomology_dim(direct, q), q


def test_dual_numbers_oracle():
    A = dual_numbers()
    assert [periodic_oracle(A, 3)[q] for q in range(4)] == [2, 1, 1, 1]
    rep = hochschild(A, TruncationWindow(5)).report()
    assert [rep[q] for q in range(4)] == [2, 1, 1, 1]


def test_dual_numbers_in_characteristic_two():
    # 2x = 0 so every map in the periodic complex vanishes
    A = load_algebra("dual_f2")
    assert [periodic_oracle(A, 3)[q] for q in range(4)] == [2, 2, 2, 2]
    rep = hochschild(A, TruncationWindow(5)).report()
    assert [rep[q] for q in range(4)] == [2, 2, 2, 2]


def test_separable_algebras_are_rigid():
    for name in ("ground", "product"):
        rep = hochschild(load_algebra(name), TruncationWindow(5)).report()
        assert all(v == 0 for q, v in rep.items() if q > 0)


@pytest.mark.parametrize("name", QQ_NAMES)
def test_bar_resolution_axioms(name):
    assert all(BarResolution(load_algebra(name), 3).verify().values())


def test_bar_differential_on_a_letter():
    B = BarResolution(dual_numbers(), 2)
    # d(1 (x) sx (x) 1) = x (x) 1 - 1 (x) x
    assert B.d_gen((1,)) == {(1, (), 0): 1, (0, (), 1): -1}


def test_bar_sizes():
    A = load_algebra("triangular")
    B = BarResolution(A, 3)
    C = B.to_bimodule_complex(3)
    assert C.dim(0) == A.dim ** 2
    assert C.dim(-2) == A.dim ** 4


@pytest.mark.parametrize("name", QQ_NAMES)
def test_counit_is_quasi_iso(name):
    assert counit_check(load_algebra(name), 4)["acyclic"]


@pytest.mark.parametrize("name", ["dual", "product"])
def test_dual_of_bar_is_hochschild(name):
    assert dual_bar_check(load_algebra(name), 3)["commutes"]


def test_cohochschild_of_bar():
    A = dual_numbers()
    coh = cohochschild(build_bar(A, 5))
    rep = coh.report()
    orc = periodic_oracle(A, max(rep))
    assert all(rep[q] == orc[q] for q in rep)
    p = projection_p(coh).check(0, max(rep))
    assert p["chain_map"] and all(p["quasi_iso"].values())


def test_dual_coalgebra_axioms():
    A = dual_numbers()
    B = build_bar(A, 4)
    D = dual_coalgebra(B)
    rng = random.Random(0)
    W = ChainWorld(A, None, B)
    samples = [s for s in (sample_cochain(B, W, d, rng, 2, max_n=1) for d in (0, 1, -1)) if s.comps]
    assert D.verify(samples, 2)["ok"]


def test_sigma_is_lie_but_not_dot():
    S = sigma(dual_numbers())
    rng = random.Random(0)
    hs = [random_hoch_cochain(S.hw, m, rng) for m in (0, 1, 2)]
    assert all(S.check_chain(h) for h in hs)
    assert all(S.check_bracket(u, v) for u in hs for v in hs)
    assert S.dot_witness(hs) is not None
