import random

import pytest

from braceworks.bimod import AlgebraError, ChainWorld, dual_numbers, load_algebra
from braceworks.binfty import brace_eval, mc_residual, q1_eval
from braceworks.hochbar import build_bar, letter_inputs, random_hoch_cochain, xi_algebra, xi_coalgebra


def test_algebra_xi_is_maurer_cartan():
    for name in ("dual", "triangular", "product"):
        A = load_algebra(name)
        W = ChainWorld(A)
        xi = xi_algebra(W)
        assert mc_residual(W, xi, letter_inputs(A, 3)).is_zero()


def test_perturbed_product_is_not_maurer_cartan():
    A = load_algebra("triangular").perturbed(1, 1, 1)
    with pytest.raises(AlgebraError):
        A.verify()
    W = ChainWorld(A)
    assert not mc_residual(W, xi_algebra(W), letter_inputs(A, 3)).is_zero()


def test_coalgebra_xi_is_maurer_cartan():
    A = dual_numbers()
    B = build_bar(A, 4)
    W = ChainWorld(A, None, B)
    xi = xi_coalgebra(W, B)
    from braceworks.hochbar import coalgebra_inputs
    assert mc_residual(W, xi, coalgebra_inputs(B, 3)).is_zero()


def test_q1_squares_to_zero():
    rng = random.Random(1)
    A = dual_numbers()
    W = ChainWorld(A)
    for m in (0, 1, 2):
        v = random_hoch_cochain(W, m, rng)
        from braceworks.semico import lazy_element
        Qv = lazy_element(W, lambda t: q1_eval(W, v, t), v.degree + 1, [("A",) * k for k in range(5)])
        for t in letter_inputs(A, 3):
            assert q1_eval(W, Qv, t) == {}


def test_brace_with_empty_bottom_is_identity():
    rng = random.Random(2)
    W = ChainWorld(dual_numbers())
    v = random_hoch_cochain(W, 2, rng)
    for t in letter_inputs(W.alg if hasattr(W, "alg") else dual_numbers(), 2):
        assert brace_eval(W, [v], [], t) == {k: c for k, c in v.evaluate(t).items() if c}
