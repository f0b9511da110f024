import random

from hypothesis import given, strategies as st

from braceworks.graded import (GradedMap, GradedModule, koszul_sign, koszul_sign_inversions, sgn,
                               shift_operation, suspend, suspend_map, tensor_apply_sign, tensor_many,
                               tensor_maps)


@st.composite
def perm_with_degrees(draw, max_len=6):
    n = draw(st.integers(0, max_len))
    p = draw(st.permutations(list(range(n))))
    degs = draw(st.lists(st.integers(-3, 3), min_size=n, max_size=n))
    return list(p), degs


@given(perm_with_degrees())
def test_bubble_and_inversion_counts_agree(pd):
    p, d = pd
    assert koszul_sign(p, d) == koszul_sign_inversions(p, d)


@given(perm_with_degrees(), st.randoms())
def test_koszul_sign_is_multiplicative(pd, rnd):
    tau, degs = pd
    sigma = list(range(len(tau)))
    rnd.shuffle(sigma)
    rho = [tau[j] for j in sigma]
    assert koszul_sign(rho, degs) == koszul_sign(tau, degs) * koszul_sign(sigma, [degs[t] for t in tau])


def test_swap_of_two_odd_elements():
    assert koszul_sign([1, 0], [1, 1]) == -1
    assert koszul_sign([1, 0], [1, 2]) == 1


def test_sgn():
    assert [sgn(e) for e in (-3, -2, 0, 1, 4)] == [-1, 1, 1, -1, 1]


def test_tensor_apply_sign():
    # (f (x) g)(x (x) y) picks (-1)^{|g||x|}
    assert tensor_apply_sign([0, 1], [1, 0]) == -1
    assert tensor_apply_sign([1, 0], [1, 1]) == 1


def test_suspend_shifts_degrees():
    M = GradedModule({0: ["a"], 2: ["b", "c"]})
    S = suspend(M, 1).shifted
    assert S.degrees() == [-1, 1] and S.dim(1) == 2


def _map(X, Y, deg, rng):
    def fn(w):
        d = sum(X.factors[i].degree_of(l) for i, l in enumerate(w)) + deg
        pool = Y.basis(d)
        return {rng.choice(pool): rng.choice([1, -1, 2])} if pool and rng.random() < 0.7 else {}
    return GradedMap.from_function(X, Y, deg, fn)


@given(st.integers(0, 10 ** 6), st.sampled_from([(1, 1), (2, 1), (1, 2)]),
       st.integers(-2, 2), st.integers(-2, 2))
def test_shifts_compose(seed, mn, a, b):
    rng = random.Random(seed)
    m, n = mn
    X = GradedModule({0: ["x"], 1: ["y"]})
    Y = GradedModule({0: ["u"], -1: ["v"]})
    f = _map(tensor_many([X] * m), tensor_many([Y] * n), rng.choice([-1, 0, 1]), rng)
    lhs = shift_operation(shift_operation(f, m, n, a), m, n, b)
    rhs = shift_operation(f, m, n, a + b)
    assert lhs.degree == rhs.degree
    assert lhs == rhs


def test_shift_and_unshift_are_inverse():
    rng = random.Random(3)
    X = GradedModule({0: ["x", "y"]})
    f = _map(tensor_many([X, X]), tensor_many([X]), 0, rng)
    assert shift_operation(shift_operation(f, 2, 1, 1), 2, 1, -1) == f


def test_suspended_map_sign():
    X = GradedModule({0: ["x"], 1: ["y"]})
    f = GradedMap.from_function(X, X, 1, lambda l: {"y": 1} if l == "x" else {})
    g = suspend_map(f)
    assert g.degree == 1
    assert g.apply_label("x", -1) == {"y": -1}


def test_tensor_maps_koszul():
    X = GradedModule({1: ["x"], 2: ["z"]})
    f = GradedMap.identity(X)
    g = GradedMap.from_function(X, X, 1, lambda l: {"z": 1} if l == "x" else {})
    h = tensor_maps(f, g)
    # (id (x) g)(x (x) x) = (-1)^{|g||x|} x (x) g(x) = -x (x) z
    assert h.apply_label(("x", "x"), 2) == {("x", "z"): -1}
