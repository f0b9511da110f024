from hypothesis import given, strategies as st

from braceworks.graded import GradedModule
from braceworks.properad import (EndProperad, Signature, check_bounded_connectivity, enumerate_sites,
                                 site_colours)

colours = st.lists(st.sampled_from("XY"), min_size=1, max_size=4)


@given(colours, colours)
def test_sites_have_positive_arity_and_consistent_colours(ins, outs):
    phi = Signature(tuple(ins), ("X",))
    psi = Signature(("X",), tuple(outs))
    for s in enumerate_sites(phi.inputs, psi.outputs):
        assert s.connections >= 1
        assert not (s.a0 and s.b0) and not (s.a1 and s.b1)
        mid, cin, cout = site_colours(s, phi, psi)
        assert None not in mid
        assert len(cin) == s.b0 + psi.m + s.b1
        assert len(cout) == s.a0 + phi.n + s.a1


def test_site_count_for_one_by_one():
    assert len(enumerate_sites(("X",), ("X",))) == 1
    assert enumerate_sites(("X",), ("Y",)) == []


def test_site_count_for_two_by_two():
    # overlaps of length 1 (two ways) and 2
    sites = enumerate_sites(("X", "X"), ("X", "X"))
    assert sorted(s.connections for s in sites) == [1, 1, 2]


def _end():
    V = {"X": GradedModule({0: ["a", "b"]})}
    return EndProperad(V)


def test_identity_is_a_unit():
    O = _end()
    f = O.element(Signature(("X", "X"), ("X",)), 0, {(("a", "a")): {("a",): 1}, ("a", "b"): {("b",): 2}})
    idX = O.identity("X")
    for s in O.sites(idX, f):
        assert O.equal(O.elementary_compose(idX, f, s), f)


def test_composition_of_matrices():
    O = _end()
    sig = Signature(("X",), ("X",))
    f = O.element(sig, 0, {("a",): {("b",): 1}})
    g = O.element(sig, 0, {("b",): {("a",): 3}})
    (s,) = O.sites(g, f)
    h = O.elementary_compose(g, f, s)
    assert O.evaluate(h) == {(("X", "a"),): {(("X", "a"),): 3}}


def test_bounded_connectivity():
    O = _end()
    mu = O.element(Signature(("X", "X"), ("X",)), 0, {("a", "a"): {("a",): 1}})
    delta = O.element(Signature(("X",), ("X", "X")), 0, {("a",): {("a", "a"): 1}})
    ok, bad = check_bounded_connectivity(O, [mu, delta], 1)
    assert not ok and bad
    ok, _ = check_bounded_connectivity(O, [mu, delta], 2)
    assert ok


def test_component_is_hom_complex():
    O = _end()
    C = O.component(Signature(("X",), ("X", "X")))
    assert C.dim(0) == 2 * 4
