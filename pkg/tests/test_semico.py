import pytest

from braceworks.bimod import dual_numbers, load_algebra
from braceworks.hochbar import build_bar
from braceworks.properad import Signature
from braceworks.semico import (FreeModule, RelationFailure, SchochReport, anatomy_identities,
                               bar_input, build_schoch, classify_signature, column_collapse_check,
                               compose_types, keller_check, negative_controls, projection_morphisms,
                               sign_regression, trivial_input, typed_instances,
                               verify_composition_table)


@pytest.fixture(scope="module")
def dual3():
    return bar_input(dual_numbers(), 3)


def test_composition_table():
    r = verify_composition_table()
    assert len(r["entries"]) == 36
    assert r["pass"]
    zeros = [k for k, v in r["entries"].items() if not v["expected"]]
    assert len(zeros) == 36 - 17
    assert all(not r["entries"][k]["found"] for k in zeros)


@pytest.mark.parametrize("sig,kind", [
    ((("A", "M"), ("M", "C")), "a"),
    ((("N",), ("N",)), "b"),
    ((("A", "A"), ("M", "N")), "c"),
    ((("N", "M"), ()), "d"),
    ((("A", "A"), ("A",)), "e"),
    ((("C",), ("C", "C")), "f"),
    ((("M", "A"), ("M",)), None),
    ((("C",), ("A",)), None),
])
def test_classify(sig, kind):
    assert classify_signature(Signature(*sig)) == kind


def test_f_over_a_lands_in_a():
    (phi,) = [s for s in typed_instances("f", 1) if s.n == 1]
    psi = [s for s in typed_instances("a", 1) if s.n == 2][0]
    assert {(t, conn) for t, conn, _, _ in compose_types(phi, psi)} == {("a", "C")}


def test_c_over_c_vanishes():
    for phi in typed_instances("c", 1):
        for psi in typed_instances("c", 1):
            assert all(t is None or not ok for t, _, _, ok in compose_types(phi, psi))


def test_relations_and_residual(dual3):
    assert all(dual3.relations().values())
    assert all(dual3.residual().values())


def test_trivial_input_relations():
    inp = trivial_input(load_algebra("product"), 2)
    assert all(inp.relations().values())


def test_negative_controls(dual3):
    nc = negative_controls(dual3)
    assert nc["pass"]
    assert len(nc["controls"]) == 5


def test_perturbed_input_is_refused(dual3):
    key = sorted(dual3.mu, key=repr)[0]
    seg = sorted(dual3.mu[key], key=repr)[0]
    bad = dual3.perturbed("mu", key, seg)
    with pytest.raises(RelationFailure):
        build_schoch(bad)


def test_anatomy_identities():
    r = anatomy_identities(bar_input(dual_numbers(), 2), samples=1)
    assert r["pass"]


def test_sign_regression():
    assert all(sign_regression(bar_input(dual_numbers(), 2)).values())


@pytest.mark.parametrize("name,expected", [("dual", [2, 1, 1]), ("product", [2, 0, 0])])
def test_schoch_dimensions(name, expected):
    S = build_schoch(bar_input(load_algebra(name), 3))
    rep = S.report()
    assert [rep[q] for q in range(3)] == expected


def test_schoch_report():
    R = SchochReport(build_schoch(bar_input(dual_numbers(), 3)))
    eq = R.equivalences()
    assert eq["pass"]
    assert eq["projections"]["pi_A"]["iso_all"] and eq["projections"]["pi_C"]["iso_all"]
    assert R.long_exact_sequence()["pass"]


def test_projection_morphisms(dual3):
    assert projection_morphisms(dual3)["pass"]


@pytest.mark.parametrize("side", ["left", "right"])
def test_keller_for_bar(side):
    A = dual_numbers()
    X = FreeModule(A, {0: ["*"]})
    r = keller_check(build_bar(A, 6), X, X, side, 2)
    assert r["pass"] and r["zigzag"] and r["square"]


def test_keller_control_fails():
    A = dual_numbers()
    X = FreeModule(A, {0: ["*"]})
    assert not keller_check(FreeModule(A, {0: ["m"]}), X, X, "left", 0, lo=0, hi=1)["pass"]


def test_column_collapse():
    r = column_collapse_check(load_algebra("product"), 2, 0, 2)
    assert r["pass"]
    for n, v in r["sigma"].items():
        assert v["zero"] == (int(n) % 2 == 0)
