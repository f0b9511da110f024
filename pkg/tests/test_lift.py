import pytest

from braceworks.bimod import PeriodicResolution, dual_numbers, ground, load_algebra
from braceworks.hochbar import BarResolution
from braceworks.lift import (ObstructionNonzero, TrivialResolution, bar_seed, corrupt, counit_report,
                             lift_coalgebra, resolution, verify_coainfty)


def test_periodic_lift():
    P = PeriodicResolution(dual_numbers(), 5)
    S = lift_coalgebra(P, 4)
    assert all(S.cycle_checks.values())
    assert verify_coainfty(P, S.components, 4, S.window)["ok"]
    # the periodic resolution of k[x]/(x^2) carries a strict structure
    assert S.nonzero_arities() == [2]


def test_corruption_is_located():
    P = PeriodicResolution(dual_numbers(), 5)
    S = lift_coalgebra(P, 4)
    for n in (2, 3):
        v = verify_coainfty(P, corrupt(P, S.components, n), 4, S.window)
        assert not v["ok"]
        assert v["failures"][0]["identity"]


def test_bar_seed_is_accepted():
    B = BarResolution(dual_numbers(), 4)
    S = lift_coalgebra(B, 3, seed=bar_seed(B))
    assert S.nonzero_arities() == [2]


def test_bad_seed_is_rejected():
    B = BarResolution(load_algebra("product"), 3)
    seed = bar_seed(B)
    w = next(w for w in seed[2] if len(w) == 1)
    seed[2][w] = {k: 2 * v for k, v in seed[2][w].items()}
    with pytest.raises(ObstructionNonzero):
        lift_coalgebra(B, 2, seed=seed)


def test_trivial_resolution():
    P = resolution(ground(), "trivial", 0)
    assert isinstance(P, TrivialResolution)
    S = lift_coalgebra(P, 3)
    assert verify_coainfty(P, S.components, 3, S.window)["ok"]
    with pytest.raises(ValueError):
        TrivialResolution(dual_numbers())


def test_counit_homotopies():
    S = lift_coalgebra(PeriodicResolution(dual_numbers(), 4), 3)
    rep = counit_report(S)
    assert rep["left"] and rep["right"]


def test_json_export_is_exact():
    S = lift_coalgebra(PeriodicResolution(dual_numbers(), 4), 3)
    doc = S.to_json(lambda v: f"{v.numerator}/{v.denominator}")
    text = repr(doc)
    assert "." not in text.replace("...", "")
