from fractions import Fraction

import pytest

from orbicount.orbifold import (
    BoundaryComponent,
    OrbifoldModel,
    PlaceSet,
    a_invariant,
    b_invariant,
    blowup_p2,
    critical_set,
    eval_count_poly,
    model_from_text,
    model_to_text,
    projective_space,
    validate,
)


def custom(components, strata, dim):
    return OrbifoldModel("custom", dim, tuple(components), strata)


def test_projective_invariants():
    m = projective_space(2, 3)
    assert a_invariant(m) == Fraction(7, 3)  # n + 1/m
    assert b_invariant(m) == 1
    assert critical_set(projective_space(1, 2)) == frozenset({"D"})
    assert b_invariant(projective_space(3, 5)) == 1


def test_blowup_invariants():
    for m1, m2 in ((1, 1), (2, 3), (3, 1)):
        m = blowup_p2(m1, m2)
        assert a_invariant(m) == 1
        assert critical_set(m) == frozenset({"D1", "D2"})
        assert b_invariant(m) == 2


def test_single_component_example():
    comp = BoundaryComponent("E", rho=2, lam=Fraction(2), m=1)
    m = custom([comp], {frozenset(): (0, 1), frozenset({"E"}): (1,)}, 1)
    assert a_invariant(m) == 1
    assert b_invariant(m) == 1


def test_strict_max_critical_set():
    c1 = BoundaryComponent("A", rho=3, lam=Fraction(2), m=1)  # ratio 3/2
    c2 = BoundaryComponent("B", rho=2, lam=Fraction(4), m=1)  # ratio 1/2
    m = custom([c1, c2], {frozenset(): (0, 1)}, 1)
    assert critical_set(m) == frozenset({"A"})


def test_infinite_weight_epsilon():
    comp = BoundaryComponent("E", rho=3, lam=Fraction(1), m=None)
    assert comp.epsilon == 1
    m = custom([comp], {frozenset(): (0, 1)}, 1)
    assert a_invariant(m) == 2  # (rho - 1)/lam


def test_lambda_scaling_divides_a_and_keeps_argmax():
    c1 = BoundaryComponent("A", rho=2, lam=Fraction(1), m=2)
    c2 = BoundaryComponent("B", rho=3, lam=Fraction(2), m=1)
    base = custom([c1, c2], {frozenset(): (0, 0, 1)}, 2)
    for t in (Fraction(2), Fraction(3, 7)):
        scaled = custom(
            [
                BoundaryComponent(c.label, c.rho, c.lam * t, c.m)
                for c in (c1, c2)
            ],
            {frozenset(): (0, 0, 1)},
            2,
        )
        assert a_invariant(scaled) == a_invariant(base) / t
        assert critical_set(scaled) == critical_set(base)


def test_stratum_tables_sum_to_full_point_count():
    for q in (2, 3, 5, 7, 11):
        for n in (1, 2, 3):
            m = projective_space(n, 2)
            total = sum(eval_count_poly(c, q) for c in m.strata.values())
            assert total == (q ** (n + 1) - 1) // (q - 1)
        bl = blowup_p2(1, 2)
        total = sum(eval_count_poly(c, q) for c in bl.strata.values())
        assert total == q * q + 2 * q + 1


def test_validate_builtins_clean():
    assert validate(projective_space(1, 1)) == []
    assert validate(projective_space(3, 4)) == []
    assert validate(blowup_p2(2, 2)) == []


def test_validate_flags_low_rho():
    bad = custom(
        [BoundaryComponent("E", rho=1, lam=Fraction(1), m=1)],
        {frozenset(): (0, 1), frozenset({"E"}): (1,)},
        1,
    )
    assert any("rho < 2" in v for v in validate(bad))


def test_validate_flags_missing_empty_stratum():
    bad = custom(
        [BoundaryComponent("E", rho=2, lam=Fraction(1), m=1)],
        {frozenset({"E"}): (1,)},
        1,
    )
    assert any("empty subset" in v for v in validate(bad))


def test_validate_flags_wrong_open_cell_polynomial():
    bad = custom(
        [BoundaryComponent("E", rho=2, lam=Fraction(1), m=1)],
        {frozenset(): (1, 1), frozenset({"E"}): (1,)},
        1,
    )
    assert any("not q^n" in v for v in validate(bad))


def test_builders_reject_bad_weights():
    with pytest.raises(ValueError):
        projective_space(1, 0)
    with pytest.raises(ValueError):
        blowup_p2(0, 1)


def test_serialization_roundtrip():
    for model in (projective_space(1, 2), projective_space(3, 1), blowup_p2(2, 3)):
        text = model_to_text(model)
        again = model_from_text(text)
        assert again.name == model.name
        assert again.params == model.params
    with pytest.raises(ValueError):
        model_from_text("model=weird\n")


def test_place_set():
    S = PlaceSet.of([5, 2, 2, 3])
    assert S.finite_primes == (2, 3, 5)
    assert 2 in S and 7 not in S
    with pytest.raises(ValueError):
        PlaceSet.of([4])
