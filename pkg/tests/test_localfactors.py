import math
from fractions import Fraction

import mpmath
import pytest

from orbicount.errors import DomainError
from orbicount.localfactors import (
    OracleConfig,
    archimedean_blowup,
    archimedean_projective,
    blowup_factor,
    denef_factor,
    normalized_factor,
    p1_factor,
    shell_sum_oracle,
)
from orbicount.orbifold import a_invariant, blowup_p2, projective_space

P1 = projective_space(1, 1)


def test_denef_examples():
    assert abs(denef_factor(P1, 2, 2) - 1.5) < 1e-25
    # all t -> 0: the factor tends to 1
    assert abs(denef_factor(projective_space(1, 3), 2, 40) - 1) < 1e-10
    bl = blowup_p2(2, 3)
    assert abs(denef_factor(bl, 5, 1.5) - blowup_factor(5, 2, 3, 1.5)) < 1e-25


def test_p1_factor_examples():
    with mpmath.workdps(30):
        assert abs(p1_factor(2, 1, 2) - 1.5) < 1e-25
        assert abs(p1_factor(3, 2, 2) - mpmath.mpf(13) / 12) < 1e-25
        assert abs(p1_factor(5, 4, 2, in_S=True) - p1_factor(5, 1, 2)) < 1e-25


def test_closed_forms_match_denef_on_grid():
    for p in (2, 3, 7):
        for m in (1, 2, 3):
            model = projective_space(1, m)
            for s in (1.5, 2.0, 3.25):
                if s <= 1:
                    continue
                for in_S in (False, True):
                    a = p1_factor(p, m, s, in_S)
                    b = denef_factor(model, p, s, in_S)
                    assert abs(a - b) <= 1e-12 * abs(a)
        for m1, m2 in ((1, 1), (2, 3), (3, 2)):
            model = blowup_p2(m1, m2)
            for s in (1.25, 2.0):
                for in_S in (False, True):
                    a = blowup_factor(p, m1, m2, s, in_S)
                    b = denef_factor(model, p, s, in_S)
                    assert abs(a - b) <= 1e-12 * abs(a)


def test_denef_on_a_custom_split_model():
    """A product-of-lines model: two disjoint boundary lines on a quadric
    surface.  The stratum sum must factor into two line factors."""
    from orbicount.orbifold import BoundaryComponent, OrbifoldModel

    m1, m2 = 2, 3
    model = OrbifoldModel(
        "custom",
        2,
        (
            BoundaryComponent("D1", rho=2, lam=Fraction(1), m=m1),
            BoundaryComponent("D2", rho=2, lam=Fraction(1), m=m2),
        ),
        {
            frozenset(): (0, 0, 1),
            frozenset({"D1"}): (0, 1),
            frozenset({"D2"}): (0, 1),
            frozenset({"D1", "D2"}): (1,),
        },
    )
    for p in (2, 5):
        for s in (1.75, 2.5):
            combined = denef_factor(model, p, s)
            split = p1_factor(p, m1, s) * p1_factor(p, m2, s)
            assert abs(combined - split) <= 1e-12 * abs(split)


def test_denef_infinite_weight_component():
    from orbicount.orbifold import BoundaryComponent, OrbifoldModel

    model = OrbifoldModel(
        "custom",
        1,
        (BoundaryComponent("D", rho=2, lam=Fraction(1), m=None),),
        {frozenset(): (0, 1), frozenset({"D"}): (1,)},
    )
    # the integrality condition kills the boundary stratum entirely...
    assert abs(denef_factor(model, 3, 2.0) - 1) < 1e-25
    # ...unless the place is in S, where the weight-1 series reappears
    with_s = denef_factor(model, 3, 2.0, in_S=True)
    assert abs(with_s - p1_factor(3, 1, 2.0)) < 1e-20


def test_projective_higher_dimension_against_shells():
    model = projective_space(3, 2)
    for p in (2, 5):
        for s in (3.5, 4.25):
            o = shell_sum_oracle(model, p, s)
            assert abs(denef_factor(model, p, s) - o.value) <= o.bound


def test_oracle_agreement_across_matrix():
    for m in (1, 2, 3):
        model = projective_space(1, m)
        a = a_invariant(model)
        for p in (2, 3, 5, 7):
            for s in (a + Fraction(1, 4), a + 1):
                o = shell_sum_oracle(model, p, s)
                assert abs(denef_factor(model, p, s) - o.value) <= o.bound
                assert o.bound <= 1e-10
    for m1, m2 in ((1, 1), (2, 3), (3, 3)):
        model = blowup_p2(m1, m2)
        for p in (2, 7):
            for s in (Fraction(5, 4), 2):
                o = shell_sum_oracle(model, p, s)
                assert abs(denef_factor(model, p, s) - o.value) <= o.bound
                assert o.bound <= 1e-10


def test_oracle_in_s_matches_weight_one():
    model = blowup_p2(2, 3)
    o = shell_sum_oracle(model, 3, 1.5, in_S=True)
    assert abs(blowup_factor(3, 2, 3, 1.5, in_S=True) - o.value) <= o.bound


def test_oracle_depth_consistency():
    model = blowup_p2(2, 1)
    shallow = shell_sum_oracle(model, 2, 1.5, OracleConfig(depth=40))
    deep = shell_sum_oracle(model, 2, 1.5, OracleConfig(depth=50))
    assert abs(shallow.value - deep.value) <= shallow.bound
    assert deep.bound < shallow.bound


def test_oracle_config_validation():
    with pytest.raises(ValueError):
        OracleConfig(depth=5)
    with pytest.raises(ValueError):
        OracleConfig(tolerance=0)


def test_divergence_raises():
    with pytest.raises(DomainError):
        denef_factor(P1, 2, 1.0)
    with pytest.raises(DomainError):
        p1_factor(2, 2, 0.5)
    with pytest.raises(DomainError):
        shell_sum_oracle(blowup_p2(1, 1), 2, Fraction(2, 3))


def test_normalized_factor_examples():
    with mpmath.workdps(30):
        assert abs(normalized_factor(P1, 2, 2) - 0.75) < 1e-25
        # at the critical exponent every regularized factor is 1 - p^-2 per component
        for m in (1, 2, 3):
            model = projective_space(1, m)
            a = a_invariant(model)
            for p in (2, 5):
                expected = 1 - mpmath.mpf(p) ** -2
                assert abs(normalized_factor(model, p, a) - expected) < 1e-20
        for m1, m2 in ((1, 1), (2, 3)):
            model = blowup_p2(m1, m2)
            for p in (2, 5):
                expected = (1 - mpmath.mpf(p) ** -2) ** 2
                assert abs(normalized_factor(model, p, 1) - expected) < 1e-20
        assert abs(normalized_factor(P1, 10**6 + 3, 2) - 1) < 1e-5


def test_normalized_factor_decay_envelope():
    margin = Fraction(1, 100)
    for model in (projective_space(1, 2), blowup_p2(2, 3)):
        a = a_invariant(model)
        for s in (a + Fraction(1, 4), a + 1):
            delta = min(
                c.m * (s * c.lam - c.rho + 1) for c in model.components
            ) - margin
            cap = 2 * len(model.components)
            for p in (2, 3, 5, 11, 101, 499):
                lhs = abs(normalized_factor(model, p, s) - 1)
                assert lhs <= cap * float(p) ** float(-1 - delta)


def test_archimedean_projective():
    a1 = archimedean_projective(1, 2.0)
    assert a1.closed_form == 4.0
    assert a1.difference < 1e-10
    big = archimedean_projective(1, 1e6)
    assert abs(big.closed_form - 2.0) < 1e-4  # volume of [-1, 1] in the limit
    a2 = archimedean_projective(2, 3.0)
    assert a2.closed_form == 12.0
    assert a2.difference < 1e-8
    a3 = archimedean_projective(3, 4.0)
    assert a3.closed_form == pytest.approx(2**3 * (1 + 3.0), rel=1e-12)
    assert a3.difference < 1e-8
    with pytest.raises(DomainError):
        archimedean_projective(2, 2.0)


def test_archimedean_blowup():
    ab = archimedean_blowup(1, 1, 1.0)
    assert ab.closed_form == 16.0
    assert ab.difference < 1e-6
    for m1, m2 in ((1, 2), (2, 3), (3, 1)):
        ab = archimedean_blowup(m1, m2, 1.0)
        assert ab.closed_form == pytest.approx(4 * (1 + m1) * (1 + m2), rel=1e-12)
        assert ab.difference < 1e-6
    limit = archimedean_blowup(1, 1, 50.0)
    assert abs(limit.closed_form - 4.0) < 0.5  # unit box volume in the limit
    assert abs(archimedean_blowup(1, 1, 1e6).closed_form - 4.0) < 1e-4
    with pytest.raises(DomainError):
        archimedean_blowup(1, 1, 0.5)
