import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from growthlab.dto import GrowthTable
from growthlab.exceptions import ConstructionException, InvariantViolation, OutOfMemoryException, ValidationException
from growthlab.models import GroupModel
from growthlab.services.growth_service import (
    certified_lower_bound,
    certified_upper,
    check_submultiplicativity,
    enumerate_balls,
    free_group_closed_form,
    growth_estimate,
    ratio_identity_estimate,
    with_lower_bound,
)
from growthlab.word_service import make_generating_set, normalize, parse_words

from word_strategies import free_words

F2 = GroupModel.free_group(2)


def test_free_group_balls_match_closed_form(f2_std):
    table = enumerate_balls(f2_std, 10)
    assert table.ball == [2 * 3 ** n - 1 for n in range(11)]
    assert table.ball == [free_group_closed_form(2, n) for n in range(11)]
    assert table.ball[10] == 118097
    assert table.sphere[1:] == [4 * 3 ** (n - 1) for n in range(1, 11)]
    assert not table.truncated


def test_closed_form_rank_one_and_three():
    assert [free_group_closed_form(1, n) for n in range(4)] == [1, 3, 5, 7]
    assert free_group_closed_form(3, 2) == 1 + 6 + 30


def test_free_product_balls(fp23_std):
    table = enumerate_balls(fp23_std, 12)
    assert table.ball[:4] == [1, 4, 8, 14]
    assert table.ball[12] == 442
    for n in range(1, 13):
        assert table.sphere[n] == 2 ** (n // 2) + 2 ** ((n + 1) // 2)


@pytest.mark.parametrize("shards", [2, 4, 8])
def test_shards_do_not_change_the_table(f2_std, fp23_std, shards):
    for S in (f2_std, fp23_std):
        sharded = enumerate_balls(S, 6, shards=shards)
        single = enumerate_balls(S, 6, shards=1)
        assert sharded.ball == single.ball
        assert sharded.sphere == single.sphere


def test_cap_truncates_the_table(f2_std):
    table = enumerate_balls(f2_std, 10, cap=100)
    assert table.truncated
    assert table.truncated_at == 4
    assert table.ball == [1, 5, 17, 53]


def test_monoid_balls_without_inverses(f2_std):
    table = enumerate_balls(f2_std, 5, symmetric=False)
    assert table.ball == [2 ** (n + 1) - 1 for n in range(6)]


def test_negative_depth_is_rejected(f2_std):
    with pytest.raises(ValidationException):
        enumerate_balls(f2_std, -1)


def test_estimates_for_free_group(f2_std):
    estimate = growth_estimate(enumerate_balls(f2_std, 8))
    assert estimate.point_estimate == pytest.approx(3.0)
    assert estimate.certified_upper >= 3.0
    assert estimate.point_estimate <= estimate.certified_upper
    assert estimate.marker is None
    assert estimate.upper_witness[1] == 8


def test_two_step_estimate_for_free_product(fp23_std):
    estimate = growth_estimate(enumerate_balls(fp23_std, 12))
    assert estimate.point_estimate == pytest.approx(math.sqrt(2))
    assert estimate.last_ratio == pytest.approx(4 / 3)


def test_subexponential_and_finite_markers(z, fp23):
    Z = make_generating_set(z, [(1,)])
    assert growth_estimate(enumerate_balls(Z, 6)).marker == "subexponential"
    s = make_generating_set(fp23, [(1,)])
    estimate = growth_estimate(enumerate_balls(s, 4))
    assert estimate.marker == "finite"
    assert estimate.point_estimate == 1.0


def test_estimate_needs_depth_two(f2_std):
    with pytest.raises(ValidationException):
        growth_estimate(enumerate_balls(f2_std, 1))


def test_certified_upper_is_minimum_root(f2_std):
    table = enumerate_balls(f2_std, 4)
    value, witness = certified_upper(table)
    assert value == pytest.approx(min(table.ball[n] ** (1 / n) for n in range(1, 5)))
    assert witness[0] == table.ball[witness[1]]


def test_ratio_identity_estimate(f2_std):
    table = enumerate_balls(f2_std, 5)
    assert ratio_identity_estimate(table) == pytest.approx(324 ** (1 / 5))


def test_submultiplicativity_violation_is_reported():
    table = GrowthTable(model="F2", generators="{a, b}", depth=2, ball=[1, 2, 10], sphere=[1, 1, 8])
    with pytest.raises(InvariantViolation):
        check_submultiplicativity(table)


@settings(max_examples=25, deadline=None)
@given(st.lists(free_words(2, 3), min_size=1, max_size=3))
def test_balls_are_submultiplicative(words):
    words = [normalize(w, F2) for w in words]
    if not any(words):
        return
    table = enumerate_balls(make_generating_set(F2, words), 4)
    check_submultiplicativity(table)
    assert all(x <= y for x, y in zip(table.ball, table.ball[1:]))


def test_certified_lower_bound_needs_a_certificate(f2_std):
    assert certified_lower_bound(f2_std, [(1,), (2,)], 1, True) == pytest.approx(2.0)
    with pytest.raises(ConstructionException):
        certified_lower_bound(f2_std, [(1,), (2,)], 1, None)
    with pytest.raises(ConstructionException):
        certified_lower_bound(f2_std, [(1,), (2,)], 1, False)
    with pytest.raises(ValidationException):
        certified_lower_bound(f2_std, [], 1, True)


def test_lower_bound_above_upper_is_a_violation(f2_std):
    estimate = growth_estimate(enumerate_balls(f2_std, 6))
    assert with_lower_bound(estimate, 2.0, "c1").certified_lower == 2.0
    with pytest.raises(InvariantViolation):
        with_lower_bound(estimate, 10.0, "c2")


def test_parse_words_feed_generating_sets(f2):
    S = make_generating_set(f2, parse_words("a, b, ab", f2))
    assert growth_estimate(enumerate_balls(S, 5)).point_estimate > 3.0


def test_memory_guard_aborts_enumeration(f2_std):
    with pytest.raises(OutOfMemoryException) as info:
        enumerate_balls(f2_std, 4, memory_limit_mb=0.001)
    assert info.value.exit_code == 1


def test_memory_guard_can_truncate_instead(f2_std):
    table = enumerate_balls(f2_std, 4, memory_limit_mb=0.001, truncate_on_memory=True)
    assert table.truncated
    assert table.truncated_at == 1
    assert table.ball == [1]
