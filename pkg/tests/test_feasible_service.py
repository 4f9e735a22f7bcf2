import pytest

from growthlab.exceptions import InvariantViolation
from growthlab.services.feasible_service import FeasibleService, word_digest
from growthlab.services.growth_service import enumerate_balls, growth_estimate
from growthlab.services.separator_service import GermContext, SeparatorService, make_separator_set


@pytest.fixture
def short_feasible(f2_space, constants, f2_std):
    """Separators a^5, b^5, A^5, B^5 with Delta = 1: short enough that forbidden elements exist."""
    service = SeparatorService(f2_space, constants)
    ctx = GermContext(
        S=f2_std, S_power=f2_std, lengths={}, y=f2_space.base_point, L=1, L_S=1, Delta=1
    )
    words = [(1,) * 5, (2,) * 5, (-1,) * 5, (-2,) * 5]
    seps = make_separator_set(f2_space, words, ctx, [[()]] * 4, [5] * 4)
    return FeasibleService(service, seps)


def test_word_digest_separates_words():
    assert word_digest((1, 2)) != word_digest((2, 1))
    assert word_digest(()) == word_digest(tuple())


def test_ball_is_shortlex(short_feasible):
    ball = short_feasible.ball(2)
    assert len(ball) == 17
    assert ball[0] == ()
    assert ball[1:5] == [(1,), (-1,), (2,), (-2,)]


def test_forbidden_test_returns_witness(short_feasible):
    ball = short_feasible.ball(2)
    hit, witness = short_feasible.forbidden_test((-1, -1, -1), ball)
    assert hit
    assert witness == (1,)
    assert short_feasible.forbidden_test((), ball) == (False, None)


def test_classify_finds_squares(short_feasible):
    forbidden, allowed = short_feasible.classify(2)
    assert forbidden == [(1, 1), (-1, -1), (2, 2), (-2, -2)]
    assert len(allowed) == 13


def test_adequate_selection_without_fixers(short_feasible):
    assert len(short_feasible.adequate_selection(2)) == 13


def test_phi_map_and_broken_path(short_feasible):
    image, chosen = short_feasible.phi_map([(1,), (2,)])
    assert chosen == [1, 1]
    assert image == (1,) * 6 + (2,) + (1,) * 5
    assert short_feasible.broken_path_gap([(1,), (2,)], chosen) == 0


def test_phi_is_injective_on_single_words(short_feasible):
    report = short_feasible.phi_injectivity_check(2, 1)
    assert report.images_distinct
    assert report.ball_size == 17
    assert report.forbidden == 4
    assert report.adequate == 13
    assert report.tuples_checked == 13
    assert report.adequate_bound == pytest.approx(8.5)


def test_short_separators_collide_on_pairs(short_feasible):
    # A·a^5·1·a^5 = 1·a^5·A·a^5
    with pytest.raises(InvariantViolation):
        short_feasible.phi_injectivity_check(2, 2)


def test_naive_concatenation_collides(short_feasible):
    assert short_feasible.naive_concatenation_collisions(1, 2) == 8


def test_free_group_phi_check(f2_separators):
    service, seps = f2_separators
    feasible = FeasibleService(service, seps)
    report = feasible.phi_injectivity_check(2, 1)
    assert report.forbidden == 0
    assert report.adequate == 17
    assert report.images_distinct


def test_free_group_growth_bound(f2_separators, f2_std):
    service, seps = f2_separators
    feasible = FeasibleService(service, seps)
    estimate = growth_estimate(enumerate_balls(f2_std, 6))
    report = feasible.feasible_growth_bound(2, 1, estimate)
    assert report.implied_lower == pytest.approx(17 ** (1 / 343484))
    assert 1.0 <= report.implied_lower_constant_b <= estimate.certified_upper


@pytest.mark.parametrize(
    "separators, m, q, tuples",
    [
        ("f2_separators", 2, 2, 17 ** 2),
        ("f2_separators", 3, 1, 53),
        ("fp23_separators", 2, 1, 8),
        ("fp23_separators", 2, 2, 8 ** 2),
        ("fp23_separators", 3, 1, 14),
    ],
)
def test_phi_is_injective_on_real_separators(request, separators, m, q, tuples):
    service, seps = request.getfixturevalue(separators)
    report = FeasibleService(service, seps).phi_injectivity_check(m, q)
    assert report.images_distinct
    assert report.tuples_checked == tuples
    assert report.adequate ** q == tuples
    assert report.forbidden <= report.non_forbidden
