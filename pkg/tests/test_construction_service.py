from fractions import Fraction

import pytest

from growthlab.exceptions import ConstructionException, InvariantViolation
from growthlab.models import ActionConstants
from growthlab.services.construction_service import ConstructionService, reduced_words
from growthlab.services.growth_service import enumerate_balls, growth_estimate
from growthlab.services.spectrum_service import SpectrumService
from growthlab.word_service import make_generating_set, parse_words


@pytest.fixture
def f2_constructions(f2_space, constants):
    return ConstructionService(f2_space, constants)


@pytest.fixture
def fp23_constructions(fp23_space, constants):
    return ConstructionService(fp23_space, constants)


def test_reduced_words_depth_first():
    assert list(reduced_words(1, 3)) == [(1,), (1, 1), (1, 1, 1), (-1,), (-1, -1), (-1, -1, -1)]
    words = list(reduced_words(2, 2))
    assert len(words) == 16
    assert words[:4] == [(1,), (1, 1), (1, 2), (1, -2)]


def test_find_hyperbolic_in_free_group(f2_constructions, f2_std):
    candidate = f2_constructions.find_hyperbolic_in_power(f2_std)
    assert candidate.word == (1,)
    assert candidate.s_length == 1


def test_find_hyperbolic_needs_the_square_in_free_product(fp23_constructions, fp23_std):
    candidate = fp23_constructions.find_hyperbolic_in_power(fp23_std)
    assert candidate.word == (1, 2)
    assert candidate.s_length == 2


def test_find_hyperbolic_fails_on_finite_subgroup(fp23_constructions, fp23):
    with pytest.raises(ConstructionException) as info:
        fp23_constructions.find_hyperbolic_in_power(make_generating_set(fp23, [(1,)]))
    assert info.value.exit_code == 2


def test_large_displacement_in_free_group(f2_constructions, f2_std):
    witness = f2_constructions.large_displacement_element(f2_std)
    assert witness.g == "a"
    assert witness.L_S == 1
    assert witness.displacement == 1
    assert witness.L_g == 1
    assert witness.power == 1


def test_large_displacement_in_free_product(fp23_constructions, fp23_std):
    witness, g, x = fp23_constructions.displacement_search(fp23_std)
    assert g == (1, 2)
    assert witness.g == "st"
    assert witness.L_S == 2
    assert witness.displacement == 2
    assert witness.power == 2


def test_common_fixed_point_is_rejected(fp23_constructions, fp23):
    with pytest.raises(ConstructionException):
        fp23_constructions.large_displacement_element(make_generating_set(fp23, [(2,)]))


def test_non_elementary_conjugator(f2_constructions, f2_std, f2):
    assert f2_constructions.non_elementary_conjugator(f2_std, (1,)) == (2,)
    cyclic = make_generating_set(f2, parse_words("a, a^3", f2))
    with pytest.raises(ConstructionException):
        f2_constructions.non_elementary_conjugator(cyclic, (1,))


def test_free_pair_in_free_group(f2_constructions, f2_std):
    pair = f2_constructions.build_free_pair(f2_std, depth=4)
    assert pair.w1 == (1,) * 60
    assert pair.w2 == (2,) + (1,) * 60 + (-2,)
    assert pair.s == (2,)
    assert pair.certificate.passed
    assert pair.certificate.words_checked == 4 * (1 + 3 + 9 + 27)
    assert pair.certificate.min_translation_length == 60


def test_ping_pong_finds_relations(f2_constructions):
    with pytest.raises(ConstructionException):
        f2_constructions.ping_pong([(1,), (1, 1)], 3)


def test_primitive_element(f2_constructions, f2_std, f2_space):
    pair, prim = f2_constructions.primitive_pipeline(f2_std, depth=4)
    assert prim.s_length == 484
    assert prim.report.u_length == 484
    assert f2_space.translation_length(prim.u) == 484
    assert prim.report.s_length_bound == 844
    assert all(prim.report.checks.values())
    assert prim.fixer == [()]
    assert f2_constructions.primitivity_desk_check(prim.u) is None


def test_proper_power_is_not_primitive(f2_constructions):
    assert f2_constructions.primitivity_desk_check((1, 2, 1, 2)) == (1, 2)


def test_lower_bound_audit(f2_constructions, f2_std):
    estimate = growth_estimate(enumerate_balls(f2_std, 6))
    cert = f2_constructions.lower_bound_audit(f2_std, estimate, depth=3)
    assert cert.W == ["a", "b"]
    assert cert.basis_lengths == [19282, 19282]
    assert cert.actual_power == 19282
    assert cert.power_bound == 33762
    assert cert.implied_bound == pytest.approx(2 ** (1 / 33762))
    assert cert.certified_lower == pytest.approx(2 ** (1 / 19282))
    assert cert.A_bound <= cert.implied_bound
    assert cert.passed


def test_lambda_lower_bound_scales_with_delta(f2_space):
    loose = ConstructionService(f2_space, ActionConstants(delta=Fraction(1), D=1, M=2))
    with pytest.raises(InvariantViolation):
        loose.check_lambda_lower_bound((1,))
    loose.check_lambda_lower_bound((1,) * 50)
    loose.check_lambda_lower_bound((), lam=0)


def test_axis_fixer_is_trivial_for_free_action(f2_constructions, f2_space):
    assert f2_constructions.axis_fixer(f2_space.axis((1, 2))) == [()]


def test_find_hyperbolic_rejects_elementary_subgroup(f2_constructions, f2):
    for words in ("a", "a, a^3", "ab, BA"):
        with pytest.raises(ConstructionException) as info:
            f2_constructions.find_hyperbolic_in_power(make_generating_set(f2, parse_words(words, f2)))
        assert info.value.stage == "find-hyperbolic"


def test_free_pair_at_depth_eight(f2_constructions, f2_std):
    pair = f2_constructions.build_free_pair(f2_std, depth=8)
    assert pair.certificate.passed
    assert pair.certificate.depth == 8
    assert pair.certificate.words_checked == 4 * sum(3 ** i for i in range(8))
    assert pair.certificate.min_translation_length == 60


def test_free_pair_in_free_product(fp23_constructions, fp23_std, fp23_space):
    pair = fp23_constructions.build_free_pair(fp23_std, depth=8)
    assert pair.g == (1, 2)
    assert pair.certificate.passed
    assert pair.certificate.min_translation_length >= 20
    assert fp23_space.translation_length(pair.w1) > 0
    assert fp23_space.translation_length(pair.w2) > 0


def test_primitive_element_in_free_product(fp23_constructions, fp23_std, fp23_space):
    pair, prim = fp23_constructions.primitive_pipeline(fp23_std, depth=4)
    assert all(prim.report.checks.values())
    assert fp23_space.translation_length(prim.u) >= 20
    assert prim.s_length <= prim.report.s_length_bound


def test_large_displacement_over_two_hundred_free_group_sets(f2_constructions, f2, f2_space):
    keys, _ = SpectrumService(f2, depth=2).candidate_sets(3, 3)
    keys = keys[:200]
    assert len(keys) == 200
    for key in keys:
        S = make_generating_set(f2, key)
        witness, g, x = f2_constructions.displacement_search(S)
        assert witness.displacement >= witness.L_S
        assert witness.L_g >= witness.displacement
        assert f2_space.translation_length(g) == witness.L_g
        assert f2_space.displacement(g, x) == witness.displacement
        assert f2_space.distance_to_axis(f2_space.axis(g), x) == 0
