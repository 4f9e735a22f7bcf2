import math

import pytest

from growthlab.exceptions import ValidationException
from growthlab.services.automaton_service import cone_automaton, geodesic_tree, sphere_counts, spectral_radius, transition_matrix
from growthlab.services.growth_service import enumerate_balls
from growthlab.word_service import make_generating_set


def test_free_group_cone_types(f2_std):
    automaton = cone_automaton(f2_std, 2, validate_depth=6)
    assert automaton.states == 4
    assert sorted(len(t) for t in automaton.transitions) == [3, 3, 3, 3]
    assert len(automaton.start_successors) == 4
    assert not automaton.certified
    assert spectral_radius(automaton) == pytest.approx(3.0, abs=1e-6)


def test_free_product_cone_types(fp23_std):
    automaton = cone_automaton(fp23_std, 2, validate_depth=10)
    assert automaton.states == 2
    assert spectral_radius(automaton) == pytest.approx(math.sqrt(2), abs=1e-6)


def test_infinite_cyclic_group_has_radius_one(z):
    automaton = cone_automaton(make_generating_set(z, [(1,)]), 2, validate_depth=6)
    assert spectral_radius(automaton) == pytest.approx(1.0, abs=1e-6)


def test_path_counts_match_breadth_first_search(fp23_std):
    automaton = cone_automaton(fp23_std, 2, validate_depth=8)
    assert sphere_counts(automaton, 8) == enumerate_balls(fp23_std, 8).sphere


def test_transition_matrix_row_sums(f2_std):
    automaton = cone_automaton(f2_std, 2, validate_depth=6)
    matrix = transition_matrix(automaton)
    assert matrix.shape == (4, 4)
    assert list(matrix.sum(axis=1).A1) == [3.0, 3.0, 3.0, 3.0]


def test_geodesic_tree_levels(f2_std):
    levels, children = geodesic_tree(f2_std, 3)
    assert [len(level) for level in levels] == [1, 4, 12, 36]
    assert len(children[()]) == 4


def test_cutoff_must_be_at_least_two(f2_std):
    with pytest.raises(ValidationException):
        cone_automaton(f2_std, 1)
