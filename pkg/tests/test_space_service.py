from fractions import Fraction

import pytest

from growthlab.exceptions import GermComparisonException, ValidationException
from growthlab.space_service import PARALLEL


def test_tree_distance(f2_space):
    a = f2_space.point((1,))
    b = f2_space.point((2,))
    assert f2_space.dist(a, b) == 2
    assert f2_space.dist(f2_space.base_point, f2_space.point((1, 2, 1))) == 3


def test_translation_length_is_conjugation_invariant(f2_space):
    assert f2_space.translation_length((1,)) == 1
    assert f2_space.translation_length((1, 2)) == 2
    assert f2_space.translation_length((2, 1, -2)) == 1
    assert f2_space.translation_length(()) == 0


def test_classification(f2_space, fp23_space):
    assert f2_space.classify(()).kind == "elliptic"
    assert f2_space.classify((1,)).hyperbolic
    assert fp23_space.classify((1,)).kind == "elliptic"
    st = fp23_space.classify((1, 2))
    assert st.hyperbolic
    assert st.translation_length == 2


def test_point_along_and_segment_distance(f2_space):
    x = f2_space.base_point
    y = f2_space.point((1, 1, 2))
    assert f2_space.point_along(x, y, 2) == f2_space.point((1, 1))
    assert f2_space.distance_to_segment(f2_space.point((1, -2)), x, y) == 1
    with pytest.raises(ValidationException):
        f2_space.point_along(x, y, 4)


def test_joint_displacement_of_standard_basis(f2_space):
    value, x = f2_space.joint_displacement([(1,), (2,)])
    assert value == 1
    assert x == f2_space.base_point


def test_min_displacement_of_elliptic_element(fp23_space):
    L, witness = fp23_space.min_displacement_element((2,))
    assert L == 0
    assert fp23_space.displacement((2,), witness) == 0


def test_commuting_axes_are_parallel(f2_space):
    assert f2_space.axes_overlap((1,), f2_space.axis((1, 1))) is PARALLEL


def test_axes_of_ab_and_ba_meet_in_a_point(f2_space):
    assert f2_space.axes_overlap((1, 2), f2_space.axis((2, 1))) == 0


def test_axis_of_elliptic_element_is_rejected(fp23_space):
    with pytest.raises(ValidationException):
        fp23_space.axis((1,))


def test_germs(f2_space):
    space = f2_space
    x = space.base_point
    forward = space.germ_of(x, space.point((1,) * 20), 1)
    assert forward.endpoint == space.point((1,) * 10)
    backward = space.germ_of(x, space.point((-1,) * 20), 1)
    branch = space.germ_of(x, space.point((1,) * 15 + (2,)), 1)
    assert space.germ_opposite(forward, backward)
    assert not space.germ_equivalent(forward, backward)
    assert space.germ_equivalent(forward, branch)
    assert not space.germ_opposite(forward, branch)


def test_short_germ_is_empty_and_not_comparable(f2_space):
    space = f2_space
    short = space.germ_of(space.base_point, space.point((1,) * 5), 1)
    assert short.empty
    full = space.germ_of(space.base_point, space.point((2,) * 12), 1)
    with pytest.raises(GermComparisonException):
        space.germ_equivalent(short, full)


def test_germs_with_different_origins_are_not_comparable(f2_space):
    space = f2_space
    a = space.germ_of(space.base_point, space.point((1,) * 12), 1)
    b = space.germ_of(space.point((2,)), space.point((2,) * 12), 1)
    with pytest.raises(GermComparisonException):
        space.germ_opposite(a, b)


def test_translate_germ(f2_space):
    space = f2_space
    germ = space.germ_of(space.base_point, space.point((1,) * 12), 1)
    moved = space.translate_germ((2,), germ)
    assert moved.origin == space.point((2,))
    assert moved.endpoint == space.point((2,) + (1,) * 10)


def test_trees_have_zero_four_point_delta(f2_space, fp23_space):
    assert f2_space.four_point_delta(f2_space.orbit_sample(2), 50, 0) == Fraction(0)
    assert fp23_space.four_point_delta(fp23_space.orbit_sample(3), 50, 1) == Fraction(0)


def test_vertex_stabilizer_in_free_product(fp23_space):
    stabilizer = fp23_space.near_stabilizer(fp23_space.base_point, 0)
    assert set(stabilizer) == {(), (1,)}


def test_free_action_has_wpd_constant_one(f2_space):
    assert f2_space.estimate_uniform_wpd_D(epsilon=0, samples=8, radius=2) == 1


def test_neighbors_of_cayley_tree_vertex(f2_space):
    assert len(f2_space.neighbors(f2_space.base_point)) == 4


def test_acylindricity_of_free_action(f2_space):
    result = f2_space.estimate_acylindricity(epsilon=0, R=3, samples=8, radius=2)
    assert (result["N"], result["K"], result["D"]) == (1, 3, 3)


def test_acylindricity_needs_positive_R(f2_space):
    with pytest.raises(ValidationException):
        f2_space.estimate_acylindricity(epsilon=0, R=0)


def test_trivial_edge_stabilizers_give_wpd_constant_one(fp23_space):
    assert fp23_space.estimate_uniform_wpd_D(epsilon=0, samples=8, radius=3, seed=3) == 1
    g = (1, 2)
    x = fp23_space.axis_points(fp23_space.axis(g), 1)[-1]
    assert fp23_space.wpd_count(g, x, 1, 0) == 1
