import pytest

from growthlab.exceptions import ValidationException
from growthlab.services.spectrum_service import (
    SpectrumService,
    canonical_key,
    elementary_automorphisms,
    generates,
    inverse_representative,
    set_key,
)
from growthlab.word_service import evaluate


def test_inverse_representative(f2):
    assert inverse_representative((-1,), f2) == (1,)
    assert inverse_representative((-2, -1), f2) == (1, 2)


def test_set_key_drops_identity_and_inverses(f2):
    assert set_key([(2,), (-1,), (1,), ()], f2) == ((1,), (2,))


def test_elementary_automorphisms_fix_growth(f2):
    moves = elementary_automorphisms(f2)
    assert moves
    for h in moves:
        images = set_key([evaluate(h, (1,)), evaluate(h, (2,))], f2)
        assert generates(images, f2)


def test_free_product_moves_swap_equal_orders(fp23):
    moves = elementary_automorphisms(fp23)
    # 순환 인자는 교환 불가(차수가 다름), 역원 2개 + 부분 켤레 4개
    assert len(moves) == 6


def test_canonical_key_reduces_by_transvection(f2):
    moves = elementary_automorphisms(f2)
    assert canonical_key(((1, 2), (2,)), f2, moves) == ((1,), (2,))
    assert canonical_key(((2,),), f2, moves) == ((1,),)


def test_generation_witness(f2):
    assert generates(((1,), (1, 2)), f2)
    assert not generates(((1, 1), (2,)), f2)


def test_candidate_sets(f2):
    service = SpectrumService(f2, depth=3)
    keys, truncated = service.candidate_sets(2, 1)
    assert keys == [((1,),), ((2,),), ((1,), (2,))]
    assert not truncated
    capped = SpectrumService(f2, depth=3, candidate_cap=2)
    keys, truncated = capped.candidate_sets(2, 1)
    assert len(keys) == 2
    assert truncated


def test_depth_and_bounds_are_validated(f2):
    with pytest.raises(ValidationException):
        SpectrumService(f2, depth=1)
    with pytest.raises(ValidationException):
        SpectrumService(f2, depth=3).candidate_sets(0, 1)


def test_xi_scan_of_free_group(f2):
    table = SpectrumService(f2, depth=4).xi_scan(2, 2)
    assert table.rows
    first = table.rows[0]
    assert first.minimum
    assert first.class_id == 1
    assert first.point_estimate == pytest.approx(3.0)
    assert all(row.certified_upper >= 3.0 - 1e-9 for row in table.rows)
    assert table.excluded >= 8


def test_xi_scan_with_three_elements_has_faster_rows(f2):
    table = SpectrumService(f2, depth=4).xi_scan(3, 1)
    assert [row.size for row in table.rows] == [2]
    table = SpectrumService(f2, depth=4).xi_scan(3, 2)
    assert max(row.point_estimate for row in table.rows) > 3.0


def test_theta_scan_drops_cyclic_subgroups(f2):
    table = SpectrumService(f2, depth=4).theta_scan(1, 1)
    assert table.rows == []
    assert table.excluded >= 1


def test_theta_scan_merges_free_subgroups(f2):
    table = SpectrumService(f2, depth=4).theta_scan(2, 2)
    assert table.rows[0].point_estimate == pytest.approx(3.0)
    assert all(row.size == 2 for row in table.rows)
    assert any(row.merged for row in table.rows)


def test_theta_scan_hyperbolic_filter(fp23):
    table = SpectrumService(fp23, depth=6).theta_scan(2, 1, require_hyperbolic=True)
    assert [row.size for row in table.rows] == [2]
    assert table.rows[0].point_estimate == pytest.approx(2 ** 0.5)


def test_shards_do_not_change_rows(f2):
    one = SpectrumService(f2, depth=3, shards=1).xi_scan(2, 2)
    three = SpectrumService(f2, depth=3, shards=3).xi_scan(2, 2)
    assert one.rows == three.rows
