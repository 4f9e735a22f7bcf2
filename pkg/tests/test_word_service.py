from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from growthlab.exceptions import ValidationException, WordParseException
from growthlab.models import GroupModel, Homomorphism
from growthlab.word_service import (
    commutator,
    conjugate,
    evaluate,
    format_word,
    invert,
    make_generating_set,
    make_homomorphism,
    multiply,
    normalize,
    parse_template,
    parse_word,
    parse_words,
    power,
    power_set_lengths,
    symmetrize,
    word_summary,
)

from word_strategies import free_words

F2 = GroupModel.free_group(2)
FP23 = GroupModel.free_product([2, 3])
BS23 = GroupModel.baumslag_solitar(2, 3, extra_rank=1)


def test_free_reduction(f2):
    assert normalize((1, -1, 2), f2) == (2,)
    assert normalize((1, 2, -2, -1), f2) == ()


def test_finite_cyclic_factors(fp23):
    assert normalize((1, 1), fp23) == ()
    assert normalize((2, 2, 2), fp23) == ()
    assert invert((2,), fp23) == (2, 2)
    assert multiply((1, 2), (2, 2, 1), fp23) == ()


def test_baumslag_solitar_relation(bs231):
    # t a^2 t^-1 = a^3
    assert normalize((2, 1, 1, -2), bs231) == (1, 1, 1)
    assert normalize((-2, 1, 1, 1, 2), bs231) == (1, 1)


def test_baumslag_solitar_britton_reduced_word_is_stable(bs231):
    word = (2, 1, 2, 3)
    assert normalize(word, bs231) == word
    assert normalize(normalize(word, bs231), bs231) == normalize(word, bs231)


@settings(max_examples=200, deadline=None)
@given(free_words(2))
def test_inverse_cancels(word):
    w = normalize(word, F2)
    assert multiply(w, invert(w, F2), F2) == ()


@settings(max_examples=100, deadline=None)
@given(free_words(2, 6), free_words(2, 6), free_words(2, 6))
def test_product_is_associative_in_free_product(u, v, w):
    u, v, w = (normalize(x, FP23) for x in (u, v, w))
    assert multiply(multiply(u, v, FP23), w, FP23) == multiply(u, multiply(v, w, FP23), FP23)


@settings(max_examples=100, deadline=None)
@given(free_words(3, 8), free_words(3, 8))
def test_baumslag_solitar_multiply_matches_normalize(u, v):
    cu, cv = normalize(u, BS23), normalize(v, BS23)
    assert multiply(cu, cv, BS23) == normalize(u + v, BS23)


def test_power_and_conjugate(f2):
    assert power((1,), 5, f2) == (1,) * 5
    assert power((1, 2), -2, f2) == (-2, -1, -2, -1)
    assert conjugate((1,), (2,), f2) == (2, 1, -2)
    assert commutator((1,), (2,), f2) == (1, 2, -1, -2)


def test_parse_and_format(f2):
    assert parse_word("a^3 b", f2) == (1, 1, 1, 2)
    assert parse_word("aB", f2) == (1, -2)
    assert parse_word("1", f2) == ()
    assert format_word((1, 1, 1, 2), f2) == "a^3b"
    assert format_word((), f2) == "1"
    assert parse_words("a, b, ab", f2) == [(1,), (2,), (1, 2)]


def test_parse_error_carries_position(f2):
    with pytest.raises(WordParseException) as info:
        parse_word("ax", f2)
    assert info.value.position == 1
    assert info.value.exit_code == 1
    with pytest.raises(WordParseException) as info:
        parse_words("a,bx", f2)
    assert info.value.position == 3


def test_n_is_rejected_outside_templates(f2):
    with pytest.raises(WordParseException):
        parse_word("a^n", f2)


def test_template_instantiation(f2):
    template = parse_template("A^n b a^n", f2)
    assert template.uses_n
    assert template.instantiate(2) == (-1, -1, 2, 1, 1)
    assert parse_template("a^(2n-1)", f2).instantiate(3) == (1,) * 5


def test_word_summary_shortens_long_words(f2):
    long_word = (1, 2) * 100
    text = word_summary(long_word, f2)
    assert "len=200" in text
    assert word_summary((1, 2), f2) == "ab"


def test_generating_set_drops_identity_and_duplicates(f2):
    S = make_generating_set(f2, [(1,), (1, -1), (1,), (2,)])
    assert S.elements == ((1,), (2,))
    assert symmetrize(S).elements == ((1,), (-1,), (2,), (-2,))


def test_power_set_size(f2_std):
    lengths = power_set_lengths(f2_std, 2)
    assert len(lengths) == 17
    assert lengths[(1, 2)] == 2
    assert lengths[()] == 0


def test_power_set_rejects_bad_power(f2_std):
    with pytest.raises(ValidationException):
        power_set_lengths(f2_std, 0)


def test_homomorphism_evaluation(f2, z):
    h = make_homomorphism(z, [(1,), (1, 1, 1)])
    assert evaluate(h, (1, 2, -1, -2)) == ()
    assert evaluate(h, (2, 2)) == (1,) * 6
    with pytest.raises(ValidationException):
        evaluate(h, (3,))


def test_homomorphism_arity_is_checked(f2):
    with pytest.raises(ValueError):
        Homomorphism(source_arity=2, target=f2, images=((1,),))


# t a^2 t^-1 a^-3
BS_RELATOR = (2, 1, 1, -2, -1, -1, -1)


def _bs_relators(model):
    inverse = invert(BS_RELATOR, model)
    out = [BS_RELATOR, inverse]
    for x in (1, -1, 2, -2, 3, -3):
        out.append((x,) + BS_RELATOR + (-x,))
        out.append((x, -x))
    return out


@settings(max_examples=300, deadline=None)
@given(free_words(3, 8), free_words(3, 8), st.integers(min_value=0, max_value=15))
def test_relator_insertion_keeps_britton_form(u, v, pick):
    relators = _bs_relators(BS23)
    inserted = u + relators[pick % len(relators)] + v
    assert normalize(inserted, BS23) == normalize(u + v, BS23)


# x -> m x + c; a = x + 1, t = 3x/2, z = 2x + 1 is a homomorphism of BS(2,3) * Z
AFFINE = {1: (Fraction(1), Fraction(1)), 2: (Fraction(3, 2), Fraction(0)), 3: (Fraction(2), Fraction(1))}


def _affine(word):
    m, c = Fraction(1), Fraction(0)
    for x in word:
        gm, gc = AFFINE[abs(x)]
        if x < 0:
            gm, gc = 1 / gm, -gc / gm
        m, c = m * gm, m * gc + c
    return m, c


@settings(max_examples=300, deadline=None)
@given(free_words(3, 14))
def test_britton_form_has_the_same_affine_image(word):
    assert _affine(normalize(word, BS23)) == _affine(word)


@settings(max_examples=150, deadline=None)
@given(free_words(2, 8), free_words(2, 8))
def test_evaluate_is_a_homomorphism(u, v):
    u, v = normalize(u, F2), normalize(v, F2)
    for target, images in ((FP23, [(1, 2), (2, 1, 2)]), (BS23, [(1, 2), (2, 3, -2)])):
        h = make_homomorphism(target, images)
        assert evaluate(h, multiply(u, v, F2)) == multiply(evaluate(h, u), evaluate(h, v), target)


def test_baumslag_solitar_is_not_hopfian():
    bs = GroupModel.baumslag_solitar(2, 3)
    phi = make_homomorphism(bs, [(1, 1), (2,)])
    assert evaluate(phi, BS_RELATOR) == ()
    witness = commutator(conjugate((1,), (2,), bs), (1,), bs)
    assert witness == (2, 1, -2, 1, 2, 1, -2, -1, -1, -1, -1)
    assert evaluate(phi, witness) == ()
    # phi is onto: t a^2 t^-1 a^-2 = a
    assert evaluate(phi, (2, 1, -2, -1)) == (1,)
