from fractions import Fraction

import pytest

from tokens import (
    canonical_token,
    format_rational,
    parse_letter_token,
    parse_rational,
    split_terms,
    split_word,
)


def test_letter_token_with_indices():
    assert parse_letter_token("a[1,2]") == ("a", (1, 2))
    assert parse_letter_token(" e[ 3 , 1 ] ") == ("e", (3, 1))


def test_letter_token_without_indices():
    assert parse_letter_token("x") == ("x", ())
    assert parse_letter_token("K~'") == ("K~'", ())


def test_bad_letter_token_raises():
    with pytest.raises(ValueError):
        parse_letter_token("[1,2]")


def test_canonical_token_normalizes_spacing():
    assert canonical_token(" a[ 1, 2 ]") == "a[1,2]"


def test_split_word_longest_match():
    known = {"a", "ab", "b"}
    assert split_word("abab", known) == ["ab", "ab"]
    assert split_word("a b a", known) == ["a", "b", "a"]


def test_split_word_indexed_letters_need_no_separator():
    known = {"a[1,1]", "a[2,1]"}
    assert split_word("a[1,1]a[2,1]", known) == ["a[1,1]", "a[2,1]"]
    assert split_word("a[1,1] * a[2,1]", known) == ["a[1,1]", "a[2,1]"]


def test_split_word_empty_word():
    assert split_word("1", {"a"}) == []
    assert split_word("  ", {"a"}) == []


def test_split_word_unknown_letter():
    with pytest.raises(ValueError):
        split_word("ac", {"a", "b"})


def test_parse_rational():
    assert parse_rational("3/5") == Fraction(3, 5)
    assert parse_rational("-4") == Fraction(-4)
    assert parse_rational("6/4") == Fraction(3, 2)
    assert parse_rational(2) == Fraction(2)


def test_parse_rational_rejects_garbage_and_zero_denominator():
    with pytest.raises(ValueError):
        parse_rational("1.5")
    with pytest.raises(ValueError):
        parse_rational("1/0")


def test_format_rational():
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-3, 5)) == "-3/5"


def test_split_terms():
    assert split_terms("a[1,1]a[2,1] - 3/5*a[1,2] + 1") == [
        (Fraction(1), "a[1,1]a[2,1]"),
        (Fraction(-3, 5), "a[1,2]"),
        (Fraction(1), ""),
    ]


def test_split_terms_zero_and_empty():
    assert split_terms("0") == []
    assert split_terms("") == []


def test_separators_split_ambiguous_letters():
    known = {"a", "ab", "b"}
    assert split_word("a*b a", known) == ["a", "b", "a"]
    assert split_word("ab·a", known) == ["ab", "a"]


def test_split_word_spacing_inside_indices():
    assert split_word("a[ 1, 1 ] a[2 ,1]", {"a[1,1]", "a[2,1]"}) == ["a[1,1]", "a[2,1]"]


def test_split_terms_keeps_negative_indices():
    assert split_terms("x[-1,2]x[1,-2] - 2*x[-1,-1] + 1") == [
        (Fraction(1), "x[-1,2]x[1,-2]"),
        (Fraction(-2), "x[-1,-1]"),
        (Fraction(1), ""),
    ]


def test_split_terms_rejects_unclosed_index():
    with pytest.raises(ValueError):
        split_terms("a[1,2 - b")
