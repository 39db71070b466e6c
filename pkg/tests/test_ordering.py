import random

import pytest

from core import Alphabet, Letter, LetterKind
from ordering import (
    CompareResult,
    Variant,
    canonical,
    combined,
    is_strictly_decreasing,
    kbweight,
    length,
    lex,
    protolex,
    shape,
    syllable,
)

LESS, GREATER, EQUIVALENT, INCOMPARABLE = (
    CompareResult.LESS,
    CompareResult.GREATER,
    CompareResult.EQUIVALENT,
    CompareResult.INCOMPARABLE,
)


@pytest.fixture
def ab():
    return Alphabet([Letter("a"), Letter("b")])


def w(alphabet, text):
    return alphabet.parse_word(text)


def test_canonical_is_length_then_first_difference(ab):
    order = canonical(ab)
    assert order.compare(w(ab, "b"), w(ab, "aa")) == LESS
    assert order.compare(w(ab, "ab"), w(ab, "ba")) == GREATER
    assert order.compare(w(ab, "ab"), w(ab, "ab")) == EQUIVALENT


def test_protolex_only_compares_equal_lengths(ab):
    order = protolex(ab)
    assert order.compare(w(ab, "a"), w(ab, "ab")) == INCOMPARABLE
    assert order.compare(w(ab, "ba"), w(ab, "bb")) == GREATER


def test_lex_has_infinite_descent(ab):
    # a > ba > bba > ...
    order = lex(ab)
    assert order.compare(w(ab, "a"), w(ab, "ba")) == GREATER
    assert order.compare(w(ab, "ba"), w(ab, "bba")) == GREATER
    assert not order.noetherian
    assert not order.certified


def test_length_ties_equal_lengths(ab):
    assert length(ab).compare(w(ab, "ab"), w(ab, "ba")) == EQUIVALENT


def test_kbweight_by_mapping_with_default(ab):
    order = kbweight(ab, {"b": 3})
    assert order.weights == (1, 3)
    assert order.compare(w(ab, "aa"), w(ab, "b")) == LESS


def test_kbweight_rejects_nonpositive_weights(ab):
    with pytest.raises(ValueError):
        kbweight(ab, [1, 0])


def test_combined_breaks_ties_left_to_right(ab):
    order = combined(length(ab), canonical(ab))
    assert order.variant == Variant.COMBINED
    assert order.compare(w(ab, "ab"), w(ab, "ba")) == GREATER
    assert order.certified


def test_syllable_compares_separator_projection_first():
    alphabet = Alphabet([Letter("e", (), LetterKind.MODULE), Letter("a"), Letter("b")])
    order = syllable(alphabet, ["e"])
    # same projection, more letters before the separator wins on the first syllable
    assert order.compare(w(alphabet, "aaeb"), w(alphabet, "aeab")) == GREATER
    # the separator count dominates any algebra letters
    assert order.compare(w(alphabet, "ee"), w(alphabet, "aaaae")) == GREATER
    assert order.syllables(w(alphabet, "aeb")) == [(1,), (2,)]


def test_shape_uses_syllable_lengths_only():
    alphabet = Alphabet([Letter("e", (), LetterKind.MODULE), Letter("a"), Letter("b")])
    order = shape(alphabet, ["e"])
    assert order.compare(w(alphabet, "aeb"), w(alphabet, "bea")) == EQUIVALENT
    assert order.compare(w(alphabet, "aaeb"), w(alphabet, "aebb")) == GREATER


def test_syllable_needs_separators(ab):
    with pytest.raises(ValueError):
        syllable(ab, [])


def test_sort_key_extends_the_ordering(ab):
    order = canonical(ab)
    words = [w(ab, t) for t in ("1", "a", "b", "aa", "ab", "ba", "bb", "aab")]
    for x in words:
        for y in words:
            if order.compare(x, y) == LESS:
                assert order.sort_key(x) < order.sort_key(y)


def test_is_strictly_decreasing(ab):
    order = canonical(ab)
    assert is_strictly_decreasing(w(ab, "ab"), [w(ab, "ba"), ()], order)
    assert not is_strictly_decreasing(w(ab, "ba"), [w(ab, "ab")], order)


def test_describe():
    alphabet = Alphabet([Letter("e", (), LetterKind.MODULE), Letter("a")])
    assert syllable(alphabet, ["e"]).describe() == "syllable[e]"
    assert combined(canonical(alphabet), length(alphabet)).describe() == "combined(canonical, length)"


# ---------------------------------------------------------------------------
# Order properties on seeded random words
# ---------------------------------------------------------------------------

@pytest.fixture
def eab():
    return Alphabet([Letter("e", (), LetterKind.MODULE), Letter("a"), Letter("b")])


def random_word(rng, alphabet, max_len=5):
    return tuple(rng.randrange(len(alphabet)) for _ in range(rng.randint(0, max_len)))


def multiplicative_orderings(alphabet):
    return [
        protolex(alphabet),
        length(alphabet),
        kbweight(alphabet, [2, 1, 3]),
        canonical(alphabet),
        syllable(alphabet, ["e"]),
        shape(alphabet, ["e"]),
        combined(kbweight(alphabet, [2, 1, 3]), shape(alphabet, ["e"]), syllable(alphabet, ["e"])),
    ]


def test_comparisons_survive_prefix_and_suffix(eab):
    rng = random.Random(7)
    for order in multiplicative_orderings(eab):
        assert order.multiplicative
        for _ in range(300):
            x, y = random_word(rng, eab), random_word(rng, eab)
            p, s = random_word(rng, eab, 3), random_word(rng, eab, 3)
            result = order.compare(x, y)
            if result == INCOMPARABLE:
                continue
            assert order.compare(p + x, p + y) == result, order.describe()
            assert order.compare(x + s, y + s) == result, order.describe()


def test_lex_is_not_multiplicative(ab):
    order = lex(ab)
    assert order.compare(w(ab, "a"), w(ab, "ab")) == LESS
    assert order.compare(w(ab, "aa"), w(ab, "aba")) == GREATER
    assert not order.multiplicative


def test_combined_is_transitive(eab):
    rng = random.Random(11)
    order = combined(kbweight(eab, [2, 1, 3]), shape(eab, ["e"]), syllable(eab, ["e"]))
    at_most = (LESS, EQUIVALENT)
    for _ in range(2000):
        x, y, z = (random_word(rng, eab, 4) for _ in range(3))
        first, second = order.compare(x, y), order.compare(y, z)
        if first in at_most and second in at_most:
            expected = EQUIVALENT if first == second == EQUIVALENT else LESS
            assert order.compare(x, z) == expected


def test_canonical_is_never_incomparable(eab):
    rng = random.Random(13)
    order = canonical(eab)
    for _ in range(1000):
        x, y = random_word(rng, eab, 6), random_word(rng, eab, 6)
        assert order.compare(x, y) != INCOMPARABLE
        assert (order.compare(x, y) == EQUIVALENT) == (x == y)


@pytest.mark.parametrize("make", [
    canonical,
    lambda alphabet: syllable(alphabet, ["e"]),
    lambda alphabet: kbweight(alphabet, [2, 1, 3]),
])
def test_random_descent_stops(eab, make):
    rng = random.Random(17)
    order = make(eab)
    # words of length at most 6 over three letters
    bound = sum(3 ** k for k in range(7))
    for _ in range(20):
        chain = [random_word(rng, eab, 6)]
        while len(chain) <= bound:
            smaller = [c for c in (random_word(rng, eab, 6) for _ in range(40)) if order.compare(c, chain[-1]) == LESS]
            if not smaller:
                break
            chain.append(min(smaller, key=order.sort_key))
        assert len(chain) <= bound
        for bigger, smaller_word in zip(chain, chain[1:]):
            assert order.compare(bigger, smaller_word) == GREATER
        assert len(chain) == 1 or order.compare(chain[0], chain[-1]) == GREATER


# ---------------------------------------------------------------------------
# Worked comparisons over a1 < a2 < a3 and separators b1 < b2
# ---------------------------------------------------------------------------

@pytest.fixture
def indexed():
    module = LetterKind.MODULE
    return Alphabet([
        Letter("b2", (), module), Letter("b1", (), module), Letter("a3"), Letter("a2"), Letter("a1"),
    ])


def test_canonical_examples(indexed):
    order = canonical(indexed)
    assert order.compare(w(indexed, "a3"), w(indexed, "a1a2")) == LESS
    assert order.compare(w(indexed, "a1a2"), w(indexed, "a3a1")) == LESS


def test_syllable_examples(indexed):
    order = syllable(indexed, ["b1", "b2"])
    assert order.compare(w(indexed, "a3b1a3"), w(indexed, "a1b2a1a2")) == LESS
    assert order.compare(w(indexed, "a3a2a3"), w(indexed, "b1")) == LESS
    assert order.compare(w(indexed, "a2b1a3a2"), w(indexed, "a1a3b1")) == LESS
    assert order.compare(w(indexed, "a1a3b1"), w(indexed, "a2b1a3a2")) == GREATER
    for text in ("a3b1a3", "b1", "a2b1a3a2"):
        assert order.compare(w(indexed, text), w(indexed, text)) == EQUIVALENT
