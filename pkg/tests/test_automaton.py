from itertools import product

import pytest

from aon import aon_rules, basis_words
from automaton import (
    accepted_words,
    build_dfa,
    count_words,
    is_irreducible,
    languages_agree,
    minimize,
    to_dot,
    transfer_matrix,
)
from core import Alphabet, Letter, UnknownLetter


@pytest.fixture
def ab():
    return Alphabet([Letter("a"), Letter("b")])


def contains_factor(word, forbidden):
    return any(word[i:i + len(f)] == f for f in forbidden for i in range(len(word) - len(f) + 1))


def test_no_forbidden_words_accepts_everything(ab):
    dfa = build_dfa([], ab)
    assert count_words(dfa, 5) == 32
    assert is_irreducible(dfa, ab.parse_word("abba"))


def test_forbidding_bb_gives_fibonacci_counts(ab):
    dfa = build_dfa([ab.parse_word("bb")], ab)
    assert [count_words(dfa, k) for k in range(7)] == [1, 2, 3, 5, 8, 13, 21]


def test_acceptance_matches_factor_scan(ab):
    forbidden = [ab.parse_word(t) for t in ("aba", "bb", "baa")]
    dfa = build_dfa(forbidden, ab)
    for length in range(7):
        for word in product(range(2), repeat=length):
            assert is_irreducible(dfa, word) == (not contains_factor(word, forbidden))


def test_suffix_links_catch_inner_factors(ab):
    # "b" inside "abab" must kill the run even though the trie path is "ab..."
    dfa = build_dfa([ab.parse_word("aab"), ab.parse_word("b")], ab)
    assert not is_irreducible(dfa, ab.parse_word("ab"))
    assert is_irreducible(dfa, ab.parse_word("aaa"))


def test_empty_forbidden_word_rejected(ab):
    with pytest.raises(ValueError):
        build_dfa([()], ab)


def test_unknown_letter_in_forbidden_word(ab):
    with pytest.raises(UnknownLetter):
        build_dfa([(0, 5)], ab)


def test_negative_length_rejected(ab):
    with pytest.raises(ValueError):
        count_words(build_dfa([], ab), -1)


def test_transfer_matrix_drops_dead_state(ab):
    dfa = build_dfa([ab.parse_word("bb")], ab)
    matrix = transfer_matrix(dfa)
    assert len(matrix) == dfa.states - 1
    assert sum(map(sum, matrix)) == 3


def test_counts_match_aon_basis():
    system = aon_rules(2)
    dfa = build_dfa([rule.lhs for rule in system.rules], system.alphabet)
    levels = basis_words(2, 4, system)
    for length, level in enumerate(levels):
        assert count_words(dfa, length) == len(level)
        assert set(accepted_words(dfa, length)) == set(level)


def test_minimize_preserves_language(ab):
    # "bab" contains "ab", so only "ab" matters: one live state per last letter being a or not
    dfa = build_dfa([ab.parse_word("ab"), ab.parse_word("bab")], ab)
    small = minimize(dfa)
    assert small.states == 3 < dfa.states
    assert languages_agree(dfa, small, 6)


def test_languages_differ(ab):
    assert not languages_agree(build_dfa([ab.parse_word("bb")], ab), build_dfa([ab.parse_word("aa")], ab), 3)


def test_dot_export(ab):
    dot = to_dot(build_dfa([ab.parse_word("bb")], ab))
    assert dot.startswith("digraph factor_automaton {")
    assert 'label="reducible"' in dot
