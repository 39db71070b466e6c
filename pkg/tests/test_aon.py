import pytest

from aon import (
    AlgebraTerms,
    aon_alphabet,
    aon_relations,
    aon_rules,
    aon_verify,
    basis_words,
    idempotents,
    membership_failures,
    orientation_failures,
    triple_identity_holds,
)
from core import Polynomial
from rewrite import exhaustive_normal_forms, ideal_member, nf


def test_alphabet_is_row_major_greatest_first():
    alphabet = aon_alphabet(2)
    assert [letter.token for letter in alphabet] == ["a[1,1]", "a[1,2]", "a[2,1]", "a[2,2]"]


def test_alphabet_needs_positive_n():
    with pytest.raises(ValueError):
        aon_alphabet(0)


def test_rule_counts():
    assert len(aon_rules(1)) == 2
    assert len(aon_rules(2)) == 2 * 4 + 2 * 8
    assert len(aon_rules(3)) == 2 * 9 + 2 * 27


def test_rule_tags_and_shapes():
    system = aon_rules(2)
    tags = system.tags()
    z = system.rules[tags["Z~[2,1]"]]
    assert system.alphabet.render_word(z.lhs) == "a[2,1]a[1,1]"
    assert z.rhs == Polynomial.parse(system.alphabet, "-a[2,2]a[1,2]")
    triple = system.rules[tags["S~[1,2,2]"]]
    assert system.alphabet.render_word(triple.lhs) == "a[1,1]a[2,2]a[2,2]"


def test_relations_lie_in_the_ideal():
    system = aon_rules(2)
    for relation in aon_relations(2, system.alphabet):
        assert ideal_member(relation, system)


def test_memberships_and_orientations():
    system = aon_rules(3)
    assert membership_failures(3, system) == []
    assert orientation_failures(3, system) == []


@pytest.mark.parametrize("n", [1, 2])
def test_aon_is_complete(n):
    report = aon_verify(n)
    assert report.complete
    assert report.overlaps.overlaps_total > 0


def test_triple_identities():
    system = aon_rules(3)
    for p, q, r in [(1, 1, 1), (1, 2, 3), (3, 2, 1), (2, 3, 3)]:
        assert triple_identity_holds(3, p, q, r, system)


def test_orthogonality_in_normal_form():
    # sum_p a[i,p] a[j,p] reduces to delta_ij
    system = aon_rules(3)
    terms = AlgebraTerms(3, system.alphabet)
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            assert nf(terms.row(i, j), system).is_zero()
            assert nf(terms.column(i, j), system).is_zero()


def test_idempotents_for_n_equal_one():
    system = aon_rules(1)
    e1, e2 = idempotents(system)
    assert nf(e1 * e1 - e1, system).is_zero()
    assert nf(e2 * e2 - e2, system).is_zero()
    assert nf(e1 * e2, system).is_zero()
    assert e1 + e2 == Polynomial.one(system.alphabet)


def test_idempotents_need_one_letter():
    with pytest.raises(ValueError):
        idempotents(aon_rules(2))


def test_basis_counts_for_n_two():
    levels = basis_words(2, 3)
    assert [len(level) for level in levels] == [1, 4, 9, 16]


def test_basis_words_are_irreducible():
    system = aon_rules(2)
    for level in basis_words(2, 4, system):
        for word in level:
            assert system.is_irreducible(word)


def test_every_redex_choice_reaches_one_normal_form():
    system = aon_rules(2)
    p = Polynomial.parse(system.alphabet, "a[1,1]a[2,2]a[1,1]a[1,1]a[2,1]a[2,1]")
    assert exhaustive_normal_forms(p, system, limit=50_000) == {nf(p, system)}
