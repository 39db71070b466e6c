from fractions import Fraction

import pytest

from core import (
    Alphabet,
    AlphabetMismatch,
    FormatError,
    Letter,
    LetterKind,
    NoStrictMaximum,
    Polynomial,
    PolyOp,
    UnknownLetter,
    ZeroPolynomial,
    factor_occurrences,
    leading_monomial,
    poly_arith,
)
from ordering import canonical, length


@pytest.fixture
def ab():
    return Alphabet([Letter("a"), Letter("b")])


def test_alphabet_lookup(ab):
    assert ab.index("b") == 1
    assert ab.index(Letter("a")) == 0
    assert ab.parse_word("abba") == (0, 1, 1, 0)
    assert ab.render_word(()) == "1"


def test_alphabet_rejects_duplicates():
    with pytest.raises(ValueError):
        Alphabet([Letter("a"), Letter("a")])


def test_unknown_letter(ab):
    with pytest.raises(UnknownLetter):
        ab.index("c")
    with pytest.raises(UnknownLetter):
        ab.parse_word("abc")
    with pytest.raises(UnknownLetter):
        ab.check_word((0, 2))


def test_letter_kind_does_not_affect_identity():
    assert Letter("e", (1, 2), LetterKind.MODULE) == Letter("e", (1, 2))


def test_module_positions():
    alphabet = Alphabet([Letter("e", (), LetterKind.MODULE), Letter("a")])
    assert alphabet.module_positions() == frozenset({0})


def test_factor_occurrences():
    assert factor_occurrences((0, 1, 0, 1), (0, 1)) == [((), (0, 1)), ((0, 1), ())]
    with pytest.raises(ValueError):
        factor_occurrences((0,), ())


def test_zero_coefficients_are_dropped(ab):
    p = Polynomial(ab, {(0,): 0, (1,): 2})
    assert p.support() == [(1,)]
    assert (p - p).is_zero()
    assert not Polynomial.zero(ab)


def test_multiplication_concatenates(ab):
    a = Polynomial.letter(ab, "a")
    b = Polynomial.letter(ab, "b")
    p = (a + b) * (a - b)
    assert p == Polynomial.parse(ab, "aa - ab + ba - bb")


def test_scalar_multiplication(ab):
    a = Polynomial.letter(ab, "a")
    assert 3 * a == a.scale(3)
    assert a * Fraction(1, 2) == Polynomial.parse(ab, "1/2*a")


def test_parse_and_render(ab):
    p = Polynomial.parse(ab, "ab - 3/5*b + 1")
    assert p.coefficient((0, 1)) == 1
    assert p.coefficient((1,)) == Fraction(-3, 5)
    assert p.coefficient(()) == 1
    assert p.render() == "ab - 3/5*b + 1"
    assert Polynomial.parse(ab, "-a").render() == "-a"
    assert Polynomial.zero(ab).render() == "0"


def test_parse_failure_is_format_error(ab):
    with pytest.raises(FormatError):
        Polynomial.parse(ab, "a + + b")


def test_alphabet_mismatch(ab):
    other = Alphabet([Letter("x")])
    with pytest.raises(AlphabetMismatch):
        Polynomial.letter(ab, "a") + Polynomial.letter(other, "x")


def test_substitute(ab):
    p = Polynomial.parse(ab, "aba")
    image = Polynomial.parse(ab, "b + 1")
    assert p.substitute({0: image}) == Polynomial.parse(ab, "bbb + bb + bb + b")


def test_poly_arith(ab):
    a = Polynomial.letter(ab, "a")
    b = Polynomial.letter(ab, "b")
    assert poly_arith(a, b, PolyOp.ADD) == a + b
    assert poly_arith(a, b, PolyOp.MUL) == a * b
    assert poly_arith(a, None, PolyOp.SCALE, 2) == a.scale(2)
    with pytest.raises(ValueError):
        poly_arith(a, b, "pow")


def test_leading_monomial(ab):
    p = Polynomial.parse(ab, "b + ab - ba")
    assert leading_monomial(p, canonical(ab)) == (0, 1)


def test_leading_monomial_errors(ab):
    with pytest.raises(ZeroPolynomial):
        leading_monomial(Polynomial.zero(ab), canonical(ab))
    with pytest.raises(NoStrictMaximum):
        leading_monomial(Polynomial.parse(ab, "ab - ba"), length(ab))
