"""Letters, words and polynomials of the free algebra over the rationals.

A word is a tuple of alphabet positions. Position 0 is the GREATEST letter,
so comparing letters is comparing positions in reverse.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping

from tokens import canonical_token, format_letter_token, split_terms, split_word, format_rational

logger = logging.getLogger(__name__)

Word = tuple[int, ...]
EMPTY: Word = ()


# ---------------------------------------------------------------------------
# Errors
# ---------------------------------------------------------------------------

class NcrwError(Exception):
    """Root of every error raised by this package."""


class AlphabetMismatch(NcrwError):
    pass


class UnknownLetter(NcrwError):
    pass


class ZeroPolynomial(NcrwError):
    pass


class NoStrictMaximum(NcrwError):
    """The support has no unique greatest word under the ordering."""

    def __init__(self, candidates: Iterable[Word], rendered: str = ""):
        self.candidates = tuple(candidates)
        super().__init__(f"no strict maximum among {rendered or self.candidates}")


class FormatError(NcrwError):
    """Malformed input file or text."""


# ---------------------------------------------------------------------------
# Letters and alphabets
# ---------------------------------------------------------------------------

class LetterKind:
    ALGEBRA = "algebra"
    MODULE = "module"


@dataclass(frozen=True)
class Letter:
    name: str
    indices: tuple[int, ...] = ()
    kind: str = field(default=LetterKind.ALGEBRA, compare=False)

    @property
    def token(self) -> str:
        return format_letter_token(self.name, self.indices)

    def __str__(self) -> str:
        return self.token


class Alphabet:
    """A finite, totally ordered set of letters, listed greatest first."""

    def __init__(self, letters: Iterable[Letter]):
        self.letters: tuple[Letter, ...] = tuple(letters)
        self._index: dict[Letter, int] = {}
        self._by_token: dict[str, int] = {}
        for pos, letter in enumerate(self.letters):
            if letter in self._index:
                raise ValueError(f"duplicate letter {letter.token}")
            self._index[letter] = pos
            self._by_token[letter.token] = pos

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __getitem__(self, pos: int) -> Letter:
        return self.letters[pos]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Alphabet) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(self.letters)

    def __repr__(self) -> str:
        return f"Alphabet({', '.join(l.token for l in self.letters)})"

    def __contains__(self, letter: object) -> bool:
        return letter in self._index

    def index(self, letter: Letter | str) -> int:
        if isinstance(letter, str):
            try:
                return self._by_token[canonical_token(letter)]
            except (KeyError, ValueError):
                raise UnknownLetter(f"unknown letter {letter!r}") from None
        try:
            return self._index[letter]
        except KeyError:
            raise UnknownLetter(f"unknown letter {letter.token}") from None

    def word(self, letters: Iterable[Letter | str]) -> Word:
        return tuple(self.index(l) for l in letters)

    def parse_word(self, text: str) -> Word:
        try:
            tokens = split_word(text, set(self._by_token))
        except ValueError as exc:
            raise UnknownLetter(str(exc)) from None
        return tuple(self._by_token[t] for t in tokens)

    def check_word(self, word: Word) -> Word:
        for pos in word:
            if not 0 <= pos < len(self.letters):
                raise UnknownLetter(f"letter position {pos} outside alphabet of size {len(self.letters)}")
        return word

    def render_word(self, word: Word) -> str:
        if not word:
            return "1"
        return "".join(self.letters[pos].token for pos in word)

    def tokens(self, word: Word) -> list[str]:
        return [self.letters[pos].token for pos in word]

    def module_positions(self) -> frozenset[int]:
        return frozenset(i for i, l in enumerate(self.letters) if l.kind == LetterKind.MODULE)


def factor_occurrences(word: Word, factor: Word) -> list[tuple[Word, Word]]:
    """All (prefix, suffix) pairs with word == prefix + factor + suffix, leftmost first."""
    if not factor:
        raise ValueError("factor must be a nonempty word")
    size = len(factor)
    return [
        (word[:i], word[i + size:])
        for i in range(len(word) - size + 1)
        if word[i:i + size] == factor
    ]


# ---------------------------------------------------------------------------
# Polynomials
# ---------------------------------------------------------------------------

class Polynomial:
    """Immutable finite linear combination of words; zero coefficients are never stored."""

    __slots__ = ("alphabet", "_terms")

    def __init__(self, alphabet: Alphabet, terms: Mapping[Word, Fraction | int] | None = None):
        self.alphabet = alphabet
        clean: dict[Word, Fraction] = {}
        for word, coeff in (terms or {}).items():
            value = Fraction(coeff)
            if value:
                clean[tuple(word)] = value
        self._terms = clean

    # -- constructors --------------------------------------------------------

    @classmethod
    def zero(cls, alphabet: Alphabet) -> Polynomial:
        return cls(alphabet)

    @classmethod
    def one(cls, alphabet: Alphabet) -> Polynomial:
        return cls(alphabet, {EMPTY: 1})

    @classmethod
    def monomial(cls, alphabet: Alphabet, word: Word, coeff: Fraction | int = 1) -> Polynomial:
        return cls(alphabet, {tuple(word): coeff})

    @classmethod
    def letter(cls, alphabet: Alphabet, letter: Letter | str) -> Polynomial:
        return cls(alphabet, {(alphabet.index(letter),): 1})

    @classmethod
    def from_terms(cls, alphabet: Alphabet, terms: Iterable[tuple[Fraction | int, Word]]) -> Polynomial:
        acc: dict[Word, Fraction] = defaultdict(Fraction)
        for coeff, word in terms:
            acc[tuple(word)] += Fraction(coeff)
        return cls(alphabet, acc)

    @classmethod
    def parse(cls, alphabet: Alphabet, text: str) -> Polynomial:
        try:
            parts = split_terms(text)
        except ValueError as exc:
            raise FormatError(str(exc)) from None
        return cls.from_terms(alphabet, ((c, alphabet.parse_word(w)) for c, w in parts))

    # -- inspection ----------------------------------------------------------

    @property
    def terms(self) -> Mapping[Word, Fraction]:
        return MappingProxyType(self._terms)

    def support(self) -> list[Word]:
        return list(self._terms)

    def coefficient(self, word: Word) -> Fraction:
        return self._terms.get(tuple(word), Fraction(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.alphabet == other.alphabet and self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __repr__(self) -> str:
        return f"Polynomial({self.render()})"

    def render(self) -> str:
        if not self._terms:
            return "0"
        parts: list[str] = []
        for word in sorted(self._terms, key=lambda w: (-len(w), w)):
            coeff = self._terms[word]
            sign = "-" if coeff < 0 else "+"
            mag = abs(coeff)
            body = self.alphabet.render_word(word)
            if mag == 1:
                text = body
            elif not word:
                text = format_rational(mag)
            else:
                text = f"{format_rational(mag)}*{body}"
            parts.append(f"{sign} {text}")
        rendered = " ".join(parts)
        return rendered[2:] if rendered.startswith("+ ") else "-" + rendered[2:]

    def letters_used(self) -> frozenset[int]:
        return frozenset(pos for word in self._terms for pos in word)

    # -- arithmetic ----------------------------------------------------------

    def _check(self, other: Polynomial) -> None:
        if self.alphabet != other.alphabet:
            raise AlphabetMismatch("polynomials live over different alphabets")

    def __add__(self, other: Polynomial) -> Polynomial:
        self._check(other)
        acc = dict(self._terms)
        for word, coeff in other._terms.items():
            acc[word] = acc.get(word, Fraction(0)) + coeff
        return Polynomial(self.alphabet, acc)

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __neg__(self) -> Polynomial:
        return Polynomial(self.alphabet, {w: -c for w, c in self._terms.items()})

    def scale(self, coeff: Fraction | int) -> Polynomial:
        return Polynomial(self.alphabet, {w: c * coeff for w, c in self._terms.items()})

    def __mul__(self, other: Polynomial | Fraction | int) -> Polynomial:
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        acc: dict[Word, Fraction] = defaultdict(Fraction)
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                acc[w1 + w2] += c1 * c2
        return Polynomial(self.alphabet, acc)

    def __rmul__(self, other: Fraction | int) -> Polynomial:
        return self.scale(other)

    def substitute(self, images: Mapping[int, Polynomial]) -> Polynomial:
        """Replace every letter position found in `images` by its polynomial."""
        acc: dict[Word, Fraction] = defaultdict(Fraction)
        for word, coeff in self._terms.items():
            partial: dict[Word, Fraction] = {EMPTY: coeff}
            for pos in word:
                image = images.get(pos)
                if image is None:
                    partial = {w + (pos,): c for w, c in partial.items()}
                    continue
                nxt: dict[Word, Fraction] = defaultdict(Fraction)
                for w, c in partial.items():
                    for iw, ic in image._terms.items():
                        nxt[w + iw] += c * ic
                partial = nxt
            for w, c in partial.items():
                acc[w] += c
        return Polynomial(self.alphabet, acc)


def poly_sum(alphabet: Alphabet, parts: Iterable[Polynomial]) -> Polynomial:
    acc: dict[Word, Fraction] = defaultdict(Fraction)
    for part in parts:
        if part.alphabet != alphabet:
            raise AlphabetMismatch("polynomials live over different alphabets")
        for word, coeff in part.terms.items():
            acc[word] += coeff
    return Polynomial(alphabet, acc)


class PolyOp:
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    SCALE = "scale"


def poly_arith(a: Polynomial, b: Polynomial | None, op: str, scalar: Fraction | int | None = None) -> Polynomial:
    if op == PolyOp.ADD:
        return a + b
    if op == PolyOp.SUB:
        return a - b
    if op == PolyOp.MUL:
        return a * b
    if op == PolyOp.SCALE:
        return a.scale(Fraction(0) if scalar is None else scalar)
    raise ValueError(f"unknown polynomial operation {op!r}")


def leading_monomial(p: Polynomial, ordering) -> Word:
    """The unique greatest word of supp(p).

    Raises ZeroPolynomial for 0 and NoStrictMaximum when the greatest
    elements are tied or incomparable.
    """
    from ordering import CompareResult

    support = p.support()
    if not support:
        raise ZeroPolynomial("leading monomial of the zero polynomial")
    best = support[0]
    for word in support[1:]:
        if ordering.compare(word, best) == CompareResult.GREATER:
            best = word
    rivals = [w for w in support if w != best and ordering.compare(best, w) != CompareResult.GREATER]
    if rivals:
        rendered = ", ".join(p.alphabet.render_word(w) for w in [best, *rivals])
        raise NoStrictMaximum([best, *rivals], rendered)
    return best
