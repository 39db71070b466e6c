"""Word orderings: protolex, lex, weights, length, canonical, combined, syllable and shape."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Mapping

from core import Alphabet, Letter, NcrwError, Word

logger = logging.getLogger(__name__)


class CompareResult:
    LESS = "Less"
    GREATER = "Greater"
    EQUIVALENT = "Equivalent"
    INCOMPARABLE = "Incomparable"


class Variant:
    PROTOLEX = "protolex"
    LEX = "lex"
    KBWEIGHT = "kbweight"
    LENGTH = "length"
    CANONICAL = "canonical"
    COMBINED = "combined"
    SYLLABLE = "syllable"
    SHAPE = "shape"

    ALL = (PROTOLEX, LEX, KBWEIGHT, LENGTH, CANONICAL, COMBINED, SYLLABLE, SHAPE)


class LexOrderingRejected(NcrwError):
    """Lex is not noetherian (b > ab > aab > ...) and cannot drive reduction."""


def _sign(a, b) -> str:
    if a < b:
        return CompareResult.LESS
    if a > b:
        return CompareResult.GREATER
    return CompareResult.EQUIVALENT


def _ranks(word: Word, size: int) -> tuple[int, ...]:
    # bigger rank = bigger letter
    return tuple(size - pos for pos in word)


@dataclass(frozen=True)
class OrderingSpec:
    variant: str
    alphabet: Alphabet
    weights: tuple[int, ...] = ()
    separators: frozenset[int] = frozenset()
    parts: tuple["OrderingSpec", ...] = ()

    def __post_init__(self) -> None:
        if self.variant not in Variant.ALL:
            raise ValueError(f"unknown ordering variant {self.variant!r}")
        if self.variant == Variant.KBWEIGHT:
            if len(self.weights) != len(self.alphabet):
                raise ValueError("kbweight needs one weight per letter")
            if any(w <= 0 for w in self.weights):
                raise ValueError("kbweight weights must be positive integers")
        if self.variant == Variant.COMBINED:
            if not self.parts:
                raise ValueError("combined ordering needs at least one component")
            if any(p.alphabet != self.alphabet for p in self.parts):
                raise ValueError("combined components must share the alphabet")
        if self.variant in (Variant.SYLLABLE, Variant.SHAPE):
            if not self.separators:
                raise ValueError(f"{self.variant} ordering needs a nonempty separator set")
            if any(not 0 <= s < len(self.alphabet) for s in self.separators):
                raise ValueError("separator outside the alphabet")

    # -- certification ---------------------------------------------------------

    @property
    def noetherian(self) -> bool:
        if self.variant == Variant.LEX:
            return False
        if self.variant == Variant.COMBINED:
            return all(p.noetherian for p in self.parts)
        return True

    @property
    def multiplicative(self) -> bool:
        if self.variant == Variant.LEX:
            return False
        if self.variant == Variant.COMBINED:
            return all(p.multiplicative for p in self.parts)
        return True

    @property
    def certified(self) -> bool:
        return self.noetherian and self.multiplicative

    # -- comparison ------------------------------------------------------------

    def compare(self, w1: Word, w2: Word) -> str:
        v = self.variant
        if v == Variant.PROTOLEX:
            if len(w1) != len(w2):
                return CompareResult.INCOMPARABLE
            return _first_difference(w1, w2)
        if v == Variant.LEX:
            for x, y in zip(w1, w2):
                if x != y:
                    return CompareResult.GREATER if x < y else CompareResult.LESS
            # padding with a letter below every other letter
            return _sign(len(w1), len(w2))
        if v == Variant.LENGTH:
            return _sign(len(w1), len(w2))
        if v == Variant.KBWEIGHT:
            return _sign(self.weight(w1), self.weight(w2))
        if v == Variant.CANONICAL:
            return _canonical(w1, w2)
        if v == Variant.COMBINED:
            for part in self.parts:
                result = part.compare(w1, w2)
                if result != CompareResult.EQUIVALENT:
                    return result
            return CompareResult.EQUIVALENT
        if v == Variant.SYLLABLE:
            return self._syllable(w1, w2)
        return self._shape(w1, w2)

    def weight(self, word: Word) -> int:
        return sum(self.weights[pos] for pos in word)

    def projection(self, word: Word) -> Word:
        return tuple(pos for pos in word if pos in self.separators)

    def syllables(self, word: Word) -> list[Word]:
        """Maximal separator-free segments, including empty ones (count = separators + 1)."""
        out: list[Word] = []
        current: list[int] = []
        for pos in word:
            if pos in self.separators:
                out.append(tuple(current))
                current = []
            else:
                current.append(pos)
        out.append(tuple(current))
        return out

    def _syllable(self, w1: Word, w2: Word) -> str:
        result = _canonical(self.projection(w1), self.projection(w2))
        if result != CompareResult.EQUIVALENT:
            return result
        s1, s2 = self.syllables(w1), self.syllables(w2)
        result = _sign(len(s1), len(s2))
        if result != CompareResult.EQUIVALENT:
            return result
        for a, b in zip(s1, s2):
            result = _canonical(a, b)
            if result != CompareResult.EQUIVALENT:
                return result
        return CompareResult.EQUIVALENT

    def _shape(self, w1: Word, w2: Word) -> str:
        s1, s2 = self.syllables(w1), self.syllables(w2)
        result = _sign(len(s1), len(s2))
        if result != CompareResult.EQUIVALENT:
            return result
        return _sign(tuple(len(s) for s in s1), tuple(len(s) for s in s2))

    # -- linear extension ------------------------------------------------------

    def sort_key(self, word: Word) -> tuple:
        """A total preorder key: compare(w1, w2) == Less implies sort_key(w1) < sort_key(w2)."""
        size = len(self.alphabet)
        v = self.variant
        if v in (Variant.PROTOLEX, Variant.CANONICAL):
            return (len(word), _ranks(word, size))
        if v == Variant.LEX:
            return _ranks(word, size)
        if v == Variant.LENGTH:
            return (len(word),)
        if v == Variant.KBWEIGHT:
            return (self.weight(word),)
        if v == Variant.COMBINED:
            return tuple(part.sort_key(word) for part in self.parts)
        syllables = self.syllables(word)
        if v == Variant.SYLLABLE:
            proj = self.projection(word)
            return (
                (len(proj), _ranks(proj, size)),
                len(syllables),
                tuple((len(s), _ranks(s, size)) for s in syllables),
            )
        return (len(syllables), tuple(len(s) for s in syllables))

    def describe(self) -> str:
        if self.variant == Variant.COMBINED:
            return "combined(" + ", ".join(p.describe() for p in self.parts) + ")"
        if self.variant in (Variant.SYLLABLE, Variant.SHAPE):
            seps = ",".join(self.alphabet[s].token for s in sorted(self.separators))
            return f"{self.variant}[{seps}]"
        return self.variant


def _first_difference(w1: Word, w2: Word) -> str:
    for x, y in zip(w1, w2):
        if x != y:
            return CompareResult.GREATER if x < y else CompareResult.LESS
    return CompareResult.EQUIVALENT


def _canonical(w1: Word, w2: Word) -> str:
    result = _sign(len(w1), len(w2))
    if result != CompareResult.EQUIVALENT:
        return result
    return _first_difference(w1, w2)


def compare(ordering: OrderingSpec, w1: Word, w2: Word) -> str:
    return ordering.compare(w1, w2)


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def protolex(alphabet: Alphabet) -> OrderingSpec:
    return OrderingSpec(Variant.PROTOLEX, alphabet)


def lex(alphabet: Alphabet) -> OrderingSpec:
    return OrderingSpec(Variant.LEX, alphabet)


def length(alphabet: Alphabet) -> OrderingSpec:
    return OrderingSpec(Variant.LENGTH, alphabet)


def canonical(alphabet: Alphabet) -> OrderingSpec:
    return OrderingSpec(Variant.CANONICAL, alphabet)


def kbweight(alphabet: Alphabet, weights: Mapping[Letter | str | int, int] | Iterable[int], default: int = 1) -> OrderingSpec:
    """Weights given positionally, or as a mapping with `default` for unnamed letters."""
    if isinstance(weights, Mapping):
        table = [default] * len(alphabet)
        for key, value in weights.items():
            pos = key if isinstance(key, int) else alphabet.index(key)
            table[pos] = value
        return OrderingSpec(Variant.KBWEIGHT, alphabet, weights=tuple(table))
    return OrderingSpec(Variant.KBWEIGHT, alphabet, weights=tuple(weights))


def combined(*parts: OrderingSpec) -> OrderingSpec:
    if not parts:
        raise ValueError("combined ordering needs at least one component")
    return OrderingSpec(Variant.COMBINED, parts[0].alphabet, parts=tuple(parts))


def _separator_set(alphabet: Alphabet, separators: Iterable[Letter | str | int]) -> frozenset[int]:
    return frozenset(s if isinstance(s, int) else alphabet.index(s) for s in separators)


def syllable(alphabet: Alphabet, separators: Iterable[Letter | str | int]) -> OrderingSpec:
    return OrderingSpec(Variant.SYLLABLE, alphabet, separators=_separator_set(alphabet, separators))


def shape(alphabet: Alphabet, separators: Iterable[Letter | str | int]) -> OrderingSpec:
    return OrderingSpec(Variant.SHAPE, alphabet, separators=_separator_set(alphabet, separators))


def is_strictly_decreasing(lhs: Word, rhs_support: Iterable[Word], ordering: OrderingSpec) -> bool:
    return all(ordering.compare(w, lhs) == CompareResult.LESS for w in rhs_support)
